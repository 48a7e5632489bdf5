#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>
#include <vector>

#include "seamless/mesh.hpp"

namespace seamless {

struct FormError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotAntisymmetricError : FormError {
  using FormError::FormError;
};
struct NotClosedError : FormError {
  using FormError::FormError;
};
struct SiblingMismatchError : FormError {
  using FormError::FormError;
};
struct RankDeficientError : FormError {
  using FormError::FormError;
};
struct DimensionMismatchError : FormError {
  using FormError::FormError;
};
struct InconsistentPeriodsError : FormError {
  using FormError::FormError;
};

/// Closed discrete 1-form: per-halfedge values with xi_{i'} = -xi_i and zero
/// sum around each triangle.
struct ClosedOneForm {
  std::vector<double> value;
};

/// Per-halfedge corner variable psi with zero sum in each triangle.
struct CornerField {
  std::vector<double> value;
};

/// 0-form on a cut mesh, zero at the root vertex.
struct ZeroForm {
  std::vector<double> value;
  int root = 0;
};

ClosedOneForm validate_closed(const HalfedgeMesh& mesh, const std::vector<double>& xi,
                              double tol = 1e-12);

CornerField psi_from_xi(const HalfedgeMesh& mesh, const ClosedOneForm& xi);
ClosedOneForm xi_from_psi(const HalfedgeMesh& mesh, const CornerField& psi, double tol = 1e-12);

/// Bases for closed 1-forms: columns z_i of Z map corner variables psi to
/// forms, columns w_t of W (one per non-excluded vertex plus one per dual
/// loop) span the closed forms, and W = Z P where the columns of P carry
/// the angle-constraint coefficients.
class FormBasis {
public:
  FormBasis() = default;

  const Eigen::SparseMatrix<double>& Z() const { return Z_; }
  const Eigen::SparseMatrix<double>& W() const { return W_; }
  const Eigen::SparseMatrix<double>& P() const { return P_; }

  int n_coefficients() const { return static_cast<int>(P_.cols()); }
  int excluded_vertex() const { return excluded_vertex_; }
  int n_loops() const { return n_loops_; }

  /// Column index of vertex r, or -1 for the excluded vertex.
  int vertex_column(int r) const { return vertex_column_[r]; }
  int loop_column(int s) const { return static_cast<int>(vertex_column_.size()) - 1 + s; }

  /// y = P^+ psi via the normal equations (P^T P) y = P^T psi.
  Eigen::VectorXd apply_pinv(const Eigen::VectorXd& psi) const;

private:
  Eigen::SparseMatrix<double> Z_, W_, P_;
  std::shared_ptr<const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> normal_solver_;
  std::vector<int> vertex_column_;
  int excluded_vertex_ = -1;
  int n_loops_ = 0;

  friend FormBasis build_basis(const HalfedgeMesh&, const std::vector<DualCycle>&, int);
};

FormBasis build_basis(const HalfedgeMesh& mesh, const std::vector<DualCycle>& loops,
                      int excluded_vertex);

/// xi = W y.
ClosedOneForm expand(const HalfedgeMesh& mesh, const FormBasis& basis, const Eigen::VectorXd& y);

/// Integrates a closed 1-form on M over a cut disk: phi per cut-mesh vertex
/// with phi(root) = 0 and phi_head - phi_tail = xi on every halfedge.
ZeroForm integrate(const ClosedOneForm& xi, const CutMesh& cut, int root);

}  // namespace seamless
