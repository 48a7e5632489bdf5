#include "seamless/forms.hpp"

#include <cmath>
#include <deque>
#include <string>

namespace seamless {

ClosedOneForm validate_closed(const HalfedgeMesh& mesh, const std::vector<double>& xi,
                              double tol) {
  if (static_cast<int>(xi.size()) != mesh.n_halfedges())
    throw DimensionMismatchError("one value per halfedge expected");
  for (int h = 0; h < mesh.n_halfedges(); ++h) {
    const int s = mesh.sibling(h);
    if (s < 0) continue;
    if (std::abs(xi[h] + xi[s]) > tol)
      throw NotAntisymmetricError("xi[" + std::to_string(h) + "] + xi[sibling] = " +
                                  std::to_string(xi[h] + xi[s]));
  }
  double worst = 0.0;
  int worst_face = -1;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const double s = xi[3 * f] + xi[3 * f + 1] + xi[3 * f + 2];
    if (std::abs(s) > worst) {
      worst = std::abs(s);
      worst_face = f;
    }
  }
  if (worst > tol)
    throw NotClosedError("triangle " + std::to_string(worst_face) + " has circulation " +
                         std::to_string(worst));
  return ClosedOneForm{xi};
}

CornerField psi_from_xi(const HalfedgeMesh& mesh, const ClosedOneForm& xi) {
  CornerField psi;
  psi.value.resize(mesh.n_halfedges());
  for (int h = 0; h < mesh.n_halfedges(); ++h) {
    const int j = mesh.next(h);
    const int k = mesh.next(j);
    psi.value[h] = (xi.value[k] - xi.value[j]) / 3.0;
  }
  return psi;
}

ClosedOneForm xi_from_psi(const HalfedgeMesh& mesh, const CornerField& psi, double tol) {
  std::vector<double> xi(mesh.n_halfedges());
  for (int h = 0; h < mesh.n_halfedges(); ++h) {
    const int j = mesh.next(h);
    const int k = mesh.next(j);
    xi[h] = psi.value[j] - psi.value[k];
  }
  for (int h = 0; h < mesh.n_halfedges(); ++h) {
    const int s = mesh.sibling(h);
    if (s >= 0 && std::abs(xi[h] + xi[s]) > tol)
      throw SiblingMismatchError("psi is not realizable as a closed 1-form (halfedge " +
                                 std::to_string(h) + ")");
  }
  return ClosedOneForm{xi};
}

FormBasis build_basis(const HalfedgeMesh& mesh, const std::vector<DualCycle>& loops,
                      int excluded_vertex) {
  const int nh = mesh.n_halfedges();
  const int nv = mesh.n_vertices();
  const int ncols = nv - 1 + static_cast<int>(loops.size());

  FormBasis basis;
  basis.excluded_vertex_ = excluded_vertex;
  basis.n_loops_ = static_cast<int>(loops.size());
  basis.vertex_column_.assign(nv, -1);

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> zt;
  zt.reserve(2 * nh);
  for (int i = 0; i < nh; ++i) {
    // xi_h = psi_{next(h)} - psi_{prev(h)}: column i touches its neighbors
    zt.emplace_back(mesh.prev(i), i, 1.0);
    zt.emplace_back(mesh.next(i), i, -1.0);
  }
  basis.Z_.resize(nh, nh);
  basis.Z_.setFromTriplets(zt.begin(), zt.end());

  std::vector<Triplet> pt;
  int col = 0;
  for (int r = 0; r < nv; ++r) {
    if (r == excluded_vertex) continue;
    for (int h : mesh.vertex_corner_set(r)) pt.emplace_back(h, col, 1.0);
    basis.vertex_column_[r] = col;
    ++col;
  }
  for (const auto& loop : loops) {
    for (int m = 0; m < loop.length(); ++m)
      pt.emplace_back(loop.pivot_halfedges[m], col, static_cast<double>(loop.signs[m]));
    ++col;
  }
  basis.P_.resize(nh, ncols);
  basis.P_.setFromTriplets(pt.begin(), pt.end());

  basis.W_ = basis.Z_ * basis.P_;
  basis.W_.prune(1e-300);

  Eigen::SparseMatrix<double> normal = Eigen::SparseMatrix<double>(basis.P_.transpose()) * basis.P_;
  auto solver = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
  solver->compute(normal);
  if (solver->info() != Eigen::Success)
    throw RankDeficientError("P^T P is singular: degenerate loop basis");
  basis.normal_solver_ = std::move(solver);
  return basis;
}

Eigen::VectorXd FormBasis::apply_pinv(const Eigen::VectorXd& psi) const {
  if (psi.size() != P_.rows()) throw DimensionMismatchError("psi has wrong dimension");
  return normal_solver_->solve(P_.transpose() * psi);
}

ClosedOneForm expand(const HalfedgeMesh& mesh, const FormBasis& basis, const Eigen::VectorXd& y) {
  if (y.size() != basis.n_coefficients())
    throw DimensionMismatchError("coefficient vector has wrong dimension");
  Eigen::VectorXd xi = basis.W() * y;
  ClosedOneForm form;
  form.value.assign(xi.data(), xi.data() + xi.size());
  (void)mesh;
  return form;
}

ZeroForm integrate(const ClosedOneForm& xi, const CutMesh& cut, int root) {
  const HalfedgeMesh& mc = cut.mesh;
  const int nvc = mc.n_vertices();
  ZeroForm phi;
  phi.root = root;
  phi.value.assign(nvc, 0.0);
  // breadth-first over the cut-mesh vertex graph, rooted spanning tree
  std::vector<std::vector<int>> outgoing(nvc);
  for (int h = 0; h < mc.n_halfedges(); ++h) outgoing[mc.tail(h)].push_back(h);
  std::vector<char> seen(nvc, 0);
  seen[root] = 1;
  std::deque<int> q{root};
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    for (int h : outgoing[v]) {
      const int w = mc.head(h);
      if (!seen[w]) {
        seen[w] = 1;
        phi.value[w] = phi.value[v] + xi.value[cut.halfedge_to_original[h]];
        q.push_back(w);
      }
    }
  }
  for (int v = 0; v < nvc; ++v)
    if (!seen[v]) throw InconsistentPeriodsError("cut mesh is not connected");

  // closedness on a disk makes the result path independent; verify
  double worst = 0.0;
  for (int h = 0; h < mc.n_halfedges(); ++h) {
    const double r = phi.value[mc.head(h)] - phi.value[mc.tail(h)] -
                     xi.value[cut.halfedge_to_original[h]];
    worst = std::max(worst, std::abs(r));
  }
  if (worst > 1e-9)
    throw InconsistentPeriodsError("1-form is not exact on the cut disk (residual " +
                                   std::to_string(worst) + ")");
  return phi;
}

}  // namespace seamless
