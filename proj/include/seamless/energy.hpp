#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <vector>

#include "seamless/forms.hpp"
#include "seamless/mesh.hpp"
#include "seamless/metric.hpp"

namespace seamless {

struct EnergyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : EnergyError {
  using EnergyError::EnergyError;
};
struct SignatureError : EnergyError {
  using EnergyError::EnergyError;
};
struct SingularSystemError : EnergyError {
  using EnergyError::EnergyError;
};
struct LineSearchStalledError : EnergyError {
  using EnergyError::EnergyError;
};
struct LoopBasisCorruptedError : EnergyError {
  using EnergyError::EnergyError;
};
struct InfiniteFlipSuspectedError : EnergyError {
  using EnergyError::EnergyError;
};

/// Integer quarter-turn targets: Theta_r = k_r pi/2 per vertex, kappa_s =
/// k_s pi/2 per dual loop. One vertex constraint is redundant and excluded.
struct HolonomySignature {
  std::vector<int> k_vertex;
  std::vector<int> k_loop;
  int excluded_vertex = 0;
};

/// Throws SignatureError unless sum_r (4 - k_r) = 8 - 8g, all k_r >= 1, and
/// the loop target count matches 2g.
void validate_signature(const HalfedgeMesh& mesh, const HolonomySignature& sig);

/// Milnor's Lobachevsky function on [0, pi].
double lobachevsky(double theta);

struct TriangleEnergy {
  double value;
  std::array<double, 3> gradient;  // d/d mu_l = alpha_l / 2
};

/// Per-triangle convex energy g = 1/2 sum mu_l alpha_l + sum Lambda(alpha_l).
TriangleEnergy triangle_energy(double mu_i, double mu_j, double mu_k);

struct SolveOptions {
  double tol = 1e-10;
  int max_iters = 100;
  double armijo = 1e-4;
  double backtrack = 0.5;
  double degeneracy_margin = 1e-10;
  long flip_budget = -1;  // default 100 * |E|
};

struct TraceRecord {
  int iteration;
  double residual_inf;
  double energy;
  double step;
  int flips;
};

struct SolverState {
  HalfedgeMesh mesh;
  CornerMetric metric;
  ClosedOneForm xi;  // accumulated, on the current connectivity
  std::vector<DualCycle> loops;
  FormBasis basis;
  Eigen::VectorXd y;  // accumulated basis coefficients
  int iterations = 0;
  long flips = 0;
};

SolverState make_state(const HalfedgeMesh& mesh, const EdgeMetric& metric, int excluded_vertex);

/// L: vertex rows Theta_r - Theta_hat_r (excluded vertex omitted), then loop
/// rows kappa_s - kappa_hat_s, ordered as the basis columns.
Eigen::VectorXd residual(const SolverState& state, const HolonomySignature& sig);

/// A = P^T H P with per-triangle cotangent blocks; equals
/// the Jacobian dL/dy and the Hessian of 2 E'.
Eigen::SparseMatrix<double> jacobian(const SolverState& state);

/// E' = sum_T g(mu_T) - 1/2 b^T y with b the stacked targets.
double total_energy(const SolverState& state, const HolonomySignature& sig);

/// Solves A dy = -L. Throws SingularSystemError.
Eigen::VectorXd newton_step(const SolverState& state, const HolonomySignature& sig,
                            const Eigen::VectorXd& L);

/// Backtracking line search along mu + t P dy with step truncation at the
/// degeneracy margin; a truncated step is accepted unconditionally when it
/// does not increase E' and the degenerate triangles are flipped. Updates
/// state in place and returns (t, flips performed).
std::pair<double, int> line_search_and_flip(SolverState& state, const Eigen::VectorXd& dy,
                                            const HolonomySignature& sig,
                                            const SolveOptions& options);

enum class SolveStatus { converged, max_iterations, flip_budget, singular };

struct SolveResult {
  SolveStatus status = SolveStatus::max_iterations;
  SolverState state;
  std::vector<TraceRecord> trace;
  double residual_inf = 0.0;
  double energy = 0.0;
};

SolveResult solve(const HalfedgeMesh& mesh, const EdgeMetric& metric,
                  const HolonomySignature& sig, const SolveOptions& options = {});

}  // namespace seamless
