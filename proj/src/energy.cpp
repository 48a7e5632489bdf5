#include "seamless/energy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seamless {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kQuarter = kPi / 2.0;

Eigen::VectorXd target_vector(const SolverState& state, const HolonomySignature& sig) {
  Eigen::VectorXd b(state.basis.n_coefficients());
  for (int r = 0; r < state.mesh.n_vertices(); ++r) {
    const int col = state.basis.vertex_column(r);
    if (col >= 0) b[col] = sig.k_vertex[r] * kQuarter;
  }
  for (size_t s = 0; s < state.loops.size(); ++s)
    b[state.basis.loop_column(static_cast<int>(s))] = sig.k_loop[s] * kQuarter;
  return b;
}

double sum_triangle_energies(const HalfedgeMesh& mesh, const CornerMetric& metric) {
  double e = 0.0;
  for (int f = 0; f < mesh.n_faces(); ++f)
    e += triangle_energy(metric.mu[3 * f], metric.mu[3 * f + 1], metric.mu[3 * f + 2]).value;
  return e;
}

// largest t in [0, 1] keeping face margins at or above the threshold,
// bisected per offending triangle
double truncated_step(const HalfedgeMesh& mesh, const CornerMetric& metric,
                      const Eigen::VectorXd& dmu, double threshold) {
  auto margin_at = [&](int f, double t) {
    const int h = 3 * f;
    return face_margin(metric.mu[h] + t * dmu[h], metric.mu[h + 1] + t * dmu[h + 1],
                       metric.mu[h + 2] + t * dmu[h + 2]);
  };
  double t_max = 1.0;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    if (margin_at(f, t_max) >= threshold) continue;
    double lo = 0.0, hi = t_max;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (margin_at(f, mid) >= threshold ? lo : hi) = mid;
    }
    t_max = lo;
  }
  return t_max;
}

void apply_step(SolverState& state, const Eigen::VectorXd& dy, double t) {
  const Eigen::VectorXd dmu = state.basis.P() * dy;  // psi coordinates
  const Eigen::VectorXd dxi = state.basis.W() * dy;
  for (int h = 0; h < state.mesh.n_halfedges(); ++h) {
    state.metric.mu[h] += t * dmu[h];
    state.xi.value[h] += t * dxi[h];
  }
  state.y += t * dy;
}

// flips every triangle at or below the degeneracy margin, in ascending face
// order, keeping xi and the dual loops consistent with the new connectivity
int resolve_degeneracies(SolverState& state, const SolveOptions& options, long flip_budget) {
  int performed = 0;
  const double threshold = options.degeneracy_margin * (1.0 + 1e-6);
  for (;;) {
    int face = -1;
    for (int f = 0; f < state.mesh.n_faces(); ++f) {
      if (triangle_margin(state.mesh, state.metric, f) <= threshold) {
        face = f;
        break;
      }
    }
    if (face < 0) break;
    if (state.flips >= flip_budget)
      throw InfiniteFlipSuspectedError("flip budget of " + std::to_string(flip_budget) +
                                       " exhausted");

    int longest = 3 * face;
    for (int k = 1; k < 3; ++k)
      if (state.metric.mu[3 * face + k] > state.metric.mu[longest]) longest = 3 * face + k;
    const int edge = state.mesh.edge(longest);

    std::vector<double> kappa_before;
    {
      const AngleField angles = triangle_angles(state.mesh, state.metric);
      for (const auto& loop : state.loops) kappa_before.push_back(loop_curvature(angles, loop));
    }

    const int h = state.mesh.halfedge_of_edge(edge);
    const int hb = state.mesh.sibling(h);
    const int f0 = state.mesh.face(h), f1 = state.mesh.face(hb);
    const double xi_a = state.xi.value[state.mesh.next(h)];
    const double xi_b = state.xi.value[state.mesh.prev(h)];
    const double xi_c = state.xi.value[state.mesh.next(hb)];
    const double xi_d = state.xi.value[state.mesh.prev(hb)];

    const HalfedgeMesh before = state.mesh;
    intrinsic_flip(state.mesh, state.metric, edge);
    repair_dual_loops(before, state.mesh, state.loops, edge);

    state.xi.value[3 * f0] = xi_c;
    state.xi.value[3 * f0 + 1] = -xi_c - xi_b;
    state.xi.value[3 * f0 + 2] = xi_b;
    state.xi.value[3 * f1] = xi_a;
    state.xi.value[3 * f1 + 1] = xi_c + xi_b;
    state.xi.value[3 * f1 + 2] = xi_d;

    const AngleField angles = triangle_angles(state.mesh, state.metric);
    for (size_t s = 0; s < state.loops.size(); ++s) {
      const double kappa = loop_curvature(angles, state.loops[s]);
      if (std::abs(kappa - kappa_before[s]) > 1e-8)
        throw LoopBasisCorruptedError("loop curvature changed by " +
                                      std::to_string(kappa - kappa_before[s]) +
                                      " across flip of edge " + std::to_string(edge));
    }

    ++state.flips;
    ++performed;
  }
  if (performed > 0)
    state.basis = build_basis(state.mesh, state.loops, state.basis.excluded_vertex());
  return performed;
}

}  // namespace

void validate_signature(const HalfedgeMesh& mesh, const HolonomySignature& sig) {
  const int g = mesh.genus();
  if (static_cast<int>(sig.k_vertex.size()) != mesh.n_vertices())
    throw SignatureError("expected one k per vertex");
  if (static_cast<int>(sig.k_loop.size()) != 2 * g)
    throw SignatureError("expected " + std::to_string(2 * g) + " loop targets, got " +
                         std::to_string(sig.k_loop.size()));
  if (sig.excluded_vertex < 0 || sig.excluded_vertex >= mesh.n_vertices())
    throw SignatureError("excluded vertex out of range");
  long sum = 0;
  for (int r = 0; r < mesh.n_vertices(); ++r) {
    if (sig.k_vertex[r] < 1)
      throw SignatureError("k must be at least 1 at every vertex (vertex " +
                           std::to_string(r) + " has k = " + std::to_string(sig.k_vertex[r]) +
                           ")");
    sum += 4 - sig.k_vertex[r];
  }
  if (sum != 8 - 8L * g)
    throw SignatureError("signature violates Gauss-Bonnet: sum of (4 - k) is " +
                         std::to_string(sum) + ", needs " + std::to_string(8 - 8L * g));
}

double lobachevsky(double theta) {
  if (theta < -1e-12 || theta > kPi + 1e-12)
    throw DomainError("lobachevsky argument " + std::to_string(theta) + " outside [0, pi]");
  theta = std::clamp(theta, 0.0, kPi);
  if (theta > kPi / 2.0) return -lobachevsky(kPi - theta);
  if (theta == 0.0) return 0.0;
  // Lambda(t) = t - t ln(2t) + sum_n zeta(2n)/(n(2n+1)) t^{2n+1}/pi^{2n}
  static const std::vector<double> coeff = [] {
    std::vector<double> c(81);
    for (int n = 1; n <= 80; ++n)
      c[n] = std::riemann_zeta(2.0 * n) / (n * (2.0 * n + 1.0));
    return c;
  }();
  double value = theta - theta * std::log(2.0 * theta);
  const double q = (theta / kPi) * (theta / kPi);
  double power = theta;
  for (int n = 1; n <= 80; ++n) {
    power *= q;
    const double term = coeff[n] * power;
    value += term;
    if (std::abs(term) < 1e-18 * std::abs(value)) break;
  }
  return value;
}

TriangleEnergy triangle_energy(double mu_i, double mu_j, double mu_k) {
  const auto alpha = face_angles(mu_i, mu_j, mu_k, true);
  TriangleEnergy out;
  out.value = 0.5 * (mu_i * alpha[0] + mu_j * alpha[1] + mu_k * alpha[2]) +
              lobachevsky(alpha[0]) + lobachevsky(alpha[1]) + lobachevsky(alpha[2]);
  out.gradient = {alpha[0] / 2.0, alpha[1] / 2.0, alpha[2] / 2.0};
  return out;
}

SolverState make_state(const HalfedgeMesh& mesh, const EdgeMetric& metric, int excluded_vertex) {
  SolverState state;
  state.mesh = mesh;
  const TreeCotree tct = tree_cotree(mesh);
  state.loops.reserve(tct.leftover_edges.size());
  for (int e : tct.leftover_edges) state.loops.push_back(dual_loop(mesh, tct, e));
  state.basis = build_basis(mesh, state.loops, excluded_vertex);
  state.xi.value.assign(mesh.n_halfedges(), 0.0);
  state.metric = corner_mu(mesh, metric, state.xi);
  state.y = Eigen::VectorXd::Zero(state.basis.n_coefficients());
  return state;
}

Eigen::VectorXd residual(const SolverState& state, const HolonomySignature& sig) {
  const AngleField angles = triangle_angles(state.mesh, state.metric);
  const CurvatureState cs = curvatures(state.mesh, angles, state.loops);
  Eigen::VectorXd L(state.basis.n_coefficients());
  for (int r = 0; r < state.mesh.n_vertices(); ++r) {
    const int col = state.basis.vertex_column(r);
    if (col >= 0) L[col] = cs.theta[r] - sig.k_vertex[r] * kQuarter;
  }
  for (size_t s = 0; s < state.loops.size(); ++s)
    L[state.basis.loop_column(static_cast<int>(s))] = cs.kappa[s] - sig.k_loop[s] * kQuarter;
  return L;
}

Eigen::SparseMatrix<double> jacobian(const SolverState& state) {
  const AngleField angles = triangle_angles(state.mesh, state.metric);
  const int nh = state.mesh.n_halfedges();
  std::vector<Eigen::Triplet<double>> ht;
  ht.reserve(9 * state.mesh.n_faces());
  for (int f = 0; f < state.mesh.n_faces(); ++f) {
    const int h = 3 * f;
    double cot[3];
    for (int t = 0; t < 3; ++t) cot[t] = 1.0 / std::tan(angles.alpha[h + t]);
    for (int t = 0; t < 3; ++t) {
      const int j = (t + 1) % 3, k = (t + 2) % 3;
      ht.emplace_back(h + t, h + t, 0.5 * (cot[j] + cot[k]));
      ht.emplace_back(h + t, h + j, -0.5 * cot[k]);
      ht.emplace_back(h + t, h + k, -0.5 * cot[j]);
    }
  }
  Eigen::SparseMatrix<double> H(nh, nh);
  H.setFromTriplets(ht.begin(), ht.end());
  Eigen::SparseMatrix<double> A =
      Eigen::SparseMatrix<double>(state.basis.P().transpose()) * H * state.basis.P();
  return A;
}

double total_energy(const SolverState& state, const HolonomySignature& sig) {
  const Eigen::VectorXd b = target_vector(state, sig);
  return sum_triangle_energies(state.mesh, state.metric) - 0.5 * b.dot(state.y);
}

Eigen::VectorXd newton_step(const SolverState& state, const HolonomySignature& sig,
                            const Eigen::VectorXd& L) {
  (void)sig;
  const Eigen::SparseMatrix<double> A = jacobian(state);
  const int n = static_cast<int>(A.rows());
  Eigen::VectorXd dy;
  if (n < 3000) {
    Eigen::MatrixXd Ad(A);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(Ad);
    if (ldlt.info() != Eigen::Success)
      throw SingularSystemError("dense factorization of the Newton system failed");
    dy = ldlt.solve(-L);
  } else {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success)
      throw SingularSystemError("sparse factorization of the Newton system failed");
    dy = ldlt.solve(-L);
  }
  const double defect = (A * dy + L).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
  if (!dy.allFinite() || defect > 1e-6 * scale)
    throw SingularSystemError("Newton system is numerically singular (solve defect " +
                              std::to_string(defect) + ")");
  return dy;
}

std::pair<double, int> line_search_and_flip(SolverState& state, const Eigen::VectorXd& dy,
                                            const HolonomySignature& sig,
                                            const SolveOptions& options) {
  const Eigen::VectorXd L = residual(state, sig);
  const double slope = 0.5 * L.dot(dy);  // grad E' = L/2
  const double e0 = total_energy(state, sig);
  const Eigen::VectorXd dmu = state.basis.P() * dy;

  const double t_max =
      truncated_step(state.mesh, state.metric, dmu, options.degeneracy_margin);

  auto energy_at = [&](double t) {
    double e = -0.5 * target_vector(state, sig).dot(state.y + t * dy);
    for (int f = 0; f < state.mesh.n_faces(); ++f)
      e += triangle_energy(state.metric.mu[3 * f] + t * dmu[3 * f],
                           state.metric.mu[3 * f + 1] + t * dmu[3 * f + 1],
                           state.metric.mu[3 * f + 2] + t * dmu[3 * f + 2])
               .value;
    return e;
  };

  const long budget =
      options.flip_budget >= 0 ? options.flip_budget : 100L * state.mesh.n_edges();

  if (t_max < 1.0) {
    // truncation: a step to the degenerate configuration is structural
    // progress (flips preserve E'), so accept it whenever it does not
    // increase the energy
    if (energy_at(t_max) <= e0 + 1e-12 * (1.0 + std::abs(e0))) {
      apply_step(state, dy, t_max);
      const int flips = resolve_degeneracies(state, options, budget);
      return {t_max, flips};
    }
  }

  // absolute slack at the level of rounding noise in e0; without it the
  // Armijo test rejects full Newton steps once the true decrease drops
  // below machine precision of the energy
  const double noise = 1e-12 * (1.0 + std::abs(e0));
  double t = t_max < 1.0 ? t_max * options.backtrack : 1.0;
  while (t > 1e-14) {
    if (energy_at(t) <= e0 + options.armijo * t * slope + noise) {
      apply_step(state, dy, t);
      return {t, 0};
    }
    t *= options.backtrack;
  }
  throw LineSearchStalledError("no acceptable step along the Newton direction");
}

SolveResult solve(const HalfedgeMesh& mesh, const EdgeMetric& metric,
                  const HolonomySignature& sig, const SolveOptions& options) {
  validate_signature(mesh, sig);
  SolveResult result;
  result.state = make_state(mesh, metric, sig.excluded_vertex);
  SolverState& state = result.state;

  Eigen::VectorXd L = residual(state, sig);
  result.residual_inf = L.cwiseAbs().maxCoeff();
  result.energy = total_energy(state, sig);
  result.trace.push_back({0, result.residual_inf, result.energy, 0.0, 0});

  try {
    for (int it = 1; it <= options.max_iters; ++it) {
      if (result.residual_inf <= options.tol) {
        result.status = SolveStatus::converged;
        return result;
      }
      const Eigen::VectorXd dy = newton_step(state, sig, L);
      const auto [t, flips] = line_search_and_flip(state, dy, sig, options);
      state.iterations = it;
      L = residual(state, sig);
      result.residual_inf = L.cwiseAbs().maxCoeff();
      result.energy = total_energy(state, sig);
      result.trace.push_back({it, result.residual_inf, result.energy, t, flips});
    }
    result.status = result.residual_inf <= options.tol ? SolveStatus::converged
                                                       : SolveStatus::max_iterations;
  } catch (const InfiniteFlipSuspectedError&) {
    result.status = SolveStatus::flip_budget;
  } catch (const SingularSystemError&) {
    result.status = SolveStatus::singular;
  }
  return result;
}

}  // namespace seamless
