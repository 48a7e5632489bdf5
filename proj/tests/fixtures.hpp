#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "seamless/energy.hpp"
#include "seamless/io.hpp"
#include "seamless/mesh.hpp"
#include "seamless/metric.hpp"

namespace fixtures {

using seamless::EdgeMetric;
using seamless::HalfedgeMesh;

struct Embedded {
  HalfedgeMesh mesh;
  std::vector<std::array<double, 3>> positions;
  EdgeMetric metric;
};

inline std::vector<std::array<int, 3>> tetra_faces() {
  return {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}};
}

/// Regular tetrahedron, all edges length 1.
inline Embedded tetra() {
  Embedded out;
  out.mesh = HalfedgeMesh::from_faces(4, tetra_faces());
  const double s = 1.0 / std::sqrt(2.0);
  out.positions = {{1, 0, -s}, {-1, 0, -s}, {0, 1, s}, {0, -1, s}};
  for (auto& p : out.positions)
    for (double& c : p) c /= 2.0;
  out.metric = seamless::edge_metric_from_positions(out.mesh, out.positions);
  return out;
}

inline std::vector<std::array<int, 3>> torus_faces(int n) {
  auto v = [n](int i, int j) { return ((i % n + n) % n) * n + ((j % n + n) % n); };
  std::vector<std::array<int, 3>> faces;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      faces.push_back({v(i, j), v(i + 1, j), v(i + 1, j + 1)});
      faces.push_back({v(i, j), v(i + 1, j + 1), v(i, j + 1)});
    }
  }
  return faces;
}

/// Flat equilateral torus: n x n triangulated hexagonal-lattice quotient,
/// every edge length 1, every vertex angle sum 2 pi.
inline Embedded torus(int n = 3) {
  Embedded out;
  out.mesh = HalfedgeMesh::from_faces(n * n, torus_faces(n));
  out.metric.length.assign(out.mesh.n_edges(), 1.0);
  // positions on an embedded torus, used only where 3D output is needed
  out.positions.resize(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = 2.0 * M_PI * i / n, w = 2.0 * M_PI * j / n;
      out.positions[i * n + j] = {(2.0 + std::cos(w)) * std::cos(u),
                                  (2.0 + std::cos(w)) * std::sin(u), std::sin(w)};
    }
  }
  return out;
}

/// Genus-2 surface: connected sum of two flat 3x3 tori, one face removed
/// from each and the boundary triangles glued with reversed orientation.
/// All edges keep length 1.
inline Embedded genus2() {
  auto fa = torus_faces(3);
  auto fb = torus_faces(3);
  const std::array<int, 3> hole_a = fa.back();
  fa.pop_back();
  const std::array<int, 3> hole_b = fb.back();
  fb.pop_back();
  // b-vertex -> merged id; the hole corners map onto a's hole reversed
  std::vector<int> remap(9);
  int next_id = 9;
  for (int v = 0; v < 9; ++v) {
    if (v == hole_b[0]) remap[v] = hole_a[0];
    else if (v == hole_b[1]) remap[v] = hole_a[2];
    else if (v == hole_b[2]) remap[v] = hole_a[1];
    else remap[v] = next_id++;
  }
  std::vector<std::array<int, 3>> faces = fa;
  for (const auto& f : fb) faces.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});
  Embedded out;
  out.mesh = HalfedgeMesh::from_faces(15, faces);
  out.metric.length.assign(out.mesh.n_edges(), 1.0);
  return out;
}

/// Icosphere: subdivided icosahedron projected to the unit sphere. The
/// first 12 vertices are the icosahedron corners.
inline Embedded icosphere(int subdivisions = 2) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<std::array<double, 3>> pos = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
      {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
      {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  auto normalize = [](std::array<double, 3>& p) {
    const double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    for (double& c : p) c /= n;
  };
  for (auto& p : pos) normalize(p);
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      std::array<double, 3> m = {(pos[a][0] + pos[b][0]) / 2, (pos[a][1] + pos[b][1]) / 2,
                                 (pos[a][2] + pos[b][2]) / 2};
      normalize(m);
      pos.push_back(m);
      const int id = static_cast<int>(pos.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> refined;
    refined.reserve(4 * faces.size());
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      refined.push_back({f[0], ab, ca});
      refined.push_back({f[1], bc, ab});
      refined.push_back({f[2], ca, bc});
      refined.push_back({ab, bc, ca});
    }
    faces = std::move(refined);
  }
  Embedded out;
  out.mesh = HalfedgeMesh::from_faces(static_cast<int>(pos.size()), faces);
  out.positions = pos;
  out.metric = seamless::edge_metric_from_positions(out.mesh, pos);
  return out;
}

/// Lobachevsky oracle: the log singularity is split off analytically and
/// the smooth remainder ln(sin t / t) integrated by adaptive Simpson.
inline double lobachevsky_quadrature(double theta) {
  if (theta == 0.0) return 0.0;
  auto f = [](double t) {
    if (std::abs(t) < 1e-8) return -t * t / 6.0;  // ln(sin t / t) ~ -t^2/6
    return std::log(std::sin(t) / t);
  };
  struct Simpson {
    std::function<double(double)> g;
    double recurse(double a, double b, double fa, double fm, double fb, double whole,
                   double eps, int depth) const {
      const double m = (a + b) / 2;
      const double lm = (a + m) / 2, rm = (m + b) / 2;
      const double flm = g(lm), frm = g(rm);
      const double left = (m - a) / 6 * (fa + 4 * flm + fm);
      const double right = (b - m) / 6 * (fm + 4 * frm + fb);
      if (depth > 50 || std::abs(left + right - whole) < 15 * eps)
        return left + right + (left + right - whole) / 15;
      return recurse(a, m, fa, flm, fm, left, eps / 2, depth + 1) +
             recurse(m, b, fm, frm, fb, right, eps / 2, depth + 1);
    }
  };
  Simpson s{f};
  const double a = 0.0, b = theta;
  const double fa = f(a), fb = f(b), fm = f((a + b) / 2);
  const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  const double smooth = s.recurse(a, b, fa, fm, fb, whole, 1e-15, 0);
  return theta - theta * std::log(2.0 * theta) - smooth;
}

/// Random feasible perturbation of the initial state: a small step in basis
/// coefficients keeps every triangle margin positive.
inline void randomize_state(seamless::SolverState& state, std::mt19937& rng,
                            double amplitude = 0.2) {
  std::normal_distribution<double> dist(0.0, amplitude);
  Eigen::VectorXd dy(state.basis.n_coefficients());
  for (int i = 0; i < dy.size(); ++i) dy[i] = dist(rng);
  for (double scale = 1.0; scale > 1e-6; scale /= 2.0) {
    seamless::CornerMetric trial = state.metric;
    const Eigen::VectorXd dmu = state.basis.P() * (scale * dy);
    for (int h = 0; h < state.mesh.n_halfedges(); ++h) trial.mu[h] += dmu[h];
    bool ok = true;
    for (int f = 0; f < state.mesh.n_faces() && ok; ++f)
      ok = seamless::triangle_margin(state.mesh, trial, f) > 1e-3;
    if (ok) {
      const Eigen::VectorXd dxi = state.basis.W() * (scale * dy);
      state.metric = trial;
      for (int h = 0; h < state.mesh.n_halfedges(); ++h) state.xi.value[h] += dxi[h];
      state.y += scale * dy;
      return;
    }
  }
}

/// All-regular signature adjusted at the listed cones. Unspecified loop
/// targets default to the given metric's rounded initial holonomy.
inline seamless::HolonomySignature signature(const HalfedgeMesh& mesh, const EdgeMetric& metric,
                                             const std::vector<std::pair<int, int>>& cones = {},
                                             const std::vector<int>& loop_k = {},
                                             int excluded = 0) {
  seamless::HolonomySignature sig;
  sig.k_vertex.assign(mesh.n_vertices(), 4);
  for (auto [v, k] : cones) sig.k_vertex[v] = k;
  sig.excluded_vertex = excluded;
  sig.k_loop = loop_k;
  if (sig.k_loop.empty() && mesh.genus() > 0) {
    const seamless::SolverState probe = seamless::make_state(mesh, metric, excluded);
    const seamless::AngleField angles = seamless::triangle_angles(probe.mesh, probe.metric);
    for (const auto& loop : probe.loops)
      sig.k_loop.push_back(
          static_cast<int>(std::lround(seamless::loop_curvature(angles, loop) / (M_PI / 2.0))));
  }
  return sig;
}

}  // namespace fixtures
