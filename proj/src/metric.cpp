#include "seamless/metric.hpp"

#include <algorithm>
#include <cmath>

#include "seamless/energy.hpp"

namespace seamless {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::array<double, 3> face_sides(double mu_i, double mu_j, double mu_k) {
  // normalize out the free per-triangle scale before exponentiating
  const double m = (mu_i + mu_j + mu_k) / 3.0;
  return {std::exp((mu_i - m) / 2.0), std::exp((mu_j - m) / 2.0), std::exp((mu_k - m) / 2.0)};
}

}  // namespace

std::array<double, 3> face_angles(double mu_i, double mu_j, double mu_k, bool degenerate_ok) {
  const auto l = face_sides(mu_i, mu_j, mu_k);
  const double p = (l[0] + l[1] + l[2]) / 2.0;
  std::array<double, 3> alpha;
  for (int t = 0; t < 3; ++t) {
    const double li = l[t], lj = l[(t + 1) % 3], lk = l[(t + 2) % 3];
    const double u = (p - lj) * (p - lk);
    const double v = p * (p - li);
    if (v < 0.0 || u < 0.0) {
      if (!degenerate_ok) throw TriangleInequalityViolatedError(-1, std::min(u, v));
      alpha[t] = v < 0.0 ? kPi : 0.0;
      continue;
    }
    alpha[t] = 2.0 * std::atan2(std::sqrt(u), std::sqrt(v));
  }
  return alpha;
}

std::vector<double> conformal_lengths(const EdgeMetric& metric, const ZeroForm& phi,
                                      const HalfedgeMesh& original, const CutMesh& cut) {
  const HalfedgeMesh& mc = cut.mesh;
  std::vector<double> len(mc.n_halfedges());
  for (int h = 0; h < mc.n_halfedges(); ++h) {
    const int orig = cut.halfedge_to_original[h];
    const double lg = metric.length[original.edge(orig)];
    len[h] = lg * std::exp((phi.value[mc.tail(h)] + phi.value[mc.head(h)]) / 2.0);
  }
  return len;
}

CornerMetric corner_mu(const HalfedgeMesh& mesh, const EdgeMetric& metric,
                       const ClosedOneForm& xi) {
  CornerMetric cm;
  cm.mu.resize(mesh.n_halfedges());
  const CornerField psi = psi_from_xi(mesh, xi);
  for (int h = 0; h < mesh.n_halfedges(); ++h)
    cm.mu[h] = metric.log_length(mesh.edge(h)) + psi.value[h];
  return cm;
}

AngleField triangle_angles(const HalfedgeMesh& mesh, const CornerMetric& metric) {
  AngleField out;
  out.alpha.resize(mesh.n_halfedges());
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const int h = 3 * f;
    const double margin = triangle_margin(mesh, metric, f);
    if (margin < 0.0) throw TriangleInequalityViolatedError(f, margin);
    const auto a = face_angles(metric.mu[h], metric.mu[h + 1], metric.mu[h + 2], true);
    out.alpha[h] = a[0];
    out.alpha[h + 1] = a[1];
    out.alpha[h + 2] = a[2];
  }
  return out;
}

double face_margin(double mu_i, double mu_j, double mu_k) {
  const auto l = face_sides(mu_i, mu_j, mu_k);
  const double perimeter = l[0] + l[1] + l[2];
  double m = perimeter;
  for (int t = 0; t < 3; ++t) m = std::min(m, perimeter - 2.0 * l[t]);
  return m / perimeter;
}

double triangle_margin(const HalfedgeMesh& mesh, const CornerMetric& metric, int face) {
  const int h = 3 * face;
  return face_margin(metric.mu[h], metric.mu[h + 1], metric.mu[h + 2]);
}

double loop_curvature(const AngleField& angles, const DualCycle& loop) {
  double kappa = 0.0;
  for (int m = 0; m < loop.length(); ++m)
    kappa += loop.signs[m] * angles.alpha[loop.pivot_halfedges[m]];
  return kappa;
}

CurvatureState curvatures(const HalfedgeMesh& mesh, const AngleField& angles,
                          const std::vector<DualCycle>& loops) {
  CurvatureState cs;
  cs.theta.assign(mesh.n_vertices(), 0.0);
  for (int h = 0; h < mesh.n_halfedges(); ++h)
    cs.theta[mesh.corner_vertex(h)] += angles.alpha[h];
  cs.kappa.reserve(loops.size());
  for (const auto& loop : loops) cs.kappa.push_back(loop_curvature(angles, loop));
  return cs;
}

void intrinsic_flip(HalfedgeMesh& mesh, CornerMetric& metric, int edge) {
  const int h = mesh.halfedge_of_edge(edge);
  const int hb = mesh.sibling(h);
  if (hb < 0) throw MetricError("cannot flip a boundary edge");
  const int a = mesh.next(h), b = mesh.prev(h);
  const int c = mesh.next(hb), d = mesh.prev(hb);
  const int f0 = mesh.face(h), f1 = mesh.face(hb);

  // joint planar chart: A=(0,0), B=(L,0); C above, D below
  const double L = std::exp(metric.mu[h] / 2.0);
  const double la = std::exp(metric.mu[a] / 2.0);
  const double lb = std::exp(metric.mu[b] / 2.0);
  const double scale = L / std::exp(metric.mu[hb] / 2.0);
  const double lc = scale * std::exp(metric.mu[c] / 2.0);
  const double ld = scale * std::exp(metric.mu[d] / 2.0);

  const double cx = (L * L + lb * lb - la * la) / (2.0 * L);
  const double cy = std::sqrt(std::max(0.0, lb * lb - cx * cx));
  const double dx = (L * L + lc * lc - ld * ld) / (2.0 * L);
  const double dy = -std::sqrt(std::max(0.0, lc * lc - dx * dx));

  const double diag = std::hypot(cx - dx, cy - dy);
  if (!(diag > 0.0) || diag < 1e-14 * (L + la + lb + lc + ld))
    throw ZeroLengthDiagonalError("flip of edge " + std::to_string(edge) +
                                  " produces a zero-length diagonal");
  if (cy - dy > 0.0) {
    const double t = cy / (cy - dy);
    const double x_cross = cx + t * (dx - cx);
    if (!(x_cross > 0.0) || !(x_cross < L))
      throw FlipBlockedError("new diagonal of edge " + std::to_string(edge) +
                             " lies outside the quad");
  } else {
    throw ZeroLengthDiagonalError("both triangles at edge " + std::to_string(edge) +
                                  " are degenerate");
  }

  const double lAD = std::hypot(dx, dy);
  const double lDB = std::hypot(L - dx, dy);
  const double lBC = std::hypot(L - cx, cy);
  const double lCA = std::hypot(cx, cy);

  const double energy_before =
      triangle_energy(metric.mu[h], metric.mu[a], metric.mu[b]).value +
      triangle_energy(metric.mu[hb], metric.mu[c], metric.mu[d]).value;

  mesh.flip_ccw(h);

  // slot layout after flip_ccw: f0 = (A->D, D->C, C->A), f1 = (B->C, C->D, D->B)
  const int s0 = 3 * f0, s1 = 3 * f1;
  metric.mu[s0] = 2.0 * std::log(lAD);
  metric.mu[s0 + 1] = 2.0 * std::log(diag);
  metric.mu[s0 + 2] = 2.0 * std::log(lCA);
  metric.mu[s1] = 2.0 * std::log(lBC);
  metric.mu[s1 + 1] = 2.0 * std::log(diag);
  metric.mu[s1 + 2] = 2.0 * std::log(lDB);

  // the chart fixes each new triangle's similarity class but leaves the log
  // scale representative free; pick the common constant that keeps the
  // quad's energy contribution unchanged (angle sums are pi, so a shift of
  // eps on both triangles changes the energy by pi*eps)
  const double energy_after =
      triangle_energy(metric.mu[s0], metric.mu[s0 + 1], metric.mu[s0 + 2]).value +
      triangle_energy(metric.mu[s1], metric.mu[s1 + 1], metric.mu[s1 + 2]).value;
  const double shift = (energy_before - energy_after) / kPi;
  for (int k = 0; k < 3; ++k) {
    metric.mu[s0 + k] += shift;
    metric.mu[s1 + k] += shift;
  }
}

void repair_dual_loops(const HalfedgeMesh& mesh_before, const HalfedgeMesh& mesh,
                       std::vector<DualCycle>& loops, int flipped_edge) {
  const int diag0 = mesh.halfedge_of_edge(flipped_edge);
  const int diag1 = mesh.sibling(diag0);
  const int f0 = mesh.face(diag0);
  const int f1 = mesh.face(diag1);
  auto in_quad = [&](int h) {
    const int f = h / 3;
    return f == f0 || f == f1;
  };

  for (auto& loop : loops) {
    const int n = loop.length();
    bool touched = false;
    for (int i = 0; i < n; ++i) touched |= in_quad(loop.entry_halfedges[i]);
    if (!touched) continue;

    // split the cyclic entry list into outside entries and quad passages
    int start = 0;
    while (start < n && in_quad(loop.entry_halfedges[start])) ++start;
    if (start == n)
      throw LoopThroughDegenerateQuadError("dual loop lies entirely inside a flipped quad");

    std::vector<int> rebuilt;
    rebuilt.reserve(n + 2);
    for (int step = 0; step < n; ++step) {
      const int idx = (start + step) % n;
      const int entry = loop.entry_halfedges[idx];
      if (!in_quad(entry)) {
        rebuilt.push_back(entry);
        continue;
      }
      // consume the whole passage [entry .. last in-quad element]; edge ids
      // survive the flip, halfedge ids inside the quad do not
      const int edge_in = mesh_before.edge(entry);
      int j = step;
      while (j < n && in_quad(loop.entry_halfedges[(start + j) % n])) ++j;
      const int next_outside = loop.entry_halfedges[(start + j) % n];
      const int edge_out = mesh.edge(next_outside);
      step = j - 1;

      const int prev_outside = rebuilt.empty() ? loop.entry_halfedges[start] : rebuilt.back();
      // entry halfedge into the quad: on edge_in, sibling in the previous
      // (outside) triangle
      int q1 = -1;
      for (int cand : {mesh.halfedge_of_edge(edge_in), mesh.sibling(mesh.halfedge_of_edge(edge_in))}) {
        if (cand >= 0 && in_quad(cand) && mesh.sibling(cand) >= 0 &&
            mesh.face(mesh.sibling(cand)) == mesh.face(prev_outside))
          q1 = cand;
      }
      if (q1 < 0)
        throw LoopThroughDegenerateQuadError("cannot reattach dual loop at flipped quad");
      const int fq = mesh.face(q1);
      const bool exit_here = mesh.edge(mesh.next(q1)) == edge_out || mesh.edge(mesh.prev(q1)) == edge_out;
      if (exit_here) {
        rebuilt.push_back(q1);
      } else {
        const int diag_entry = (fq == f0) ? diag1 : diag0;
        const int fq2 = mesh.face(diag_entry);
        bool ok = false;
        for (int k = 0; k < 3; ++k) ok |= mesh.edge(3 * fq2 + k) == edge_out;
        if (!ok)
          throw LoopThroughDegenerateQuadError("dual loop exit edge missing after flip");
        rebuilt.push_back(q1);
        rebuilt.push_back(diag_entry);
      }
    }
    loop.entry_halfedges = std::move(rebuilt);
    loop.rebuild(mesh);
  }
}

}  // namespace seamless
