#include "seamless/layout.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace seamless {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kQuarter = kPi / 2.0;

using Complex = std::complex<double>;

double distance_to_multiple(double angle, double period) {
  const double r = std::remainder(angle, period);
  return std::abs(r);
}

std::array<double, 3> local_angles(const std::vector<double>& len, int face) {
  const int h = 3 * face;
  return face_angles(2.0 * std::log(len[h]), 2.0 * std::log(len[h + 1]),
                     2.0 * std::log(len[h + 2]), true);
}

PlanarLayout layout_core(const std::vector<double>& len, const CutMesh& cut) {
  const HalfedgeMesh& m = cut.mesh;
  const int nv = m.n_vertices();

  // the metric must be flat at interior vertices for a single-chart layout
  std::vector<double> theta(nv, 0.0);
  std::vector<char> on_boundary(nv, 0);
  for (int h = 0; h < m.n_halfedges(); ++h) {
    if (m.sibling(h) < 0) {
      on_boundary[m.tail(h)] = 1;
      on_boundary[m.head(h)] = 1;
    }
  }
  for (int f = 0; f < m.n_faces(); ++f) {
    const auto a = local_angles(len, f);
    for (int t = 0; t < 3; ++t) theta[m.corner_vertex(3 * f + t)] += a[t];
  }
  for (int v = 0; v < nv; ++v) {
    if (!on_boundary[v] && std::abs(theta[v] - 2.0 * kPi) > 1e-8)
      throw NotFlatError("interior vertex " + std::to_string(v) + " has angle sum " +
                         std::to_string(theta[v]) + ", metric is not flat");
  }

  PlanarLayout out;
  out.cut = cut;
  out.position.assign(nv, Complex(0.0, 0.0));

  // Propagate each halfedge's global direction angle and each face's log
  // scale additively over the dual spanning tree, then integrate positions
  // along a vertex tree. Deriving positions from already-placed vertex
  // pairs instead would amplify roundoff exponentially in the tree depth.
  const int nh = m.n_halfedges();
  std::vector<double> direction(nh, 0.0);
  std::vector<double> log_scale(m.n_faces(), 0.0);
  std::vector<char> face_seen(m.n_faces(), 0);

  // directions of the remaining two sides from the entry side's direction:
  // at each corner the path turns by the exterior angle
  auto fill_face = [&](int h) {
    const int f = m.face(h);
    const auto ang = local_angles(len, f);
    int x = h;
    for (int step = 0; step < 2; ++step) {
      const int nx = m.next(x);
      const double interior = ang[m.prev(x) - 3 * f];  // angle at head(x)
      direction[nx] = std::remainder(direction[x] + kPi - interior, 2.0 * kPi);
      x = nx;
    }
    face_seen[f] = 1;
  };

  fill_face(0);
  std::deque<int> queue{0};
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop_front();
    for (int t = 0; t < 3; ++t) {
      const int h = 3 * f + t;
      const int s = m.sibling(h);
      if (s < 0 || face_seen[m.face(s)]) continue;
      direction[s] = std::remainder(direction[h] + kPi, 2.0 * kPi);
      log_scale[m.face(s)] = log_scale[f] + std::log(len[h]) - std::log(len[s]);
      fill_face(s);
      queue.push_back(m.face(s));
    }
  }

  auto edge_vector = [&](int h) {
    return std::polar(len[h] * std::exp(log_scale[m.face(h)]), direction[h]);
  };

  std::vector<char> vertex_placed(nv, 0);
  vertex_placed[m.tail(0)] = 1;
  std::deque<int> vqueue{m.tail(0)};
  std::vector<std::vector<int>> outgoing(nv);
  for (int h = 0; h < nh; ++h) outgoing[m.tail(h)].push_back(h);
  while (!vqueue.empty()) {
    const int v = vqueue.front();
    vqueue.pop_front();
    for (int h : outgoing[v]) {
      const int w = m.head(h);
      if (vertex_placed[w]) continue;
      out.position[w] = out.position[v] + edge_vector(h);
      vertex_placed[w] = 1;
      vqueue.push_back(w);
    }
  }

  // every halfedge, tree or not, must connect its endpoint images
  for (int h = 0; h < nh; ++h) {
    const Complex vec = edge_vector(h);
    const double rel = std::abs(out.position[m.head(h)] - out.position[m.tail(h)] - vec) /
                       std::max(1e-300, std::abs(vec));
    out.consistency_residual = std::max(out.consistency_residual, rel);
  }

  for (int f = 0; f < m.n_faces(); ++f) {
    const Complex a = out.position[m.tail(3 * f)];
    const Complex b = out.position[m.head(3 * f)];
    const Complex c = out.position[m.head(3 * f + 1)];
    const double area2 = std::imag(std::conj(b - a) * (c - a));
    if (area2 < 0.0)
      throw FoldOverError("triangle " + std::to_string(f) + " maps with negative area");
  }
  return out;
}

}  // namespace

PlanarLayout layout(const CornerMetric& metric, const CutMesh& cut) {
  std::vector<double> len(cut.mesh.n_halfedges());
  for (int h = 0; h < cut.mesh.n_halfedges(); ++h)
    len[h] = std::exp(metric.mu[cut.halfedge_to_original[h]] / 2.0);
  return layout_core(len, cut);
}

PlanarLayout layout_via_phi(const std::vector<double>& lengths, const CutMesh& cut) {
  return layout_core(lengths, cut);
}

std::vector<CutTransform> fit_cut_transforms(const PlanarLayout& layout,
                                             const HalfedgeMesh& original) {
  const HalfedgeMesh& m = layout.cut.mesh;
  double scale = 0.0;
  for (const auto& p : layout.position) scale = std::max(scale, std::abs(p));
  scale = std::max(scale, 1e-300);

  std::vector<CutTransform> out;
  for (int h = 0; h < m.n_halfedges(); ++h) {
    if (m.sibling(h) >= 0) continue;
    CutTransform ct;
    ct.halfedge = h;
    ct.partner = original.sibling(layout.cut.halfedge_to_original[h]);
    ct.original_edge = original.edge(layout.cut.halfedge_to_original[h]);
    const Complex p1 = layout.position[m.tail(h)];
    const Complex p2 = layout.position[m.head(h)];
    const Complex q1 = layout.position[m.head(ct.partner)];
    const Complex q2 = layout.position[m.tail(ct.partner)];
    if (std::abs(p2 - p1) < 1e-14 * scale)
      throw DegenerateEdgeImageError("cut halfedge " + std::to_string(h) +
                                     " has a zero-length image");
    ct.sigma.a = (q2 - q1) / (p2 - p1);
    ct.sigma.b = q1 - ct.sigma.a * p1;
    out.push_back(ct);
  }
  return out;
}

SeamlessReport verify_seamless(const std::vector<CutTransform>& transforms,
                               const PlanarLayout& layout, const HalfedgeMesh& original,
                               const AngleField& angles, const std::vector<DualCycle>& loops,
                               const HolonomySignature& sig) {
  SeamlessReport report;
  const HalfedgeMesh& m = layout.cut.mesh;
  double scale = 0.0;
  for (const auto& p : layout.position) scale = std::max(scale, std::abs(p));
  scale = std::max(scale, 1e-300);

  std::vector<int> transform_of(m.n_halfedges(), -1);
  for (size_t i = 0; i < transforms.size(); ++i) transform_of[transforms[i].halfedge] = static_cast<int>(i);

  report.quarter_turn_residual.reserve(transforms.size());
  for (const auto& ct : transforms) {
    const double r = distance_to_multiple(ct.sigma.rotation(), kQuarter);
    report.quarter_turn_residual.push_back(r);
    report.max_quarter_turn_residual = std::max(report.max_quarter_turn_residual, r);
  }

  // cycle condition around regular vertices on the cut
  std::vector<char> on_cut(original.n_vertices(), 0);
  for (const auto& ct : transforms) {
    on_cut[original.tail(ct.halfedge)] = 1;
    on_cut[original.head(ct.halfedge)] = 1;
  }
  for (int r = 0; r < original.n_vertices(); ++r) {
    if (!on_cut[r] || sig.k_vertex[r] != 4) continue;
    SimilarityTransform composed;
    const int h0 = original.out_halfedge(r);
    int h = h0;
    do {
      const int crossing = original.prev(h);
      if (m.sibling(crossing) < 0) {
        const int idx = transform_of[crossing];
        if (idx >= 0) composed = composed.then(transforms[idx].sigma);
      }
      h = original.sibling(crossing);
    } while (h != h0);
    report.cycle_vertices.push_back(r);
    report.cycle_rotation_residual.push_back(distance_to_multiple(composed.rotation(), 2.0 * kPi));
    report.cycle_scale_residual.push_back(std::abs(composed.log_scale()));
    report.cycle_translation_residual.push_back(std::abs(composed.b) / scale);
    report.max_cycle_residual =
        std::max({report.max_cycle_residual, report.cycle_rotation_residual.back(),
                  report.cycle_scale_residual.back(), report.cycle_translation_residual.back()});
  }

  // achieved signature from the final angles
  std::vector<double> theta(original.n_vertices(), 0.0);
  for (int h = 0; h < original.n_halfedges(); ++h)
    theta[original.corner_vertex(h)] += angles.alpha[h];
  report.achieved_k_vertex.resize(original.n_vertices());
  report.signature_matches = true;
  for (int r = 0; r < original.n_vertices(); ++r) {
    const double k = theta[r] / kQuarter;
    report.achieved_k_vertex[r] = static_cast<int>(std::lround(k));
    report.max_signature_deviation =
        std::max(report.max_signature_deviation, std::abs(k - report.achieved_k_vertex[r]));
    if (report.achieved_k_vertex[r] != sig.k_vertex[r]) report.signature_matches = false;
  }
  report.achieved_k_loop.resize(loops.size());
  for (size_t s = 0; s < loops.size(); ++s) {
    const double k = loop_curvature(angles, loops[s]) / kQuarter;
    report.achieved_k_loop[s] = static_cast<int>(std::lround(k));
    report.max_signature_deviation =
        std::max(report.max_signature_deviation, std::abs(k - report.achieved_k_loop[s]));
    if (report.achieved_k_loop[s] != sig.k_loop[s]) report.signature_matches = false;
  }
  return report;
}

}  // namespace seamless
