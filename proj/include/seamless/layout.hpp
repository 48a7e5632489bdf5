#pragma once

#include <complex>
#include <vector>

#include "seamless/energy.hpp"
#include "seamless/mesh.hpp"
#include "seamless/metric.hpp"

namespace seamless {

struct LayoutError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotFlatError : LayoutError {
  using LayoutError::LayoutError;
};
struct FoldOverError : LayoutError {
  using LayoutError::LayoutError;
};
struct DegenerateEdgeImageError : LayoutError {
  using LayoutError::LayoutError;
};

/// Planar image of the cut disk: one position per cut-mesh vertex, root
/// triangle in canonical placement (first vertex at the origin, first edge
/// on the positive x axis).
struct PlanarLayout {
  CutMesh cut;
  std::vector<std::complex<double>> position;
  /// worst relative mismatch across interior non-tree edges
  double consistency_residual = 0.0;
};

/// sigma(x) = s R x + t, stored as the complex pair z -> a z + b.
struct SimilarityTransform {
  std::complex<double> a{1.0, 0.0};
  std::complex<double> b{0.0, 0.0};
  double scale() const { return std::abs(a); }
  double log_scale() const { return std::log(std::abs(a)); }
  double rotation() const { return std::arg(a); }
  std::complex<double> operator()(std::complex<double> z) const { return a * z + b; }
  SimilarityTransform then(const SimilarityTransform& outer) const {
    return {outer.a * a, outer.a * b + outer.b};
  }
};

/// Transition across one cut edge: maps the image of `halfedge`'s side onto
/// the image of `partner`'s side. Each cut edge yields two mutually inverse
/// records.
struct CutTransform {
  int halfedge = -1;  // cut-mesh boundary halfedge, source side
  int partner = -1;
  int original_edge = -1;
  SimilarityTransform sigma;
};

struct SeamlessReport {
  std::vector<double> quarter_turn_residual;   // per CutTransform
  std::vector<int> cycle_vertices;             // regular cut vertices checked
  std::vector<double> cycle_rotation_residual;  // per checked vertex
  std::vector<double> cycle_scale_residual;
  std::vector<double> cycle_translation_residual;
  std::vector<int> achieved_k_vertex;
  std::vector<int> achieved_k_loop;
  double max_quarter_turn_residual = 0.0;
  double max_cycle_residual = 0.0;
  double max_signature_deviation = 0.0;  // pre-rounding, in quarter turns
  bool signature_matches = false;
};

/// Lays out the cut disk from per-halfedge log lengths; each triangle is
/// scaled to match its already-placed neighbor across the dual spanning
/// tree, so only in-triangle ratios of mu matter.
PlanarLayout layout(const CornerMetric& metric, const CutMesh& cut);

/// Same propagation driven by explicit per-halfedge lengths (for example
/// phi-scaled edge lengths); cross-check path for cut independence.
PlanarLayout layout_via_phi(const std::vector<double>& lengths, const CutMesh& cut);

std::vector<CutTransform> fit_cut_transforms(const PlanarLayout& layout,
                                             const HalfedgeMesh& original);

SeamlessReport verify_seamless(const std::vector<CutTransform>& transforms,
                               const PlanarLayout& layout, const HalfedgeMesh& original,
                               const AngleField& angles, const std::vector<DualCycle>& loops,
                               const HolonomySignature& sig);

}  // namespace seamless
