#pragma once

#include <vector>

#include "seamless/forms.hpp"
#include "seamless/mesh.hpp"

namespace seamless {

struct MetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TriangleInequalityViolatedError : MetricError {
  int face;
  double margin;
  TriangleInequalityViolatedError(int f, double m)
      : MetricError("triangle inequality violated in face " + std::to_string(f) +
                    " (margin " + std::to_string(m) + ")"),
        face(f),
        margin(m) {}
};
struct FlipBlockedError : MetricError {
  using MetricError::MetricError;
};
struct ZeroLengthDiagonalError : MetricError {
  using MetricError::MetricError;
};
struct LoopThroughDegenerateQuadError : MetricError {
  using MetricError::MetricError;
};

/// Discrete metric on M: one positive length per edge.
struct EdgeMetric {
  std::vector<double> length;
  double log_length(int e) const { return 2.0 * std::log(length[e]); }
};

/// Per-halfedge log lengths mu (lambda convention, side = e^{mu/2}). Each
/// triangle's three values fix its similarity class; no consistency across
/// triangles is required, which keeps the representation valid without a
/// cut and across intrinsic flips.
struct CornerMetric {
  std::vector<double> mu;
};

/// Per-halfedge angle opposite that halfedge.
struct AngleField {
  std::vector<double> alpha;
};

/// Vertex angle sums and dual-loop geodesic curvatures.
struct CurvatureState {
  std::vector<double> theta;
  std::vector<double> kappa;
};

/// Edge lengths on the cut mesh under the conformal scale phi:
/// l = l^G e^{(phi_v + phi_w)/2}, one value per cut-mesh halfedge.
std::vector<double> conformal_lengths(const EdgeMetric& metric, const ZeroForm& phi,
                                      const HalfedgeMesh& original, const CutMesh& cut);

/// mu_i = lambda^G_i + psi_i; depends on the 1-form only, not on a cut.
CornerMetric corner_mu(const HalfedgeMesh& mesh, const EdgeMetric& metric,
                       const ClosedOneForm& xi);

/// Angles per halfedge via the half-angle arctangent form, stable near
/// degenerate triangles.
AngleField triangle_angles(const HalfedgeMesh& mesh, const CornerMetric& metric);

/// Angles for one triangle given its three log lengths.
/// degenerate_ok permits zero margins (angles 0 and pi) without throwing.
std::array<double, 3> face_angles(double mu_i, double mu_j, double mu_k,
                                  bool degenerate_ok = false);

/// min over sides of (sum of other two - this one) / perimeter.
double face_margin(double mu_i, double mu_j, double mu_k);
double triangle_margin(const HalfedgeMesh& mesh, const CornerMetric& metric, int face);

CurvatureState curvatures(const HalfedgeMesh& mesh, const AngleField& angles,
                          const std::vector<DualCycle>& loops);

/// Total geodesic curvature of one dual cycle.
double loop_curvature(const AngleField& angles, const DualCycle& loop);

/// Intrinsic edge flip: the two triangles at the edge are laid out jointly
/// in the plane (scales matched along the shared edge), the diagonal is
/// swapped, and the new mu values are read off the chart. A common constant
/// is added per quad so that the quad's energy contribution (module
/// energy-solver) is unchanged; angles, curvatures and margins do not
/// depend on that constant. Mutates mesh connectivity and metric.
void intrinsic_flip(HalfedgeMesh& mesh, CornerMetric& metric, int edge);

/// Reroutes dual cycles through the quad of a just-flipped edge so that
/// entry/exit edges are preserved; curvature is unchanged. Needs the
/// pre-flip connectivity to resolve the edges the old strip crossed.
void repair_dual_loops(const HalfedgeMesh& mesh_before, const HalfedgeMesh& mesh_after,
                       std::vector<DualCycle>& loops, int flipped_edge);

}  // namespace seamless
