#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "seamless/layout.hpp"

using namespace seamless;

namespace {

constexpr double kPi = 3.14159265358979323846;

using Complex = std::complex<double>;

double corner_angle(const PlanarLayout& lay, int h) {
  const HalfedgeMesh& m = lay.cut.mesh;
  const Complex p = lay.position[m.head(m.next(h))];
  const Complex u = lay.position[m.tail(h)] - p;
  const Complex v = lay.position[m.head(h)] - p;
  return std::abs(std::arg(u / v));
}

std::vector<int> irregular_vertices(const HolonomySignature& sig) {
  std::vector<int> out;
  for (size_t r = 0; r < sig.k_vertex.size(); ++r)
    if (sig.k_vertex[r] != 4) out.push_back(static_cast<int>(r));
  return out;
}

}  // namespace

TEST_CASE("root triangle is placed canonically") {
  const auto tor = fixtures::torus();
  const HolonomySignature sig = fixtures::signature(tor.mesh, tor.metric);
  const SolveResult res = solve(tor.mesh, tor.metric, sig);
  REQUIRE(res.status == SolveStatus::converged);

  const CutMesh cut = cut_to_disk(res.state.mesh, build_cut_graph(res.state.mesh, {}));
  const PlanarLayout lay = layout(res.state.metric, cut);

  const HalfedgeMesh& m = lay.cut.mesh;
  CHECK(std::abs(lay.position[m.tail(0)]) < 1e-15);
  CHECK(lay.position[m.head(0)].real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(lay.position[m.head(0)].imag()) < 1e-15);
  // flat unit metric: the root triangle is equilateral
  const Complex c = lay.position[m.head(m.next(0))];
  CHECK(c.real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c.imag() == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
  CHECK(lay.consistency_residual < 1e-9);
}

TEST_CASE("layout angles match the metric angles for any cut") {
  const auto ico = fixtures::icosphere(2);
  std::vector<std::pair<int, int>> cones;
  for (int v = 0; v < 8; ++v) cones.emplace_back(v, 3);
  const HolonomySignature sig = fixtures::signature(ico.mesh, ico.metric, cones);
  const SolveResult res = solve(ico.mesh, ico.metric, sig);
  REQUIRE(res.status == SolveStatus::converged);

  const AngleField angles = triangle_angles(res.state.mesh, res.state.metric);
  const std::vector<std::vector<int>> cut_seeds = {irregular_vertices(sig),
                                                   {0, 1, 2, 3, 4, 5, 6, 7, 30, 60}};
  for (const auto& seeds : cut_seeds) {
    const CutMesh cut = cut_to_disk(res.state.mesh, build_cut_graph(res.state.mesh, seeds));
    const PlanarLayout lay = layout(res.state.metric, cut);
    CHECK(lay.consistency_residual < 1e-9);
    for (int h = 0; h < lay.cut.mesh.n_halfedges(); ++h)
      CHECK(std::abs(corner_angle(lay, h) - angles.alpha[h]) < 1e-9);
  }
}

TEST_CASE("integrated scale factors reproduce the layout up to global scale") {
  const auto tor = fixtures::torus();
  HolonomySignature sig = fixtures::signature(tor.mesh, tor.metric);
  sig.k_loop[0] += 1;
  const SolveResult res = solve(tor.mesh, tor.metric, sig);
  REQUIRE(res.status == SolveStatus::converged);
  REQUIRE(res.state.flips == 0);  // xi stays on the input connectivity

  const CutMesh cut = cut_to_disk(res.state.mesh, build_cut_graph(res.state.mesh, {}));
  const ZeroForm phi = integrate(res.state.xi, cut, 0);
  const std::vector<double> len = conformal_lengths(tor.metric, phi, res.state.mesh, cut);

  const PlanarLayout via_mu = layout(res.state.metric, cut);
  const PlanarLayout via_phi = layout_via_phi(len, cut);
  CHECK(via_phi.consistency_residual < 1e-9);

  const double s = len[0] / std::exp(res.state.metric.mu[0] / 2.0);
  for (size_t v = 0; v < via_mu.position.size(); ++v)
    CHECK(std::abs(via_phi.position[v] - s * via_mu.position[v]) < 1e-8 * (1.0 + std::abs(s)));
}

TEST_CASE("cut transforms are mutually inverse quarter turns on the tetrahedron") {
  const auto tet = fixtures::tetra();
  HolonomySignature sig;
  sig.k_vertex = {2, 2, 2, 2};
  const SolveResult res = solve(tet.mesh, tet.metric, sig);
  REQUIRE(res.status == SolveStatus::converged);

  const CutMesh cut = cut_to_disk(res.state.mesh, build_cut_graph(res.state.mesh, {0, 1, 2, 3}));
  const PlanarLayout lay = layout(res.state.metric, cut);
  const auto transforms = fit_cut_transforms(lay, res.state.mesh);
  REQUIRE(!transforms.empty());

  std::vector<int> index_of(res.state.mesh.n_halfedges(), -1);
  for (size_t i = 0; i < transforms.size(); ++i)
    index_of[transforms[i].halfedge] = static_cast<int>(i);

  for (const auto& ct : transforms) {
    CHECK(std::abs(std::remainder(ct.sigma.rotation(), kPi / 2.0)) < 1e-8);
    const int j = index_of[ct.partner];
    REQUIRE(j >= 0);
    const SimilarityTransform round_trip = ct.sigma.then(transforms[j].sigma);
    CHECK(std::abs(round_trip.a - 1.0) < 1e-10);
    CHECK(std::abs(round_trip.b) < 1e-10);
  }
}

TEST_CASE("verify_seamless passes a converged cone placement") {
  const auto ico = fixtures::icosphere(2);
  std::vector<std::pair<int, int>> cones;
  for (int v = 0; v < 8; ++v) cones.emplace_back(v, 3);
  const HolonomySignature sig = fixtures::signature(ico.mesh, ico.metric, cones);
  const SolveResult res = solve(ico.mesh, ico.metric, sig);
  REQUIRE(res.status == SolveStatus::converged);

  const CutMesh cut =
      cut_to_disk(res.state.mesh, build_cut_graph(res.state.mesh, irregular_vertices(sig)));
  const PlanarLayout lay = layout(res.state.metric, cut);
  const auto transforms = fit_cut_transforms(lay, res.state.mesh);
  const AngleField angles = triangle_angles(res.state.mesh, res.state.metric);

  const SeamlessReport report =
      verify_seamless(transforms, lay, res.state.mesh, angles, res.state.loops, sig);
  CHECK(report.max_quarter_turn_residual < 1e-8);
  CHECK(report.max_cycle_residual < 1e-8);
  CHECK(report.max_signature_deviation < 1e-8);
  CHECK(report.signature_matches);
  for (int r = 0; r < res.state.mesh.n_vertices(); ++r)
    CHECK(report.achieved_k_vertex[r] == sig.k_vertex[r]);
}

TEST_CASE("verify_seamless checks loop holonomy on the torus") {
  const auto tor = fixtures::torus();
  HolonomySignature sig = fixtures::signature(tor.mesh, tor.metric);
  sig.k_loop[0] += 1;
  sig.k_loop[1] -= 1;
  const SolveResult res = solve(tor.mesh, tor.metric, sig);
  REQUIRE(res.status == SolveStatus::converged);

  const CutMesh cut = cut_to_disk(res.state.mesh, build_cut_graph(res.state.mesh, {}));
  const PlanarLayout lay = layout(res.state.metric, cut);
  const auto transforms = fit_cut_transforms(lay, res.state.mesh);
  const AngleField angles = triangle_angles(res.state.mesh, res.state.metric);

  SeamlessReport report =
      verify_seamless(transforms, lay, res.state.mesh, angles, res.state.loops, sig);
  CHECK(report.max_quarter_turn_residual < 1e-8);
  CHECK(report.max_cycle_residual < 1e-8);
  CHECK(report.signature_matches);
  for (size_t s = 0; s < res.state.loops.size(); ++s)
    CHECK(report.achieved_k_loop[s] == sig.k_loop[s]);

  // a wrong expected signature is reported as a mismatch, not an error
  HolonomySignature wrong = sig;
  wrong.k_vertex[2] = 5;
  report = verify_seamless(transforms, lay, res.state.mesh, angles, res.state.loops, wrong);
  CHECK(!report.signature_matches);
}

TEST_CASE("a tampered transform fails the quarter-turn check") {
  const auto tor = fixtures::torus();
  const HolonomySignature sig = fixtures::signature(tor.mesh, tor.metric);
  const SolveResult res = solve(tor.mesh, tor.metric, sig);
  REQUIRE(res.status == SolveStatus::converged);

  const CutMesh cut = cut_to_disk(res.state.mesh, build_cut_graph(res.state.mesh, {}));
  const PlanarLayout lay = layout(res.state.metric, cut);
  auto transforms = fit_cut_transforms(lay, res.state.mesh);
  const AngleField angles = triangle_angles(res.state.mesh, res.state.metric);

  transforms[0].sigma.a *= std::polar(1.0, 0.3);
  const SeamlessReport report =
      verify_seamless(transforms, lay, res.state.mesh, angles, res.state.loops, sig);
  CHECK(report.max_quarter_turn_residual > 0.29);
}

TEST_CASE("non-flat metrics are rejected before placement") {
  const auto tor = fixtures::torus();
  SolverState st = make_state(tor.mesh, tor.metric, 0);
  std::mt19937 rng(41);
  fixtures::randomize_state(st, rng);

  const CutMesh cut = cut_to_disk(st.mesh, build_cut_graph(st.mesh, {}));
  CHECK_THROWS_AS(layout(st.metric, cut), NotFlatError);
}

TEST_CASE("zero-length cut edge images are rejected") {
  const auto tor = fixtures::torus();
  const HolonomySignature sig = fixtures::signature(tor.mesh, tor.metric);
  const SolveResult res = solve(tor.mesh, tor.metric, sig);
  REQUIRE(res.status == SolveStatus::converged);

  const CutMesh cut = cut_to_disk(res.state.mesh, build_cut_graph(res.state.mesh, {}));
  PlanarLayout lay = layout(res.state.metric, cut);
  int boundary = -1;
  for (int h = 0; h < lay.cut.mesh.n_halfedges() && boundary < 0; ++h)
    if (lay.cut.mesh.sibling(h) < 0) boundary = h;
  REQUIRE(boundary >= 0);
  lay.position[lay.cut.mesh.head(boundary)] = lay.position[lay.cut.mesh.tail(boundary)];
  CHECK_THROWS_AS(fit_cut_transforms(lay, res.state.mesh), DegenerateEdgeImageError);
}
