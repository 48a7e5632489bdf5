#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "seamless/energy.hpp"
#include "seamless/io.hpp"
#include "seamless/layout.hpp"
#include "seamless/mesh.hpp"
#include "seamless/metric.hpp"

namespace {

using nlohmann::json;
using namespace seamless;

constexpr double kQuarter = 3.14159265358979323846 / 2.0;
constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitIO = 3;

struct SignatureSpec {
  int default_k = 4;
  std::vector<std::pair<int, int>> cones;  // vertex, k
  std::vector<std::pair<int, int>> loops;  // index, k
  int excluded_vertex = -1;
};

SignatureSpec read_signature(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SignatureError(std::string("invalid signature JSON: ") + e.what());
  }
  SignatureSpec spec;
  spec.default_k = j.value("default_k", 4);
  if (j.contains("excluded_vertex")) spec.excluded_vertex = j["excluded_vertex"].get<int>();
  for (const auto& c : j.value("cones", json::array()))
    spec.cones.emplace_back(c.at("vertex").get<int>(), c.at("k").get<int>());
  for (const auto& l : j.value("loops", json::array()))
    spec.loops.emplace_back(l.at("index").get<int>(), l.at("k").get<int>());
  return spec;
}

HolonomySignature build_signature(const HalfedgeMesh& mesh, const EdgeMetric& metric,
                                  const SignatureSpec& spec, int excluded_override) {
  HolonomySignature sig;
  sig.k_vertex.assign(mesh.n_vertices(), spec.default_k);
  for (const auto& [v, k] : spec.cones) {
    if (v < 0 || v >= mesh.n_vertices())
      throw SignatureError("cone vertex " + std::to_string(v) + " out of range");
    sig.k_vertex[v] = k;
  }
  sig.excluded_vertex = excluded_override >= 0 ? excluded_override
                        : spec.excluded_vertex >= 0 ? spec.excluded_vertex
                                                    : 0;

  // unlisted loops default to the nearest quarter turn of the input
  // metric's holonomy
  const SolverState probe = make_state(mesh, metric, sig.excluded_vertex);
  const AngleField angles = triangle_angles(probe.mesh, probe.metric);
  sig.k_loop.resize(probe.loops.size());
  for (size_t s = 0; s < probe.loops.size(); ++s)
    sig.k_loop[s] = static_cast<int>(std::lround(loop_curvature(angles, probe.loops[s]) / kQuarter));
  for (const auto& [idx, k] : spec.loops) {
    if (idx < 0 || idx >= static_cast<int>(sig.k_loop.size()))
      throw SignatureError("loop index " + std::to_string(idx) + " out of range, mesh has " +
                           std::to_string(sig.k_loop.size()) + " loops");
    sig.k_loop[idx] = k;
  }
  return sig;
}

std::string status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max-iterations";
    case SolveStatus::flip_budget: return "flip-budget";
    case SolveStatus::singular: return "singular";
  }
  return "unknown";
}

json loop_strips(const std::vector<DualCycle>& loops) {
  json out = json::array();
  for (const auto& loop : loops) out.push_back(loop.triangles);
  return out;
}

void write_trace(const std::filesystem::path& path, const std::vector<TraceRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw IOError("cannot write '" + path.string() + "'");
  out << "iteration,residual_inf,energy,step,flips\n";
  out.precision(17);
  for (const auto& rec : trace)
    out << rec.iteration << "," << rec.residual_inf << "," << rec.energy << "," << rec.step
        << "," << rec.flips << "\n";
}

int cmd_solve(const std::string& mesh_path, const std::string& sig_path,
              const std::string& out_path, const std::string& report_path,
              const SolveOptions& options, int excluded_override) {
  json report;
  const auto t0 = std::chrono::steady_clock::now();

  ObjData obj;
  try {
    obj = read_obj(mesh_path);
  } catch (const IOError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIO;
  }

  HolonomySignature sig;
  HalfedgeMesh mesh;
  EdgeMetric metric;
  try {
    mesh = HalfedgeMesh::from_faces(static_cast<int>(obj.vertices.size()), obj.faces);
    metric = edge_metric_from_positions(mesh, obj.vertices);
    sig = build_signature(mesh, metric, read_signature(sig_path), excluded_override);
    validate_signature(mesh, sig);
  } catch (const IOError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIO;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  const SolveResult result = solve(mesh, metric, sig, options);
  report["status"] = status_name(result.status);
  report["iterations"] = result.state.iterations;
  report["flips"] = result.state.flips;
  report["residual_inf"] = result.residual_inf;
  report["energy"] = result.energy;
  report["basis"] = {{"genus", mesh.genus()},
                     {"excluded_vertex", sig.excluded_vertex},
                     {"loops", loop_strips(result.state.loops)}};

  bool seamless_ok = false;
  if (result.status == SolveStatus::converged) {
    try {
      const HalfedgeMesh& final_mesh = result.state.mesh;
      std::vector<int> irregular;
      for (int r = 0; r < final_mesh.n_vertices(); ++r)
        if (sig.k_vertex[r] != 4) irregular.push_back(r);
      const CutGraph cut = build_cut_graph(final_mesh, irregular);
      const CutMesh cut_mesh = cut_to_disk(final_mesh, cut);
      const PlanarLayout lay = layout(result.state.metric, cut_mesh);
      const auto transforms = fit_cut_transforms(lay, final_mesh);
      const AngleField angles = triangle_angles(final_mesh, result.state.metric);
      const SeamlessReport sr =
          verify_seamless(transforms, lay, final_mesh, angles, result.state.loops, sig);
      report["seamless"] = {
          {"max_quarter_turn_residual", sr.max_quarter_turn_residual},
          {"max_cycle_residual", sr.max_cycle_residual},
          {"max_signature_deviation", sr.max_signature_deviation},
          {"signature_matches", sr.signature_matches},
          {"cut_edges", static_cast<int>(transforms.size()) / 2},
          {"layout_consistency_residual", lay.consistency_residual},
      };
      seamless_ok = sr.signature_matches && sr.max_quarter_turn_residual <= 1e-8 &&
                    sr.max_cycle_residual <= 1e-8;
      if (!out_path.empty()) write_obj(out_path, obj.vertices, lay);
    } catch (const IOError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitIO;
    } catch (const std::exception& e) {
      report["layout_error"] = e.what();
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  report["timing_ms"] = std::chrono::duration<double, std::milli>(t1 - t0).count();

  if (!report_path.empty()) {
    std::filesystem::path rp(report_path);
    std::ofstream out(rp);
    if (!out) {
      std::cerr << "error: cannot write '" << report_path << "'\n";
      return kExitIO;
    }
    out << report.dump(2) << "\n";
    try {
      write_trace(rp.parent_path() / "trace.csv", result.trace);
    } catch (const IOError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitIO;
    }
  }

  std::cout << "status: " << status_name(result.status) << ", iterations "
            << result.state.iterations << ", flips " << result.state.flips << ", |L|_inf "
            << result.residual_inf << "\n";
  return result.status == SolveStatus::converged && seamless_ok ? kExitOk : kExitNotConverged;
}

int cmd_verify(const std::string& mesh_path, const std::string& sig_path, double tol) {
  ObjData obj;
  try {
    obj = read_obj(mesh_path);
  } catch (const IOError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIO;
  }
  if (!obj.has_uvs()) {
    std::cerr << "error: '" << mesh_path << "' carries no texture coordinates\n";
    return kExitValidation;
  }

  try {
    // the OBJ is a cut mesh: glue wedges back by 3D vertex index
    HalfedgeMesh mesh =
        HalfedgeMesh::from_faces(static_cast<int>(obj.vertices.size()), obj.faces);
    const SignatureSpec spec = read_signature(sig_path);
    std::vector<int> k_vertex(mesh.n_vertices(), spec.default_k);
    for (const auto& [v, k] : spec.cones) k_vertex.at(v) = k;

    auto uv_at_tail = [&](int h) {
      const int f = h / 3;
      return std::complex<double>(obj.uvs[obj.face_uvs[f][h - 3 * f]][0],
                                  obj.uvs[obj.face_uvs[f][h - 3 * f]][1]);
    };
    auto uv_at_head = [&](int h) { return uv_at_tail(mesh.next(h)); };

    double scale = 0.0;
    for (const auto& uv : obj.uvs) scale = std::max(scale, std::hypot(uv[0], uv[1]));
    scale = std::max(scale, 1e-300);

    std::vector<char> is_cut(mesh.n_halfedges(), 0);
    std::vector<SimilarityTransform> sigma(mesh.n_halfedges());
    double max_quarter = 0.0;
    for (int h = 0; h < mesh.n_halfedges(); ++h) {
      const int s = mesh.sibling(h);
      const std::complex<double> p1 = uv_at_tail(h), p2 = uv_at_head(h);
      const std::complex<double> q1 = uv_at_head(s), q2 = uv_at_tail(s);
      if (std::abs(p1 - q1) <= 1e-12 * scale && std::abs(p2 - q2) <= 1e-12 * scale) continue;
      if (std::abs(p2 - p1) < 1e-14 * scale) throw IOError("zero-length edge image");
      is_cut[h] = 1;
      sigma[h].a = (q2 - q1) / (p2 - p1);
      sigma[h].b = q1 - sigma[h].a * p1;
      max_quarter = std::max(max_quarter, std::abs(std::remainder(sigma[h].rotation(), kQuarter)));
    }

    double max_cycle = 0.0;
    std::vector<double> theta(mesh.n_vertices(), 0.0);
    for (int h = 0; h < mesh.n_halfedges(); ++h) {
      const std::complex<double> a = uv_at_tail(h), b = uv_at_head(h), c = uv_at_head(mesh.next(h));
      theta[mesh.tail(h)] += std::abs(std::arg((c - a) / (b - a)));
    }
    double max_theta_dev = 0.0;
    for (int r = 0; r < mesh.n_vertices(); ++r) {
      max_theta_dev = std::max(max_theta_dev, std::abs(theta[r] - k_vertex[r] * kQuarter));
      bool on_cut = false;
      const int h0 = mesh.out_halfedge(r);
      int h = h0;
      do {
        if (is_cut[mesh.prev(h)]) on_cut = true;
        h = mesh.sibling(mesh.prev(h));
      } while (h != h0);
      if (!on_cut || k_vertex[r] != 4) continue;
      SimilarityTransform composed;
      h = h0;
      do {
        const int crossing = mesh.prev(h);
        if (is_cut[crossing]) composed = composed.then(sigma[crossing]);
        h = mesh.sibling(crossing);
      } while (h != h0);
      max_cycle = std::max({max_cycle, std::abs(std::remainder(composed.rotation(), 4 * kQuarter)),
                            std::abs(composed.log_scale()), std::abs(composed.b) / scale});
    }

    std::cout << "quarter-turn residual: " << max_quarter << "\n";
    std::cout << "cycle residual: " << max_cycle << "\n";
    std::cout << "angle-sum deviation: " << max_theta_dev << "\n";
    const bool ok = max_quarter <= tol && max_cycle <= tol && max_theta_dev <= tol;
    std::cout << (ok ? "seamless: yes" : "seamless: no") << "\n";
    return ok ? kExitOk : kExitNotConverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

int cmd_basis(const std::string& mesh_path, int excluded_override) {
  ObjData obj;
  try {
    obj = read_obj(mesh_path);
  } catch (const IOError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIO;
  }
  try {
    const HalfedgeMesh mesh =
        HalfedgeMesh::from_faces(static_cast<int>(obj.vertices.size()), obj.faces);
    const TreeCotree tct = tree_cotree(mesh);
    std::cout << "genus: " << mesh.genus() << "\n";
    std::cout << "excluded vertex: " << (excluded_override >= 0 ? excluded_override : 0) << "\n";
    std::cout << "loops: " << tct.leftover_edges.size() << "\n";
    int index = 0;
    for (int e : tct.leftover_edges) {
      const DualCycle loop = dual_loop(mesh, tct, e);
      std::cout << "loop " << index++ << " faces:";
      for (int f : loop.triangles) std::cout << " " << f;
      std::cout << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete conformal seamless similarity maps"};
  app.require_subcommand(1);

  std::string mesh_path, sig_path, out_path, report_path;
  SolveOptions options;
  int excluded_vertex = -1;
  long flip_budget = -1;
  int seed = 0;  // reserved for fixture generation, never used by the solver

  auto* solve_cmd = app.add_subcommand("solve", "solve for a seamless similarity map");
  solve_cmd->add_option("--mesh", mesh_path, "input OBJ")->required();
  solve_cmd->add_option("--signature", sig_path, "signature JSON")->required();
  solve_cmd->add_option("--out", out_path, "output OBJ with UVs");
  solve_cmd->add_option("--report", report_path, "report JSON (trace.csv written next to it)");
  solve_cmd->add_option("--tol", options.tol, "residual tolerance");
  solve_cmd->add_option("--max-iters", options.max_iters, "Newton iteration cap");
  solve_cmd->add_option("--flip-budget", flip_budget, "edge flip cap (default 100 |E|)");
  solve_cmd->add_option("--excluded-vertex", excluded_vertex, "vertex whose constraint is dropped");
  solve_cmd->add_option("--seed", seed, "fixture-generation seed");

  std::string verify_mesh, verify_sig;
  double verify_tol = 1e-8;
  auto* verify_cmd = app.add_subcommand("verify", "verify a parametrized OBJ");
  verify_cmd->add_option("--mesh", verify_mesh, "parametrized OBJ")->required();
  verify_cmd->add_option("--signature", verify_sig, "signature JSON")->required();
  verify_cmd->add_option("--tol", verify_tol, "residual tolerance");

  std::string basis_mesh;
  int basis_excluded = -1;
  auto* basis_cmd = app.add_subcommand("basis", "print the homology loop basis");
  basis_cmd->add_option("--mesh", basis_mesh, "input OBJ")->required();
  basis_cmd->add_option("--excluded-vertex", basis_excluded, "vertex whose constraint is dropped");

  CLI11_PARSE(app, argc, argv);

  if (solve_cmd->parsed()) {
    options.flip_budget = flip_budget;
    return cmd_solve(mesh_path, sig_path, out_path, report_path, options, excluded_vertex);
  }
  if (verify_cmd->parsed()) return cmd_verify(verify_mesh, verify_sig, verify_tol);
  return cmd_basis(basis_mesh, basis_excluded);
}
