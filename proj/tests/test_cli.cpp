#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("SEAMLESS_CLI");
  REQUIRE_MESSAGE(p != nullptr, "SEAMLESS_CLI must point at the CLI binary");
  return p;
}

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "run.log";
  const std::string cmd = cli_path() + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("seamless_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_mesh_obj(const fs::path& path, const fixtures::Embedded& fix) {
  std::ofstream out(path);
  out.precision(17);
  for (const auto& p : fix.positions) out << "v " << p[0] << " " << p[1] << " " << p[2] << "\n";
  for (int f = 0; f < fix.mesh.n_faces(); ++f) {
    out << "f";
    for (int t = 0; t < 3; ++t) out << " " << fix.mesh.tail(3 * f + t) + 1;
    out << "\n";
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("solve produces a seamless map and all artifacts for the tetrahedron") {
  const fs::path dir = fresh_dir("tetra");
  write_mesh_obj(dir / "tetra.obj", fixtures::tetra());
  write_text(dir / "sig.json",
             R"({"cones": [{"vertex":0,"k":2},{"vertex":1,"k":2},{"vertex":2,"k":2},{"vertex":3,"k":2}]})");

  const RunResult r = run("solve --mesh " + (dir / "tetra.obj").string() + " --signature " +
                              (dir / "sig.json").string() + " --out " + (dir / "out.obj").string() +
                              " --report " + (dir / "report.json").string(),
                          dir);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("status: converged") != std::string::npos);
  CHECK(r.output.find("iterations 0") != std::string::npos);

  REQUIRE(fs::exists(dir / "report.json"));
  const std::string report = slurp(dir / "report.json");
  CHECK(report.find("\"status\": \"converged\"") != std::string::npos);
  CHECK(report.find("\"signature_matches\": true") != std::string::npos);

  REQUIRE(fs::exists(dir / "trace.csv"));
  CHECK(slurp(dir / "trace.csv").rfind("iteration,residual_inf,energy,step,flips", 0) == 0);
  CHECK(fs::exists(dir / "out.obj"));
}

TEST_CASE("verify accepts the solver's own output and rigid transforms of it") {
  const fs::path dir = fresh_dir("verify");
  write_mesh_obj(dir / "tetra.obj", fixtures::tetra());
  write_text(dir / "sig.json",
             R"({"cones": [{"vertex":0,"k":2},{"vertex":1,"k":2},{"vertex":2,"k":2},{"vertex":3,"k":2}]})");
  REQUIRE(run("solve --mesh " + (dir / "tetra.obj").string() + " --signature " +
                  (dir / "sig.json").string() + " --out " + (dir / "out.obj").string(),
              dir)
              .exit_code == 0);

  RunResult r = run("verify --mesh " + (dir / "out.obj").string() + " --signature " +
                        (dir / "sig.json").string(),
                    dir);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("seamless: yes") != std::string::npos);

  // rotate and translate every uv; transitions are conjugated and stay
  // quarter turns
  std::istringstream in(slurp(dir / "out.obj"));
  std::ofstream rotated(dir / "rotated.obj");
  rotated.precision(17);
  std::string line;
  const double c = std::cos(0.5), s = std::sin(0.5);
  while (std::getline(in, line)) {
    if (line.rfind("vt ", 0) == 0) {
      std::istringstream ls(line.substr(3));
      double u, v;
      ls >> u >> v;
      rotated << "vt " << c * u - s * v + 2.5 << " " << s * u + c * v - 1.0 << "\n";
    } else {
      rotated << line << "\n";
    }
  }
  rotated.close();
  r = run("verify --mesh " + (dir / "rotated.obj").string() + " --signature " +
              (dir / "sig.json").string(),
          dir);
  CHECK(r.exit_code == 0);
}

TEST_CASE("verify rejects perturbed texture coordinates") {
  const fs::path dir = fresh_dir("verify_bad");
  write_mesh_obj(dir / "tetra.obj", fixtures::tetra());
  write_text(dir / "sig.json",
             R"({"cones": [{"vertex":0,"k":2},{"vertex":1,"k":2},{"vertex":2,"k":2},{"vertex":3,"k":2}]})");
  REQUIRE(run("solve --mesh " + (dir / "tetra.obj").string() + " --signature " +
                  (dir / "sig.json").string() + " --out " + (dir / "out.obj").string(),
              dir)
              .exit_code == 0);

  std::istringstream in(slurp(dir / "out.obj"));
  std::ofstream bad(dir / "bad.obj");
  bad.precision(17);
  std::string line;
  bool tweaked = false;
  while (std::getline(in, line)) {
    if (!tweaked && line.rfind("vt ", 0) == 0) {
      std::istringstream ls(line.substr(3));
      double u, v;
      ls >> u >> v;
      bad << "vt " << u + 1e-3 << " " << v << "\n";
      tweaked = true;
    } else {
      bad << line << "\n";
    }
  }
  bad.close();
  const RunResult r = run("verify --mesh " + (dir / "bad.obj").string() + " --signature " +
                              (dir / "sig.json").string(),
                          dir);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("seamless: no") != std::string::npos);
}

TEST_CASE("solve converges on the embedded torus and reports two loops") {
  const fs::path dir = fresh_dir("torus");
  write_mesh_obj(dir / "torus.obj", fixtures::torus());
  write_text(dir / "sig.json", "{}");

  const RunResult r = run("solve --mesh " + (dir / "torus.obj").string() + " --signature " +
                              (dir / "sig.json").string() + " --report " +
                              (dir / "report.json").string(),
                          dir);
  CHECK(r.exit_code == 0);
  const std::string report = slurp(dir / "report.json");
  CHECK(report.find("\"genus\": 1") != std::string::npos);

  const RunResult b = run("basis --mesh " + (dir / "torus.obj").string(), dir);
  CHECK(b.exit_code == 0);
  CHECK(b.output.find("genus: 1") != std::string::npos);
  CHECK(b.output.find("loops: 2") != std::string::npos);
}

TEST_CASE("inconsistent signatures are rejected with a validation exit code") {
  const fs::path dir = fresh_dir("gauss_bonnet");
  write_mesh_obj(dir / "tetra.obj", fixtures::tetra());
  write_text(dir / "sig.json", "{}");  // all k = 4 on a sphere violates Gauss-Bonnet

  const RunResult r = run("solve --mesh " + (dir / "tetra.obj").string() + " --signature " +
                              (dir / "sig.json").string(),
                          dir);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("Gauss-Bonnet") != std::string::npos);
}

TEST_CASE("missing files and malformed input map to distinct exit codes") {
  const fs::path dir = fresh_dir("errors");
  write_mesh_obj(dir / "tetra.obj", fixtures::tetra());
  write_text(dir / "sig.json", R"({"cones": [)");  // truncated JSON

  CHECK(run("solve --mesh " + (dir / "missing.obj").string() + " --signature " +
                (dir / "sig.json").string(),
            dir)
            .exit_code == 3);
  CHECK(run("solve --mesh " + (dir / "tetra.obj").string() + " --signature " +
                (dir / "sig.json").string(),
            dir)
            .exit_code == 1);
  // verify demands texture coordinates
  write_text(dir / "sig2.json", "{}");
  const RunResult r = run("verify --mesh " + (dir / "tetra.obj").string() + " --signature " +
                              (dir / "sig2.json").string(),
                          dir);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("texture coordinates") != std::string::npos);
}

TEST_CASE("solve output is deterministic") {
  const fs::path dir = fresh_dir("determinism");
  write_mesh_obj(dir / "ico.obj", fixtures::icosphere(1));
  std::string sig = R"({"cones": [)";
  for (int v = 0; v < 8; ++v)
    sig += (v ? "," : "") + std::string("{\"vertex\":") + std::to_string(v) + ",\"k\":3}";
  sig += "]}";
  write_text(dir / "sig.json", sig);

  for (int pass = 0; pass < 2; ++pass) {
    const std::string out = (dir / ("out" + std::to_string(pass) + ".obj")).string();
    REQUIRE(run("solve --mesh " + (dir / "ico.obj").string() + " --signature " +
                    (dir / "sig.json").string() + " --out " + out,
                dir)
                .exit_code == 0);
  }
  CHECK(slurp(dir / "out0.obj") == slurp(dir / "out1.obj"));
}
