#include "seamless/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace seamless {

namespace {

// "v", "v/vt", "v//vn", "v/vt/vn" -> (vertex, uv) indices, 1-based in, 0-based out
std::pair<int, int> parse_face_corner(const std::string& token, int line_no) {
  int v = 0, vt = -1;
  size_t pos = 0;
  try {
    v = std::stoi(token, &pos);
    if (pos < token.size() && token[pos] == '/') {
      const size_t second = token.find('/', pos + 1);
      const std::string mid = token.substr(pos + 1, second == std::string::npos
                                                        ? std::string::npos
                                                        : second - pos - 1);
      if (!mid.empty()) vt = std::stoi(mid);
    }
  } catch (const std::exception&) {
    throw IOError("malformed face corner '" + token + "' on line " + std::to_string(line_no));
  }
  if (v <= 0) throw IOError("negative or zero vertex index on line " + std::to_string(line_no));
  return {v - 1, vt > 0 ? vt - 1 : -1};
}

}  // namespace

ObjData read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open '" + path + "'");
  ObjData data;
  std::string line;
  int line_no = 0;
  bool any_face_uv = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      std::array<double, 3> p{};
      if (!(ss >> p[0] >> p[1] >> p[2]))
        throw IOError("malformed vertex on line " + std::to_string(line_no));
      data.vertices.push_back(p);
    } else if (tag == "vt") {
      std::array<double, 2> uv{};
      if (!(ss >> uv[0] >> uv[1]))
        throw IOError("malformed texture coordinate on line " + std::to_string(line_no));
      data.uvs.push_back(uv);
    } else if (tag == "f") {
      std::vector<std::pair<int, int>> corners;
      std::string token;
      while (ss >> token) corners.push_back(parse_face_corner(token, line_no));
      if (corners.size() != 3)
        throw IOError("face with " + std::to_string(corners.size()) +
                      " corners on line " + std::to_string(line_no) + ", triangles required");
      data.faces.push_back({corners[0].first, corners[1].first, corners[2].first});
      if (corners[0].second >= 0 && corners[1].second >= 0 && corners[2].second >= 0) {
        data.face_uvs.push_back({corners[0].second, corners[1].second, corners[2].second});
        any_face_uv = true;
      } else {
        data.face_uvs.push_back({-1, -1, -1});
      }
    }
  }
  if (data.faces.empty()) throw IOError("'" + path + "' contains no faces");
  for (const auto& f : data.faces)
    for (int v : f)
      if (v >= static_cast<int>(data.vertices.size()))
        throw IOError("face references vertex " + std::to_string(v + 1) + " beyond count");
  if (!any_face_uv) {
    data.uvs.clear();
    data.face_uvs.clear();
  }
  return data;
}

EdgeMetric edge_metric_from_positions(const HalfedgeMesh& mesh,
                                      const std::vector<std::array<double, 3>>& vertices) {
  EdgeMetric metric;
  metric.length.resize(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const int h = mesh.halfedge_of_edge(e);
    const auto& a = vertices[mesh.tail(h)];
    const auto& b = vertices[mesh.head(h)];
    metric.length[e] = std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                                 (a[2] - b[2]) * (a[2] - b[2]));
    if (!(metric.length[e] > 0.0))
      throw IOError("edge " + std::to_string(e) + " has zero length");
  }
  return metric;
}

void write_obj(const std::string& path, const std::vector<std::array<double, 3>>& vertices,
               const PlanarLayout& layout) {
  std::ofstream out(path);
  if (!out) throw IOError("cannot write '" + path + "'");
  out.precision(17);
  const HalfedgeMesh& m = layout.cut.mesh;
  for (const auto& p : vertices) out << "v " << p[0] << " " << p[1] << " " << p[2] << "\n";
  for (int v = 0; v < m.n_vertices(); ++v)
    out << "vt " << layout.position[v].real() << " " << layout.position[v].imag() << "\n";
  for (int f = 0; f < m.n_faces(); ++f) {
    out << "f";
    for (int t = 0; t < 3; ++t) {
      const int vc = m.tail(3 * f + t);
      out << " " << layout.cut.vertex_to_original[vc] + 1 << "/" << vc + 1;
    }
    out << "\n";
  }
  if (!out) throw IOError("write to '" + path + "' failed");
}

}  // namespace seamless
