#pragma once

#include <array>
#include <string>
#include <vector>

#include "seamless/layout.hpp"
#include "seamless/mesh.hpp"
#include "seamless/metric.hpp"

namespace seamless {

struct IOError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingUVsError : IOError {
  using IOError::IOError;
};

struct ObjData {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<int, 3>> faces;    // vertex indices, 0-based
  std::vector<std::array<double, 2>> uvs;   // may be empty
  std::vector<std::array<int, 3>> face_uvs;  // parallel to faces when uvs present
  bool has_uvs() const { return !uvs.empty(); }
};

ObjData read_obj(const std::string& path);

/// Euclidean edge lengths of the embedded mesh.
EdgeMetric edge_metric_from_positions(const HalfedgeMesh& mesh,
                                      const std::vector<std::array<double, 3>>& vertices);

/// Writes one `v` per original vertex and one `vt` per cut-mesh vertex,
/// faces as `f v/vt v/vt v/vt`, so the surface stays closed while texture
/// coordinates are duplicated along the cut.
void write_obj(const std::string& path, const std::vector<std::array<double, 3>>& vertices,
               const PlanarLayout& layout);

}  // namespace seamless
