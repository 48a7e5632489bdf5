#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace seamless {

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonManifoldError : MeshError {
  using MeshError::MeshError;
};
struct InconsistentOrientationError : MeshError {
  using MeshError::MeshError;
};
struct IsolatedVertexError : MeshError {
  using MeshError::MeshError;
};
struct OddCharacteristicError : MeshError {
  using MeshError::MeshError;
};
struct NotADiskError : MeshError {
  using MeshError::MeshError;
};
struct DegenerateStripError : MeshError {
  using MeshError::MeshError;
};
struct EmptyCutImpossibleError : MeshError {
  using MeshError::MeshError;
};

struct CutMesh;
struct CutGraph;
class HalfedgeMesh;
CutMesh cut_to_disk(const HalfedgeMesh& mesh, const CutGraph& cut);

/// Halfedge connectivity of an oriented triangle mesh.
///
/// Halfedges are indexed densely, three per face (halfedge 3f+k is the k-th
/// side of face f), so `face(h) == h/3` always holds. On a closed mesh every
/// halfedge has a sibling; meshes produced by cut_to_disk() mark boundary
/// halfedges with sibling(h) == -1.
class HalfedgeMesh {
public:
  HalfedgeMesh() = default;

  /// Builds connectivity from a face-vertex list. Faces must be consistently
  /// oriented and each undirected edge must appear in exactly two faces.
  static HalfedgeMesh from_faces(int vertex_count, const std::vector<std::array<int, 3>>& faces);

  int n_vertices() const { return n_vertices_; }
  int n_faces() const { return static_cast<int>(next_.size()) / 3; }
  int n_halfedges() const { return static_cast<int>(next_.size()); }
  int n_edges() const { return n_edges_; }

  int next(int h) const { return next_[h]; }
  int prev(int h) const { return next_[next_[h]]; }
  int sibling(int h) const { return sibling_[h]; }
  int head(int h) const { return head_[h]; }
  int tail(int h) const { return tail_[h]; }
  int face(int h) const { return h / 3; }
  int edge(int h) const { return edge_[h]; }
  int halfedge_of_face(int f) const { return 3 * f; }
  int halfedge_of_edge(int e) const { return edge_halfedge_[e]; }
  int out_halfedge(int v) const { return out_[v]; }

  /// Vertex at the corner opposite halfedge h (the corner whose angle is
  /// alpha_h).
  int corner_vertex(int h) const { return head_[next_[h]]; }

  bool is_closed() const { return closed_; }
  bool is_boundary(int h) const { return sibling_[h] < 0; }

  int euler_characteristic() const { return n_vertices_ - n_edges_ + n_faces(); }

  /// Genus of a closed mesh via the Euler characteristic.
  int genus() const;

  /// One halfedge per triangle incident at r: the halfedge opposite the
  /// corner at r.
  std::vector<int> vertex_corner_set(int r) const;

  /// Counterclockwise diagonal swap of the two triangles at halfedge h.
  /// Connectivity only; metric updates are the caller's concern.
  void flip_ccw(int h);

private:
  std::vector<int> next_;
  std::vector<int> sibling_;
  std::vector<int> head_;
  std::vector<int> tail_;
  std::vector<int> edge_;
  std::vector<int> edge_halfedge_;
  std::vector<int> out_;
  int n_vertices_ = 0;
  int n_edges_ = 0;
  bool closed_ = true;

  friend struct CutMesh;
  friend CutMesh cut_to_disk(const HalfedgeMesh& mesh, const CutGraph& cut);
};

/// Edge partition of a closed mesh: primal spanning tree, dual spanning
/// tree, and the 2g leftover edges that generate homology.
struct TreeCotree {
  std::vector<int> primal_tree_edges;
  std::vector<int> dual_tree_edges;
  std::vector<int> leftover_edges;
  std::vector<char> edge_in_primal;
  std::vector<char> edge_in_dual;
  /// Per face: parent face in the dual BFS tree (-1 at the root) and the
  /// halfedge inside this face whose edge connects to the parent.
  std::vector<int> dual_parent_face;
  std::vector<int> dual_parent_entry;
  /// Per vertex: halfedge of the primal tree pointing from the parent to
  /// this vertex (-1 at the root).
  std::vector<int> primal_parent_halfedge;
};

TreeCotree tree_cotree(const HalfedgeMesh& mesh);

/// Directed cyclic triangle strip. The primary representation is the entry
/// halfedge per step: entry_halfedges[m] lies in the m-th strip triangle and
/// its sibling lies in the previous one. Pivot corners, signs and crossing
/// halfedges are derived via rebuild().
struct DualCycle {
  std::vector<int> entry_halfedges;

  // derived, valid after rebuild()
  std::vector<int> triangles;
  std::vector<int> pivot_halfedges;
  std::vector<int> signs;               // +1 pivot left of strip direction
  std::vector<int> crossing_halfedges;  // oriented left-to-right across the strip

  int length() const { return static_cast<int>(entry_halfedges.size()); }
  void rebuild(const HalfedgeMesh& mesh);
  DualCycle reversed(const HalfedgeMesh& mesh) const;
};

/// Non-contractible dual loop through a tree-cotree leftover edge.
DualCycle dual_loop(const HalfedgeMesh& mesh, const TreeCotree& tc, int leftover_edge);

/// Elementary dual cycle around a single vertex; all signs +1 and the pivot
/// angles are exactly the corner set N(r).
DualCycle vertex_loop(const HalfedgeMesh& mesh, int r);

/// Set of mesh edges whose complement is a topological disk.
struct CutGraph {
  std::vector<char> edge_in_cut;
  std::vector<int> cut_edges;
  std::vector<char> vertex_on_cut;
};

/// Cut graph through all given irregular vertices: pruned primal spanning
/// tree plus 2g primal loops from the tree-cotree leftovers.
CutGraph build_cut_graph(const HalfedgeMesh& mesh, const std::vector<int>& irregular_vertices);

/// Mesh cut open along a cut graph, with correspondence back to the
/// original. Halfedge ids are preserved; only vertices are re-indexed
/// (one copy per wedge along the cut).
struct CutMesh {
  HalfedgeMesh mesh;
  std::vector<int> vertex_to_original;    // cut-mesh vertex -> original vertex
  std::vector<int> halfedge_to_original;  // identity, kept for interface clarity
  int boundary_length = 0;
};

CutMesh cut_to_disk(const HalfedgeMesh& mesh, const CutGraph& cut);

}  // namespace seamless
