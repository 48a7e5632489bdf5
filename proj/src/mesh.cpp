#include "seamless/mesh.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace seamless {

HalfedgeMesh HalfedgeMesh::from_faces(int vertex_count, const std::vector<std::array<int, 3>>& faces) {
  HalfedgeMesh m;
  m.n_vertices_ = vertex_count;
  const int nf = static_cast<int>(faces.size());
  const int nh = 3 * nf;
  m.next_.resize(nh);
  m.sibling_.assign(nh, -1);
  m.head_.resize(nh);
  m.tail_.resize(nh);
  m.edge_.assign(nh, -1);
  m.out_.assign(vertex_count, -1);

  std::map<std::pair<int, int>, int> directed;
  for (int f = 0; f < nf; ++f) {
    const auto& fv = faces[f];
    for (int k = 0; k < 3; ++k) {
      const int u = fv[k];
      const int v = fv[(k + 1) % 3];
      if (u < 0 || u >= vertex_count || v < 0 || v >= vertex_count)
        throw MeshError("face references invalid vertex id");
      if (u == v) throw NonManifoldError("degenerate face with repeated vertex");
      const int h = 3 * f + k;
      m.next_[h] = 3 * f + (k + 1) % 3;
      m.tail_[h] = u;
      m.head_[h] = v;
      m.out_[u] = h;
      auto ins = directed.emplace(std::make_pair(u, v), h);
      if (!ins.second)
        throw InconsistentOrientationError("directed edge (" + std::to_string(u) + "," +
                                           std::to_string(v) + ") used twice; faces are not "
                                           "consistently oriented or the mesh is non-manifold");
    }
  }

  for (const auto& [key, h] : directed) {
    auto it = directed.find(std::make_pair(key.second, key.first));
    if (it == directed.end())
      throw NonManifoldError("edge (" + std::to_string(key.first) + "," +
                             std::to_string(key.second) + ") has no partner face");
    m.sibling_[h] = it->second;
  }

  for (int v = 0; v < vertex_count; ++v)
    if (m.out_[v] < 0) throw IsolatedVertexError("vertex " + std::to_string(v) + " is isolated");

  // umbrella check: corners around each vertex must form a single cycle
  {
    std::vector<int> valence(vertex_count, 0);
    for (int h = 0; h < nh; ++h) valence[m.tail_[h]]++;
    for (int v = 0; v < vertex_count; ++v) {
      int count = 0;
      const int start = m.out_[v];
      int h = start;
      do {
        ++count;
        h = m.sibling_[m.next_[m.next_[h]]];
      } while (h != start && count <= valence[v]);
      if (count != valence[v])
        throw NonManifoldError("vertex " + std::to_string(v) + " has a disconnected fan");
    }
  }

  // dense edge ids in halfedge order
  int ne = 0;
  for (int h = 0; h < nh; ++h) {
    if (m.edge_[h] >= 0) continue;
    m.edge_[h] = ne;
    m.edge_[m.sibling_[h]] = ne;
    m.edge_halfedge_.push_back(h);
    ++ne;
  }
  m.n_edges_ = ne;
  m.closed_ = true;
  return m;
}

int HalfedgeMesh::genus() const {
  const int chi = euler_characteristic();
  if ((2 - chi) % 2 != 0 || chi > 2)
    throw OddCharacteristicError("Euler characteristic " + std::to_string(chi) +
                                 " is not of the form 2-2g");
  return (2 - chi) / 2;
}

std::vector<int> HalfedgeMesh::vertex_corner_set(int r) const {
  std::vector<int> set;
  const int start = out_[r];
  int h = start;
  do {
    // h is outgoing at r; the corner at r in face(h) is opposite next(h)
    set.push_back(next(h));
    h = sibling_[prev(h)];
  } while (h != start && h >= 0);
  return set;
}

void HalfedgeMesh::flip_ccw(int h) {
  const int hb = sibling_[h];
  const int f0 = face(h);
  const int f1 = face(hb);
  if (f0 == f1) throw MeshError("cannot flip an edge bounding a single face");
  const int a = next_[h];    // f0, B->C
  const int b = next_[a];    // f0, C->A
  const int c = next_[hb];   // f1, A->D
  const int d = next_[c];    // f1, D->B

  const int C = head_[a];
  const int D = head_[c];

  // New triangles: f0 = A->D->C->A, f1 = B->C->D->B. Halfedge ids stay in
  // their face's id block (face(h) == h/3 must keep holding), so the four
  // quad boundary halfedges are relabeled into fixed slots.
  const int s0 = 3 * f0, s1 = 3 * f1;
  const int slot_c = s0, diag0 = s0 + 1, slot_b = s0 + 2;  // A->D, D->C, C->A
  const int slot_a = s1, diag1 = s1 + 1, slot_d = s1 + 2;  // B->C, C->D, D->B

  struct HalfedgeData {
    int head, tail, edge, sibling;
  };
  auto grab = [&](int x) { return HalfedgeData{head_[x], tail_[x], edge_[x], sibling_[x]}; };
  HalfedgeData da = grab(a), db = grab(b), dc = grab(c), dd = grab(d);
  const int diag_edge = edge_[h];

  // siblings that point inside the quad must follow the relabeling
  // (possible when the two triangles are glued to each other elsewhere)
  auto remap = [&](int s) {
    if (s == a) return slot_a;
    if (s == b) return slot_b;
    if (s == c) return slot_c;
    if (s == d) return slot_d;
    return s;
  };
  da.sibling = remap(da.sibling);
  db.sibling = remap(db.sibling);
  dc.sibling = remap(dc.sibling);
  dd.sibling = remap(dd.sibling);

  auto put = [&](int slot, const HalfedgeData& v) {
    head_[slot] = v.head;
    tail_[slot] = v.tail;
    edge_[slot] = v.edge;
    sibling_[slot] = v.sibling;
  };
  put(slot_a, da);
  put(slot_b, db);
  put(slot_c, dc);
  put(slot_d, dd);
  head_[diag0] = C;
  tail_[diag0] = D;
  edge_[diag0] = diag_edge;
  sibling_[diag0] = diag1;
  head_[diag1] = D;
  tail_[diag1] = C;
  edge_[diag1] = diag_edge;
  sibling_[diag1] = diag0;

  for (int k = 0; k < 3; ++k) {
    next_[s0 + k] = s0 + (k + 1) % 3;
    next_[s1 + k] = s1 + (k + 1) % 3;
  }
  for (int x : {slot_a, diag0, slot_b, slot_c, diag1, slot_d}) {
    if (sibling_[x] >= 0) sibling_[sibling_[x]] = x;
    out_[tail_[x]] = x;
    edge_halfedge_[edge_[x]] = x;
  }
}

TreeCotree tree_cotree(const HalfedgeMesh& mesh) {
  TreeCotree tc;
  const int nv = mesh.n_vertices();
  const int nf = mesh.n_faces();
  const int ne = mesh.n_edges();
  tc.edge_in_primal.assign(ne, 0);
  tc.edge_in_dual.assign(ne, 0);
  tc.primal_parent_halfedge.assign(nv, -1);
  tc.dual_parent_face.assign(nf, -1);
  tc.dual_parent_entry.assign(nf, -1);

  std::vector<char> vseen(nv, 0);
  std::deque<int> q;
  vseen[0] = 1;
  q.push_back(0);
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    const int start = mesh.out_halfedge(v);
    int h = start;
    do {
      const int w = mesh.head(h);
      if (!vseen[w]) {
        vseen[w] = 1;
        tc.edge_in_primal[mesh.edge(h)] = 1;
        tc.primal_parent_halfedge[w] = h;
        q.push_back(w);
      }
      h = mesh.sibling(mesh.prev(h));
    } while (h != start);
  }

  std::vector<char> fseen(nf, 0);
  fseen[0] = 1;
  q.push_back(0);
  while (!q.empty()) {
    const int f = q.front();
    q.pop_front();
    for (int k = 0; k < 3; ++k) {
      const int h = 3 * f + k;
      const int e = mesh.edge(h);
      if (tc.edge_in_primal[e] || tc.edge_in_dual[e]) continue;
      const int g = mesh.face(mesh.sibling(h));
      if (!fseen[g]) {
        fseen[g] = 1;
        tc.edge_in_dual[e] = 1;
        tc.dual_parent_face[g] = f;
        tc.dual_parent_entry[g] = mesh.sibling(h);
        q.push_back(g);
      }
    }
  }

  for (int e = 0; e < ne; ++e) {
    if (tc.edge_in_primal[e])
      tc.primal_tree_edges.push_back(e);
    else if (tc.edge_in_dual[e])
      tc.dual_tree_edges.push_back(e);
    else
      tc.leftover_edges.push_back(e);
  }
  return tc;
}

void DualCycle::rebuild(const HalfedgeMesh& mesh) {
  const int n = length();
  triangles.resize(n);
  pivot_halfedges.resize(n);
  signs.resize(n);
  crossing_halfedges.resize(n);
  for (int i = 0; i < n; ++i) {
    const int x = entry_halfedges[i];
    const int nxt = entry_halfedges[(i + 1) % n];
    triangles[i] = mesh.face(x);
    if (mesh.sibling(mesh.next(x)) == nxt) {
      pivot_halfedges[i] = mesh.prev(x);
      signs[i] = -1;
    } else if (mesh.sibling(mesh.prev(x)) == nxt) {
      pivot_halfedges[i] = mesh.next(x);
      signs[i] = +1;
    } else {
      throw MeshError("dual cycle is not a connected strip");
    }
    // crossing between step i and i+1, oriented from the left strip
    // boundary to the right: the entry halfedge of the next step has the
    // triangle ahead on its left, which places its direction from the left
    // strip boundary to the right one
    crossing_halfedges[i] = entry_halfedges[(i + 1) % n];
  }
}

DualCycle DualCycle::reversed(const HalfedgeMesh& mesh) const {
  DualCycle r;
  const int n = length();
  r.entry_halfedges.resize(n);
  // traversing backwards, the entry into triangle m is the sibling of the
  // forward entry into triangle m+1
  for (int i = 0; i < n; ++i) {
    const int fwd = entry_halfedges[(n - i) % n];
    r.entry_halfedges[i] = mesh.sibling(fwd);
  }
  r.rebuild(mesh);
  return r;
}

DualCycle dual_loop(const HalfedgeMesh& mesh, const TreeCotree& tc, int leftover_edge) {
  const int h = mesh.halfedge_of_edge(leftover_edge);
  const int f1 = mesh.face(h);
  const int f2 = mesh.face(mesh.sibling(h));

  auto path_to_root = [&](int f) {
    std::vector<int> seq{f};
    while (tc.dual_parent_face[f] >= 0) {
      f = tc.dual_parent_face[f];
      seq.push_back(f);
    }
    return seq;
  };
  std::vector<int> seq1 = path_to_root(f1);
  std::vector<int> seq2 = path_to_root(f2);
  while (seq1.size() > 1 && seq2.size() > 1 && seq1[seq1.size() - 2] == seq2[seq2.size() - 2]) {
    seq1.pop_back();
    seq2.pop_back();
  }
  std::vector<int> faces;
  if (seq1.back() == seq2.back()) {
    faces.assign(seq1.begin(), seq1.end() - 1);
    faces.insert(faces.end(), seq2.rbegin(), seq2.rend());
  } else {
    faces = seq1;
    faces.insert(faces.end(), seq2.rbegin() + 1, seq2.rend());
  }

  DualCycle cycle;
  const int n = static_cast<int>(faces.size());
  if (n < 3) throw DegenerateStripError("dual loop strip has fewer than 3 triangles");
  cycle.entry_halfedges.resize(n);
  for (int i = 0; i < n; ++i) {
    const int fprev = faces[(i - 1 + n) % n];
    const int f = faces[i];
    int entry = -1;
    for (int k = 0; k < 3; ++k) {
      const int x = 3 * f + k;
      if (mesh.face(mesh.sibling(x)) == fprev) {
        entry = x;
        break;
      }
    }
    if (entry < 0) throw MeshError("dual loop construction: consecutive faces not adjacent");
    cycle.entry_halfedges[i] = entry;
  }
  cycle.rebuild(mesh);
  return cycle;
}

DualCycle vertex_loop(const HalfedgeMesh& mesh, int r) {
  DualCycle cycle;
  const int start = mesh.out_halfedge(r);
  int h = start;
  do {
    cycle.entry_halfedges.push_back(h);
    h = mesh.sibling(mesh.prev(h));
  } while (h != start);
  cycle.rebuild(mesh);
  return cycle;
}

CutGraph build_cut_graph(const HalfedgeMesh& mesh, const std::vector<int>& irregular_vertices) {
  const int nv = mesh.n_vertices();
  const int ne = mesh.n_edges();
  std::vector<char> irregular(nv, 0);
  for (int v : irregular_vertices) irregular[v] = 1;

  TreeCotree tc = tree_cotree(mesh);

  std::vector<char> in_cut(ne, 0);
  for (int e : tc.primal_tree_edges) in_cut[e] = 1;
  // route each leftover edge's primal loop through the tree
  for (int e : tc.leftover_edges) {
    in_cut[e] = 1;
    const int h = mesh.halfedge_of_edge(e);
    for (int v : {mesh.tail(h), mesh.head(h)}) {
      int w = v;
      while (tc.primal_parent_halfedge[w] >= 0) {
        const int ph = tc.primal_parent_halfedge[w];
        in_cut[mesh.edge(ph)] = 1;  // already true; loop marks path explicitly
        w = mesh.tail(ph);
      }
    }
  }

  // prune regular leaves
  std::vector<int> degree(nv, 0);
  for (int e = 0; e < ne; ++e) {
    if (!in_cut[e]) continue;
    const int h = mesh.halfedge_of_edge(e);
    degree[mesh.tail(h)]++;
    degree[mesh.head(h)]++;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (int e = 0; e < ne; ++e) {
      if (!in_cut[e]) continue;
      const int h = mesh.halfedge_of_edge(e);
      for (int v : {mesh.tail(h), mesh.head(h)}) {
        if (degree[v] == 1 && !irregular[v]) {
          in_cut[e] = 0;
          degree[mesh.tail(h)]--;
          degree[mesh.head(h)]--;
          changed = true;
          break;
        }
      }
    }
  }

  bool empty = true;
  for (int e = 0; e < ne; ++e)
    if (in_cut[e]) empty = false;
  if (empty) {
    // sphere with no (or one) designated cone: a single edge suffices
    int e = 0;
    if (!irregular_vertices.empty()) {
      const int v = irregular_vertices.front();
      e = mesh.edge(mesh.out_halfedge(v));
    }
    in_cut[e] = 1;
  }

  CutGraph cg;
  cg.edge_in_cut = in_cut;
  cg.vertex_on_cut.assign(nv, 0);
  for (int e = 0; e < ne; ++e) {
    if (!in_cut[e]) continue;
    cg.cut_edges.push_back(e);
    const int h = mesh.halfedge_of_edge(e);
    cg.vertex_on_cut[mesh.tail(h)] = 1;
    cg.vertex_on_cut[mesh.head(h)] = 1;
  }
  return cg;
}

CutMesh cut_to_disk(const HalfedgeMesh& mesh, const CutGraph& cut) {
  const int nh = mesh.n_halfedges();
  CutMesh out;
  HalfedgeMesh& c = out.mesh;
  c.next_ = mesh.next_;
  c.head_.assign(nh, -1);
  c.tail_.assign(nh, -1);
  c.sibling_.resize(nh);
  c.closed_ = false;
  for (int h = 0; h < nh; ++h)
    c.sibling_[h] = cut.edge_in_cut[mesh.edge(h)] ? -1 : mesh.sibling(h);

  // wedge split: group corners around each original vertex into fans
  // separated by cut edges; each fan becomes one cut-mesh vertex
  std::vector<int> wedge_of_out(nh, -1);  // per outgoing halfedge
  int nvc = 0;
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const int start = mesh.out_halfedge(v);
    int h = start;
    do {
      if (wedge_of_out[h] < 0) {
        // walk clockwise to the wedge's first outgoing halfedge
        int first = h;
        while (!cut.edge_in_cut[mesh.edge(first)]) {
          const int prev_out = mesh.next(mesh.sibling(first));
          if (prev_out == h) break;  // full circle, no cut at this vertex
          first = prev_out;
        }
        // sweep counterclockwise assigning this wedge
        int w = first;
        const int id = nvc++;
        out.vertex_to_original.push_back(v);
        while (true) {
          wedge_of_out[w] = id;
          if (cut.edge_in_cut[mesh.edge(mesh.prev(w))]) break;
          w = mesh.sibling(mesh.prev(w));
          if (w == first) break;
        }
      }
      h = mesh.sibling(mesh.prev(h));
    } while (h != start);
  }

  for (int h = 0; h < nh; ++h) {
    c.tail_[h] = wedge_of_out[h];
    c.head_[h] = wedge_of_out[mesh.next(h)];
  }
  c.n_vertices_ = nvc;
  c.out_.assign(nvc, -1);
  for (int h = 0; h < nh; ++h) c.out_[c.tail_[h]] = h;

  // edge ids: interior edges keep pairing, each boundary halfedge is its own edge
  c.edge_.assign(nh, -1);
  c.edge_halfedge_.clear();
  int ne = 0;
  for (int h = 0; h < nh; ++h) {
    if (c.edge_[h] >= 0) continue;
    c.edge_[h] = ne;
    if (c.sibling_[h] >= 0) c.edge_[c.sibling_[h]] = ne;
    c.edge_halfedge_.push_back(h);
    ++ne;
  }
  c.n_edges_ = ne;

  out.halfedge_to_original.resize(nh);
  for (int h = 0; h < nh; ++h) out.halfedge_to_original[h] = h;

  // disk check: chi == 1 and a single boundary loop
  if (c.euler_characteristic() != 1)
    throw NotADiskError("cut complement is not a disk (Euler characteristic " +
                        std::to_string(c.euler_characteristic()) + ")");
  int boundary_halfedges = 0, first_boundary = -1;
  for (int h = 0; h < nh; ++h) {
    if (c.sibling_[h] < 0) {
      ++boundary_halfedges;
      if (first_boundary < 0) first_boundary = h;
    }
  }
  if (first_boundary < 0) throw NotADiskError("cut produced no boundary");
  int count = 0, h = first_boundary;
  do {
    ++count;
    // next boundary halfedge counterclockwise around the boundary loop
    int x = mesh.next(h);
    while (c.sibling_[x] >= 0) x = mesh.next(c.sibling_[x]);
    h = x;
  } while (h != first_boundary && count <= boundary_halfedges);
  if (count != boundary_halfedges)
    throw NotADiskError("cut produced more than one boundary loop");
  out.boundary_length = boundary_halfedges;
  return out;
}

}  // namespace seamless
