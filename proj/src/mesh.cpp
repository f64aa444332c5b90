#include "afem/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace afem {

namespace {

std::atomic<std::uint64_t> next_mesh_id{1};

std::pair<int, int> edge_key(int a, int b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

// Strict total order used for initial refinement-edge assignment: longer
// edges first, ties broken by the smaller sorted vertex pair. Strictness
// guarantees that chains of incompatible refinement edges terminate.
struct EdgeOrder {
  double len2;
  std::pair<int, int> key;
  bool operator<(const EdgeOrder& other) const {
    if (len2 != other.len2) return len2 > other.len2;
    return key < other.key;
  }
};

}  // namespace

Vec2 Mesh::centroid(int t) const {
  Vec2 a = vertex_pos(t, 0), b = vertex_pos(t, 1), c = vertex_pos(t, 2);
  return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

double Mesh::signed_area_geometric(int t) const {
  Vec2 a = vertex_pos(t, 0), b = vertex_pos(t, 1), c = vertex_pos(t, 2);
  return 0.5 * cross(b - a, c - a);
}

bool Mesh::descends_from(const Mesh& coarse) const {
  if (coarse.id == id) return true;
  return std::find(lineage.begin(), lineage.end(), coarse.id) != lineage.end();
}

void Mesh::check_conformity() const {
  std::unordered_map<std::pair<int, int>, int, EdgeKeyHash> count;
  std::unordered_map<std::pair<int, int>, BoundaryLabel, EdgeKeyHash> labels;
  for (int t = 0; t < num_triangles(); ++t) {
    if (signed_area_geometric(t) <= 0.0)
      throw std::runtime_error("nonpositive triangle area");
    const auto& tri = triangles[t];
    if (tri.v[0] == tri.v[1] || tri.v[1] == tri.v[2] || tri.v[0] == tri.v[2])
      throw std::runtime_error("degenerate triangle indices");
    for (int i = 0; i < 3; ++i) {
      auto key = edge_key(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
      count[key] += 1;
      labels[key] = edge_adjacency[t][i].label;
    }
  }
  for (const auto& [key, c] : count) {
    if (c > 2) throw std::runtime_error("edge shared by more than 2 triangles");
    if (c == 2 && labels[key] != BoundaryLabel::Interior)
      throw std::runtime_error("interior edge carries boundary label");
    if (c == 1 && labels[key] == BoundaryLabel::Interior)
      throw std::runtime_error("boundary edge unlabeled (hanging vertex?)");
  }
}

double Mesh::min_angle() const {
  double best = 4.0;
  for (int t = 0; t < num_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) {
      Vec2 a = vertex_pos(t, i);
      Vec2 u = vertex_pos(t, (i + 1) % 3) - a;
      Vec2 w = vertex_pos(t, (i + 2) % 3) - a;
      double ang = std::atan2(std::abs(cross(u, w)), dot(u, w));
      best = std::min(best, ang);
    }
  }
  return best;
}

Mesh make_mesh(std::vector<Vertex> vertices,
               const std::vector<std::array<int, 3>>& triangles,
               const EdgeLabelMap& boundary_labels) {
  Mesh m;
  m.vertices = std::move(vertices);
  m.id = next_mesh_id.fetch_add(1);
  m.triangles.reserve(triangles.size());
  for (const auto& tv : triangles) {
    // Rotate so that the refinement edge (longest, ties by vertex pair) is
    // opposite local vertex 0. Cyclic rotation preserves orientation.
    int best = 0;
    EdgeOrder best_order{-1.0, {0, 0}};
    for (int i = 0; i < 3; ++i) {
      int a = tv[(i + 1) % 3], b = tv[(i + 2) % 3];
      Vec2 d = m.vertices[a].pos() - m.vertices[b].pos();
      EdgeOrder order{dot(d, d), edge_key(a, b)};
      if (i == 0 || order < best_order) {
        best_order = order;
        best = i;
      }
    }
    Triangle tri;
    tri.v = {tv[best], tv[(best + 1) % 3], tv[(best + 2) % 3]};
    tri.generation = 0;
    m.triangles.push_back(tri);
  }
  m.parent.resize(m.triangles.size());
  for (std::size_t t = 0; t < m.triangles.size(); ++t)
    m.parent[t] = static_cast<int>(t);
  m.vertex_parents.assign(m.vertices.size(), {-1, -1});

  // Edge table and labels.
  std::unordered_map<std::pair<int, int>, std::pair<int, int>, EdgeKeyHash>
      incident;  // edge -> (tri, local index), second occupant folded in below
  m.edge_adjacency.assign(m.triangles.size(), {});
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    double sa = m.signed_area_geometric(t);
    if (sa <= 0.0) throw std::runtime_error("make_mesh: nonpositive area");
    m.triangles[t].area = sa;
    for (int i = 0; i < 3; ++i) {
      auto key = edge_key(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
      auto it = incident.find(key);
      if (it == incident.end()) {
        incident[key] = {t, i};
      } else {
        auto [s, j] = it->second;
        m.edge_adjacency[t][i].neighbor = s;
        m.edge_adjacency[s][j].neighbor = t;
      }
    }
  }
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    for (int i = 0; i < 3; ++i) {
      auto& adj = m.edge_adjacency[t][i];
      if (adj.neighbor >= 0) {
        adj.label = BoundaryLabel::Interior;
        continue;
      }
      auto key = edge_key(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
      auto it = boundary_labels.find(key);
      adj.label = it != boundary_labels.end() ? it->second
                                              : BoundaryLabel::Dirichlet;
    }
  }
  return m;
}

namespace {

// Working state for one refine_nvb call.
struct Refiner {
  struct WorkTri {
    std::array<int, 3> v;
    int generation;
    double area;
    int origin;  // triangle index in the input mesh
    bool alive = true;
  };

  std::vector<Vertex> verts;
  std::vector<std::array<int, 2>> vertex_parents;
  std::vector<WorkTri> tris;
  std::unordered_map<std::pair<int, int>, BoundaryLabel, EdgeKeyHash> labels;
  // edge -> alive triangles sharing it (at most 2)
  std::unordered_map<std::pair<int, int>, std::array<int, 2>, EdgeKeyHash>
      edge_map;
  std::unordered_map<std::pair<int, int>, int, EdgeKeyHash> midpoints;

  void edge_insert(std::pair<int, int> key, int t) {
    auto it = edge_map.find(key);
    if (it == edge_map.end()) {
      edge_map[key] = {t, -1};
      return;
    }
    auto& slot = it->second;
    if (slot[0] < 0)
      slot[0] = t;
    else
      slot[1] = t;
  }
  void edge_remove(std::pair<int, int> key, int t) {
    auto it = edge_map.find(key);
    if (it == edge_map.end()) return;
    auto& slot = it->second;
    if (slot[0] == t)
      slot[0] = slot[1], slot[1] = -1;
    else if (slot[1] == t)
      slot[1] = -1;
  }
  int neighbor_across(std::pair<int, int> key, int t) const {
    auto it = edge_map.find(key);
    if (it == edge_map.end()) return -1;
    return it->second[0] == t ? it->second[1] : it->second[0];
  }

  void register_tri(int t) {
    const auto& w = tris[t];
    edge_insert(edge_key(w.v[0], w.v[1]), t);
    edge_insert(edge_key(w.v[1], w.v[2]), t);
    edge_insert(edge_key(w.v[2], w.v[0]), t);
  }

  int midpoint_of(int a, int b) {
    auto key = edge_key(a, b);
    auto it = midpoints.find(key);
    if (it != midpoints.end()) return it->second;
    Vertex mv{0.5 * (verts[a].x + verts[b].x), 0.5 * (verts[a].y + verts[b].y)};
    int m = static_cast<int>(verts.size());
    verts.push_back(mv);
    vertex_parents.push_back({key.first, key.second});
    midpoints[key] = m;
    auto lab = labels.find(key);
    if (lab != labels.end()) {
      labels[edge_key(a, m)] = lab->second;
      labels[edge_key(m, b)] = lab->second;
    }
    return m;
  }

  // Split the leaf triangle t across its refinement edge (v1, v2). The
  // caller guarantees that the neighbor across that edge (if any) is split
  // in the same step, so no hanging vertex survives.
  void bisect_leaf(int t) {
    WorkTri w = tris[t];
    int v0 = w.v[0], v1 = w.v[1], v2 = w.v[2];
    int m = midpoint_of(v1, v2);
    tris[t].alive = false;
    edge_remove(edge_key(v0, v1), t);
    edge_remove(edge_key(v1, v2), t);
    edge_remove(edge_key(v2, v0), t);
    WorkTri c1{{m, v2, v0}, w.generation + 1, w.area / 2.0, w.origin};
    WorkTri c2{{m, v0, v1}, w.generation + 1, w.area / 2.0, w.origin};
    int i1 = static_cast<int>(tris.size());
    tris.push_back(c1);
    register_tri(i1);
    int i2 = static_cast<int>(tris.size());
    tris.push_back(c2);
    register_tri(i2);
  }

  std::pair<int, int> refinement_edge_key(int t) const {
    return edge_key(tris[t].v[1], tris[t].v[2]);
  }

  void ensure_bisected(int start) {
    std::vector<int> stack{start};
    long long guard = 0;
    while (!stack.empty()) {
      if (++guard > 100'000'000)
        throw std::runtime_error("NVB closure failed to terminate");
      int t = stack.back();
      if (!tris[t].alive) {
        stack.pop_back();
        continue;
      }
      auto e = refinement_edge_key(t);
      int nb = neighbor_across(e, t);
      if (nb >= 0 && refinement_edge_key(nb) != e) {
        stack.push_back(nb);
        continue;
      }
      bisect_leaf(t);
      if (nb >= 0) bisect_leaf(nb);
      stack.pop_back();
    }
  }
};

}  // namespace

Mesh refine_nvb(const Mesh& mesh, const std::vector<int>& marked) {
  for (int t : marked)
    if (t < 0 || t >= mesh.num_triangles())
      throw std::out_of_range("refine_nvb: marked index out of range");

  Refiner r;
  r.verts = mesh.vertices;
  r.vertex_parents = mesh.vertex_parents;
  r.tris.reserve(mesh.triangles.size() * 2);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    r.tris.push_back({tri.v, tri.generation, tri.area, t});
  }
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) {
      const auto& adj = mesh.edge_adjacency[t][i];
      if (adj.label != BoundaryLabel::Interior) {
        auto key = edge_key(mesh.triangles[t].v[(i + 1) % 3],
                            mesh.triangles[t].v[(i + 2) % 3]);
        r.labels[key] = adj.label;
      }
    }
  }
  r.edge_map.reserve(mesh.num_triangles() * 4);
  for (int t = 0; t < mesh.num_triangles(); ++t) r.register_tri(t);

  for (int t : marked)
    if (r.tris[t].alive) r.ensure_bisected(t);

  // Collect alive triangles into the output mesh, preserving the NVB vertex
  // convention (newest vertex stays local 0).
  Mesh fine;
  fine.id = next_mesh_id.fetch_add(1);
  fine.vertices = std::move(r.verts);
  fine.vertex_parents = std::move(r.vertex_parents);
  for (const auto& w : r.tris) {
    if (!w.alive) continue;
    Triangle tri;
    tri.v = w.v;
    tri.generation = w.generation;
    tri.area = w.area;
    fine.triangles.push_back(tri);
    fine.parent.push_back(w.origin);
  }

  std::unordered_map<std::pair<int, int>, std::pair<int, int>, EdgeKeyHash>
      incident;
  fine.edge_adjacency.assign(fine.triangles.size(), {});
  for (int t = 0; t < fine.num_triangles(); ++t) {
    const auto& tri = fine.triangles[t];
    for (int i = 0; i < 3; ++i) {
      auto key = edge_key(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
      auto it = incident.find(key);
      if (it == incident.end()) {
        incident[key] = {t, i};
      } else {
        auto [s, j] = it->second;
        fine.edge_adjacency[t][i].neighbor = s;
        fine.edge_adjacency[s][j].neighbor = t;
      }
    }
  }
  for (int t = 0; t < fine.num_triangles(); ++t) {
    const auto& tri = fine.triangles[t];
    for (int i = 0; i < 3; ++i) {
      auto& adj = fine.edge_adjacency[t][i];
      if (adj.neighbor >= 0) {
        adj.label = BoundaryLabel::Interior;
        continue;
      }
      auto key = edge_key(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
      auto it = r.labels.find(key);
      adj.label = it != r.labels.end() ? it->second : BoundaryLabel::Dirichlet;
    }
  }
  fine.lineage = mesh.lineage;
  fine.lineage.push_back(mesh.id);
  return fine;
}

Mesh uniform_refine(const Mesh& mesh) {
  std::vector<int> all(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) all[t] = t;
  return refine_nvb(mesh, all);
}

Mesh build_initial_mesh(DomainId domain) {
  if (domain == DomainId::ZShape) {
    // (-1,1)^2 minus conv{(0,0),(-1,0),(-1,-1)}; the corner region
    // omega = conv{(1,0),(1,1),(0,1)} is exactly one triangle so that
    // chi_omega data stays elementwise constant under refinement.
    std::vector<Vertex> v = {
        {-1, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {0, 0}};
    const int A = 0, B = 1, C = 2, D = 3, E = 4, F = 5, G = 6, O = 7;
    std::vector<std::array<int, 3>> tris = {
        {O, A, B}, {O, B, C}, {O, C, E}, {O, E, F}, {O, F, G}, {C, D, E}};
    Mesh m = make_mesh(std::move(v), tris);  // all boundary edges Dirichlet
    // Two uniform refinements so that level 0 already has interior dofs.
    m = uniform_refine(uniform_refine(m));
    m.lineage.clear();
    for (int t = 0; t < m.num_triangles(); ++t) m.parent[t] = t;
    return m;
  }
  // LShape: (-1,1)^2 minus [0,1]x[-1,0]; criss-cross of three unit squares
  // with diagonals through the re-entrant corner. Neumann on the outer
  // boundary, Dirichlet on the two re-entrant edges.
  std::vector<Vertex> v = {{-1, -1}, {0, -1}, {0, 0},  {1, 0},
                           {1, 1},   {0, 1},  {-1, 1}, {-1, 0}};
  std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {0, 2, 7}, {7, 2, 6},
                                          {2, 5, 6}, {2, 3, 4}, {2, 4, 5}};
  EdgeLabelMap labels;
  auto set = [&](int a, int b, BoundaryLabel lab) {
    labels[a < b ? std::make_pair(a, b) : std::make_pair(b, a)] = lab;
  };
  set(0, 1, BoundaryLabel::Neumann);   // bottom
  set(0, 7, BoundaryLabel::Neumann);   // left lower
  set(7, 6, BoundaryLabel::Neumann);   // left upper
  set(6, 5, BoundaryLabel::Neumann);   // top left
  set(5, 4, BoundaryLabel::Neumann);   // top right
  set(4, 3, BoundaryLabel::Neumann);   // right
  set(1, 2, BoundaryLabel::Dirichlet);  // re-entrant, x = 0
  set(2, 3, BoundaryLabel::Dirichlet);  // re-entrant, y = 0
  return make_mesh(std::move(v), tris, labels);
}

std::vector<double> mesh_size_function(const Mesh& mesh) {
  std::vector<double> h(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t)
    h[t] = std::sqrt(mesh.triangles[t].area);
  return h;
}

double total_area(const Mesh& mesh) {
  double s = 0.0;
  for (const auto& tri : mesh.triangles) s += tri.area;
  return s;
}

void dump_mesh(const Mesh& mesh, std::ostream& out) {
  auto label_code = [](BoundaryLabel l) {
    switch (l) {
      case BoundaryLabel::Interior: return 0;
      case BoundaryLabel::Dirichlet: return 1;
      default: return 2;
    }
  };
  for (const auto& v : mesh.vertices) out << "v " << v.x << " " << v.y << "\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    out << "t " << tri.v[0] << " " << tri.v[1] << " " << tri.v[2];
    for (int i = 0; i < 3; ++i)
      out << " " << label_code(mesh.edge_adjacency[t][i].label);
    out << "\n";
  }
}

}  // namespace afem
