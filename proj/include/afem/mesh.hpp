#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "afem/geometry.hpp"

namespace afem {

enum class BoundaryLabel { Interior, Dirichlet, Neumann };

enum class DomainId { ZShape, LShape };

struct Vertex {
  double x = 0.0;
  double y = 0.0;
  Vec2 pos() const { return {x, y}; }
};

// Local convention: vertex 0 is the newest vertex, the refinement edge is
// the edge (v1, v2) opposite vertex 0. Vertices are ordered counterclockwise.
struct Triangle {
  std::array<int, 3> v{-1, -1, -1};
  int generation = 0;
  // Cached measure; halved at each bisection so that |child| = |parent|/2
  // holds bitwise along any refinement sequence.
  double area = 0.0;
};

// Adjacency of one triangle edge. Local edge i is opposite local vertex i.
struct EdgeAdjacency {
  int neighbor = -1;  // adjacent triangle across this edge, -1 on boundary
  BoundaryLabel label = BoundaryLabel::Interior;
};

class Mesh {
 public:
  std::vector<Vertex> vertices;
  std::vector<Triangle> triangles;

  // parent[t] = index of the triangle in the mesh this one was refined from
  // (identity if unrefined).
  std::vector<int> parent;

  // vertex_parents[v] = endpoints of the edge whose midpoint v is, or
  // {-1, -1} for vertices of the initial triangulation. Endpoint indices are
  // always smaller than v, so prolongation can sweep in index order.
  std::vector<std::array<int, 2>> vertex_parents;

  // edge_adjacency[t][i] describes the edge of triangle t opposite local
  // vertex i.
  std::vector<std::array<EdgeAdjacency, 3>> edge_adjacency;

  std::uint64_t id = 0;
  std::vector<std::uint64_t> lineage;  // ids of all ancestors, oldest first

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }

  Vec2 vertex_pos(int t, int local) const {
    return vertices[triangles[t].v[local]].pos();
  }
  Vec2 centroid(int t) const;
  double signed_area_geometric(int t) const;

  bool descends_from(const Mesh& coarse) const;

  // Throws std::runtime_error on any violated mesh invariant: nonpositive
  // areas, hanging vertices, mislabeled boundary edges.
  void check_conformity() const;

  double min_angle() const;
};

// Raw-mesh constructor used by the domain builders and by tests. Assigns
// refinement edges by the longest-edge rule (ties broken by the smaller
// sorted vertex-index pair), builds the edge table, and labels boundary
// edges via the supplied map (sorted vertex pair -> label); boundary edges
// missing from the map default to Dirichlet.
struct EdgeKeyHash {
  std::size_t operator()(const std::pair<int, int>& k) const {
    return std::hash<long long>()((static_cast<long long>(k.first) << 32) ^ k.second);
  }
};
using EdgeLabelMap =
    std::unordered_map<std::pair<int, int>, BoundaryLabel, EdgeKeyHash>;

Mesh make_mesh(std::vector<Vertex> vertices,
               const std::vector<std::array<int, 3>>& triangles,
               const EdgeLabelMap& boundary_labels = {});

Mesh build_initial_mesh(DomainId domain);

Mesh refine_nvb(const Mesh& mesh, const std::vector<int>& marked);

Mesh uniform_refine(const Mesh& mesh);

// h|_T = |T|^{1/2} per triangle.
std::vector<double> mesh_size_function(const Mesh& mesh);

double total_area(const Mesh& mesh);

// Plain-text dump: "v x y" per vertex, "t i j k label0 label1 label2" per
// triangle. Debug/golden-test aid only.
void dump_mesh(const Mesh& mesh, std::ostream& out);

}  // namespace afem
