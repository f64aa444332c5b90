#include "afem/space.hpp"

#include <cmath>
#include <stdexcept>

namespace afem {

DofMap build_dof_map(const Mesh& mesh) {
  std::vector<bool> constrained(mesh.vertices.size(), false);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) {
      if (mesh.edge_adjacency[t][i].label != BoundaryLabel::Dirichlet) continue;
      constrained[mesh.triangles[t].v[(i + 1) % 3]] = true;
      constrained[mesh.triangles[t].v[(i + 2) % 3]] = true;
    }
  }
  DofMap dofs;
  dofs.vertex_to_dof.assign(mesh.vertices.size(), -1);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    if (!constrained[v]) dofs.vertex_to_dof[v] = dofs.n_free++;
  if (dofs.n_free == 0) throw std::runtime_error("empty space");
  return dofs;
}

FeFunction FeFunction::zero(const Mesh& mesh) {
  FeFunction f;
  f.mesh_id = mesh.id;
  f.values.assign(mesh.vertices.size(), 0.0);
  return f;
}

FeFunction from_free_vector(const Mesh& mesh, const DofMap& dofs,
                            const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != dofs.n_free)
    throw std::invalid_argument("from_free_vector: size mismatch");
  FeFunction f = FeFunction::zero(mesh);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    if (dofs.vertex_to_dof[v] >= 0) f.values[v] = x[dofs.vertex_to_dof[v]];
  return f;
}

std::vector<double> to_free_vector(const DofMap& dofs, const FeFunction& f) {
  std::vector<double> x(dofs.n_free, 0.0);
  for (std::size_t v = 0; v < dofs.vertex_to_dof.size(); ++v)
    if (dofs.vertex_to_dof[v] >= 0) x[dofs.vertex_to_dof[v]] = f.values[v];
  return x;
}

FeFunction prolongate(const FeFunction& f, const Mesh& coarse,
                      const Mesh& fine) {
  if (f.mesh_id != coarse.id)
    throw std::invalid_argument("prolongate: function not on coarse mesh");
  if (!fine.descends_from(coarse))
    throw std::invalid_argument("prolongate: meshes not nested");
  if (f.values.size() != coarse.vertices.size())
    throw std::invalid_argument("prolongate: coefficient size mismatch");

  FeFunction g;
  g.mesh_id = fine.id;
  g.values.resize(fine.vertices.size());
  std::copy(f.values.begin(), f.values.end(), g.values.begin());
  // New vertices are edge midpoints created in index order, so both parents
  // already carry values when reached.
  for (std::size_t v = coarse.vertices.size(); v < fine.vertices.size(); ++v) {
    auto [a, b] = fine.vertex_parents[v];
    g.values[v] = 0.5 * (g.values[a] + g.values[b]);
  }
  return g;
}

Vec2 element_gradient(const Mesh& mesh, const FeFunction& f, int t) {
  if (t < 0 || t >= mesh.num_triangles())
    throw std::out_of_range("element_gradient: triangle index");
  Vec2 p0 = mesh.vertex_pos(t, 0), p1 = mesh.vertex_pos(t, 1),
       p2 = mesh.vertex_pos(t, 2);
  double two_area = cross(p1 - p0, p2 - p0);
  if (!(two_area > 0.0))
    throw std::runtime_error("element_gradient: degenerate triangle");
  const auto& vv = mesh.triangles[t].v;
  // grad lambda_i = perp(v_{i+1} - v_{i+2}) / (2|T|)
  Vec2 g = f.values[vv[0]] * perp(p1 - p2) + f.values[vv[1]] * perp(p2 - p0) +
           f.values[vv[2]] * perp(p0 - p1);
  return (1.0 / two_area) * g;
}

double evaluate(const Mesh& mesh, const FeFunction& f, Vec2 point) {
  if (f.mesh_id != mesh.id)
    throw std::invalid_argument("evaluate: function/mesh mismatch");
  constexpr double kTol = 1e-12;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Vec2 p0 = mesh.vertex_pos(t, 0), p1 = mesh.vertex_pos(t, 1),
         p2 = mesh.vertex_pos(t, 2);
    double two_area = cross(p1 - p0, p2 - p0);
    double l0 = cross(p1 - point, p2 - point) / two_area;
    double l1 = cross(p2 - point, p0 - point) / two_area;
    double l2 = cross(p0 - point, p1 - point) / two_area;
    if (l0 >= -kTol && l1 >= -kTol && l2 >= -kTol) {
      const auto& vv = mesh.triangles[t].v;
      return l0 * f.values[vv[0]] + l1 * f.values[vv[1]] + l2 * f.values[vv[2]];
    }
  }
  throw std::domain_error("evaluate: point outside mesh");
}

}  // namespace afem
