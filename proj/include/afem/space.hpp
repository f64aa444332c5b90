#pragma once

#include <cstdint>
#include <vector>

#include "afem/mesh.hpp"

namespace afem {

// Lowest-order Lagrange dofs: one per vertex, vertices on Dirichlet edges
// constrained to zero.
struct DofMap {
  std::vector<int> vertex_to_dof;  // -1 for constrained vertices
  int n_free = 0;
};

DofMap build_dof_map(const Mesh& mesh);

// P1 function given by one coefficient per vertex; constrained entries are 0.
struct FeFunction {
  std::uint64_t mesh_id = 0;
  std::vector<double> values;

  static FeFunction zero(const Mesh& mesh);
};

// Scatter a free-dof vector into a full coefficient vector (and back).
FeFunction from_free_vector(const Mesh& mesh, const DofMap& dofs,
                            const std::vector<double>& x);
std::vector<double> to_free_vector(const DofMap& dofs, const FeFunction& f);

// Pointwise-exact transfer onto a mesh produced from f's mesh by NVB calls.
FeFunction prolongate(const FeFunction& f, const Mesh& coarse,
                      const Mesh& fine);

Vec2 element_gradient(const Mesh& mesh, const FeFunction& f, int t);

double evaluate(const Mesh& mesh, const FeFunction& f, Vec2 point);

}  // namespace afem
