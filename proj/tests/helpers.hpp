#pragma once

// Shared fixtures and test-only oracles for the unit and acceptance suites.

#include <random>
#include <vector>

#include "afem/driver.hpp"
#include "afem/estimators.hpp"
#include "afem/model.hpp"
#include "afem/space.hpp"

namespace testutil {

// Unit square split along the diagonal (0,0)-(1,1):
//   3 ---- 2
//   |  T1/ |
//   | / T0 |
//   0 ---- 1
inline afem::Mesh unit_square_mesh(
    afem::BoundaryLabel border = afem::BoundaryLabel::Dirichlet) {
  std::vector<afem::Vertex> verts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {0, 2, 3}};
  afem::EdgeLabelMap labels;
  labels[{0, 1}] = border;
  labels[{1, 2}] = border;
  labels[{2, 3}] = border;
  labels[{0, 3}] = border;
  return afem::make_mesh(std::move(verts), tris, labels);
}

// Nodal coefficients drawn uniformly from [-1, 1], zero on Dirichlet
// vertices so the function lies in the discrete space.
inline afem::FeFunction random_fe_function(const afem::Mesh& mesh,
                                           std::mt19937_64& rng,
                                           double amplitude = 1.0) {
  auto dofs = afem::build_dof_map(mesh);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  afem::FeFunction f = afem::FeFunction::zero(mesh);
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (dofs.vertex_to_dof[v] >= 0) f.values[v] = dist(rng);
  return f;
}

// Test-only reconstruction estimator written directly from its defining
// formula: for v = w + delta*z it must reproduce delta * zeta(w; T, z)
// elementwise. Kept independent of zeta_indicators' internals apart from the
// shared residual skeleton.
inline afem::IndicatorField cw_indicators(const afem::Mesh& mesh,
                                          const afem::ProblemSpec& problem,
                                          afem::ScalarProductSpec spec,
                                          const afem::FeFunction& w,
                                          const afem::FeFunction& v,
                                          double delta) {
  using afem::Vec2;
  int nt = mesh.num_triangles();
  std::vector<Vec2> gd(nt), pw(nt);
  std::vector<double> a_const(nt, 1.0);
  for (int t = 0; t < nt; ++t) {
    Vec2 gw = afem::element_gradient(mesh, w, t);
    gd[t] = afem::element_gradient(mesh, v, t) - gw;
    Vec2 fv = problem.fvec ? problem.fvec(mesh.centroid(t)) : Vec2{0.0, 0.0};
    pw[t] = afem::flux(problem.nonlinearity, gw) - fv;
    if (spec == afem::ScalarProductSpec::WeightedIterate)
      a_const[t] = problem.nonlinearity.mu(dot(gw, gw));
  }
  auto weight = [&](Vec2 x) {
    Vec2 g = problem.exact_gradient(x);
    return problem.nonlinearity.mu(dot(g, g));
  };
  auto a_grad_d = [&](int t, Vec2 x) -> Vec2 {
    if (spec == afem::ScalarProductSpec::WeightedExact)
      return weight(x) * gd[t];
    return a_const[t] * gd[t];
  };
  auto flux_at = [&](int t, Vec2 x) {
    return a_grad_d(t, x) + delta * pw[t];
  };
  auto vol = [&](int t, Vec2 x) {
    double fval = problem.f ? problem.f(x) : 0.0;
    double div_a = 0.0;
    if (spec == afem::ScalarProductSpec::WeightedExact) {
      const double h = 1e-6;
      double dwx = (weight({x.x + h, x.y}) - weight({x.x - h, x.y})) / (2.0 * h);
      double dwy = (weight({x.x, x.y + h}) - weight({x.x, x.y - h})) / (2.0 * h);
      div_a = dot(Vec2{dwx, dwy}, gd[t]);
    }
    return -div_a - delta * fval;
  };
  auto neu = [&](int t, Vec2 x, Vec2 n) {
    double phi = problem.neumann ? problem.neumann(x, n) : 0.0;
    return delta * phi - dot(flux_at(t, x), n);
  };
  return afem::detail::residual_indicators(mesh, flux_at, vol, neu);
}

// Exhaustive minimal-cardinality Doerfler search over all subsets.
inline int brute_force_doerfler(const std::vector<double>& squared,
                                double theta) {
  int n = static_cast<int>(squared.size());
  double total = 0.0;
  for (double s : squared) total += s;
  int best = n;
  for (int mask = 0; mask < (1 << n); ++mask) {
    double acc = 0.0;
    int card = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) {
        acc += squared[i];
        ++card;
      }
    if (acc >= theta * total && card < best) best = card;
  }
  return best;
}

}  // namespace testutil
