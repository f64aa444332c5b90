#include "afem/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace afem {

double IndicatorField::total_squared() const {
  double s = 0.0;
  for (double v : squared) s += v;
  return s;
}

double IndicatorField::total() const { return std::sqrt(total_squared()); }

double restrict_total(const IndicatorField& ind, std::span<const int> subset) {
  double s = 0.0;
  for (int t : subset) {
    if (t < 0 || t >= static_cast<int>(ind.squared.size()))
      throw std::out_of_range("restrict_total: bad triangle index");
    s += ind.squared[t];
  }
  return std::sqrt(s);
}

namespace detail {

IndicatorField residual_indicators(const Mesh& mesh,
                                   const ElementFluxFn& flux_at,
                                   const ElementScalarFn& vol_integrand,
                                   const NeumannMisfitFn& neumann_misfit) {
  const auto& rule = QuadratureRule::standard();
  IndicatorField ind;
  ind.squared.assign(mesh.num_triangles(), 0.0);

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Vec2 p0 = mesh.vertex_pos(t, 0), p1 = mesh.vertex_pos(t, 1),
         p2 = mesh.vertex_pos(t, 2);
    double area = mesh.triangles[t].area;
    double h = std::sqrt(area);

    double vol = 0.0;
    for (const auto& q : rule.element) {
      Vec2 x = q.l0 * p0 + q.l1 * p1 + q.l2 * p2;
      double v = vol_integrand(t, x);
      vol += q.w * v * v;
    }
    double acc = area * (area * vol);  // |T| * ||...||^2_{L2(T)}

    for (int e = 0; e < 3; ++e) {
      const auto& adj = mesh.edge_adjacency[t][e];
      if (adj.label == BoundaryLabel::Dirichlet) continue;
      Vec2 pa = mesh.vertex_pos(t, (e + 1) % 3);
      Vec2 pb = mesh.vertex_pos(t, (e + 2) % 3);
      double len = norm(pb - pa);
      Vec2 n = (1.0 / len) * perp(pb - pa);
      double edge_sq = 0.0;
      if (adj.label == BoundaryLabel::Interior) {
        int s = adj.neighbor;
        for (const auto& [pt, qw] : rule.edge) {
          Vec2 x = (1.0 - pt) * pa + pt * pb;
          double jump = dot(flux_at(t, x) - flux_at(s, x), n);
          edge_sq += qw * jump * jump;
        }
      } else {  // Neumann
        for (const auto& [pt, qw] : rule.edge) {
          Vec2 x = (1.0 - pt) * pa + pt * pb;
          double misfit = neumann_misfit(t, x, n);
          edge_sq += qw * misfit * misfit;
        }
      }
      acc += h * (len * edge_sq);
    }
    ind.squared[t] = acc;
  }
  return ind;
}

}  // namespace detail

namespace {

std::vector<Vec2> nonlinear_fluxes(const Mesh& mesh, const ProblemSpec& problem,
                                   const FeFunction& v) {
  std::vector<Vec2> p(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Vec2 g = element_gradient(mesh, v, t);
    Vec2 fv = problem.fvec ? problem.fvec(mesh.centroid(t)) : Vec2{0.0, 0.0};
    p[t] = flux(problem.nonlinearity, g) - fv;
  }
  return p;
}

double scalar_weight(const ProblemSpec& problem, Vec2 x) {
  Vec2 g = problem.exact_gradient(x);
  return problem.nonlinearity.mu(dot(g, g));
}

}  // namespace

IndicatorField eta_indicators(const Mesh& mesh, const ProblemSpec& problem,
                              const FeFunction& v) {
  if (v.mesh_id != mesh.id)
    throw std::invalid_argument("eta_indicators: function/mesh mismatch");
  auto p = nonlinear_fluxes(mesh, problem, v);
  auto flux_at = [&](int t, Vec2) { return p[t]; };
  auto vol = [&](int t, Vec2 x) { return problem.f ? problem.f(x) : 0.0; };
  auto neu = [&](int t, Vec2 x, Vec2 n) {
    double phi = problem.neumann ? problem.neumann(x, n) : 0.0;
    return phi - dot(p[t], n);
  };
  return detail::residual_indicators(mesh, flux_at, vol, neu);
}

IndicatorField zeta_indicators(const Mesh& mesh, const ProblemSpec& problem,
                               ScalarProductSpec spec, const FeFunction& w,
                               const FeFunction& z) {
  if (w.mesh_id != mesh.id || z.mesh_id != mesh.id)
    throw std::invalid_argument("zeta_indicators: function/mesh mismatch");
  auto p = nonlinear_fluxes(mesh, problem, w);

  std::vector<Vec2> gz(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t)
    gz[t] = element_gradient(mesh, z, t);

  // Elementwise-constant diffusion for H1 and the iterate weight; the exact
  // weight varies inside elements.
  std::vector<double> const_weight;
  if (spec != ScalarProductSpec::WeightedExact) {
    const_weight.resize(mesh.num_triangles(), 1.0);
    if (spec == ScalarProductSpec::WeightedIterate) {
      for (int t = 0; t < mesh.num_triangles(); ++t) {
        Vec2 gw = element_gradient(mesh, w, t);
        const_weight[t] = problem.nonlinearity.mu(dot(gw, gw));
      }
    }
  }

  auto a_grad_z = [&](int t, Vec2 x) -> Vec2 {
    if (spec == ScalarProductSpec::WeightedExact)
      return scalar_weight(problem, x) * gz[t];
    return const_weight[t] * gz[t];
  };
  auto flux_at = [&](int t, Vec2 x) { return a_grad_z(t, x) + p[t]; };
  auto vol = [&](int t, Vec2 x) {
    double fval = problem.f ? problem.f(x) : 0.0;
    if (spec != ScalarProductSpec::WeightedExact) return fval;
    // div(A grad z) = grad(weight) . grad z for P1; central differences of
    // the weight (the exact-solution weight has no generic closed form).
    const double h = 1e-6;
    double dwx = (scalar_weight(problem, {x.x + h, x.y}) -
                  scalar_weight(problem, {x.x - h, x.y})) /
                 (2.0 * h);
    double dwy = (scalar_weight(problem, {x.x, x.y + h}) -
                  scalar_weight(problem, {x.x, x.y - h})) /
                 (2.0 * h);
    return fval + dot(Vec2{dwx, dwy}, gz[t]);
  };
  auto neu = [&](int t, Vec2 x, Vec2 n) {
    double phi = problem.neumann ? problem.neumann(x, n) : 0.0;
    return phi - dot(flux_at(t, x), n);
  };
  return detail::residual_indicators(mesh, flux_at, vol, neu);
}

}  // namespace afem
