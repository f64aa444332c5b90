#pragma once

#include <functional>
#include <span>
#include <vector>

#include "afem/assembly.hpp"

namespace afem {

// Per-triangle squared indicator values.
struct IndicatorField {
  std::vector<double> squared;

  double total_squared() const;
  double total() const;
};

double restrict_total(const IndicatorField& ind, std::span<const int> subset);

namespace detail {

using ElementFluxFn = std::function<Vec2(int t, Vec2 x)>;
using ElementScalarFn = std::function<double(int t, Vec2 x)>;
using NeumannMisfitFn = std::function<double(int t, Vec2 x, Vec2 n)>;

// Shared residual-indicator skeleton:
// ind[T] = |T| ||vol_integrand||^2_{L2(T)}
//          + |T|^{1/2} ||[[flux . n]]||^2_{L2(dT cap Omega)}
//          + |T|^{1/2} ||neumann_misfit||^2_{L2(dT cap Gamma_N)}.
// Interior edges contribute their full jump integral to both neighbors.
IndicatorField residual_indicators(const Mesh& mesh,
                                   const ElementFluxFn& flux_at,
                                   const ElementScalarFn& vol_integrand,
                                   const NeumannMisfitFn& neumann_misfit);

}  // namespace detail

// Standard residual estimator for the nonlinear problem at iterate v.
IndicatorField eta_indicators(const Mesh& mesh, const ProblemSpec& problem,
                              const FeFunction& v);

// Elliptic-reconstruction estimator for the linearized problem: w is the
// linearization point, z the discrete update, spec the scalar product whose
// matrix produced z.
IndicatorField zeta_indicators(const Mesh& mesh, const ProblemSpec& problem,
                               ScalarProductSpec spec, const FeFunction& w,
                               const FeFunction& z);

}  // namespace afem
