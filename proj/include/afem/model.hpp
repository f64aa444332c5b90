#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "afem/geometry.hpp"
#include "afem/mesh.hpp"

namespace afem {

// Scalar nonlinearity mu with its growth-condition constants:
// alpha_tilde <= d/dt[mu(t^2) t] <= L_tilde for all t >= 0.
struct Nonlinearity {
  std::function<double(double)> mu;
  std::function<double(double)> dmu;
  double alpha_tilde = 0.0;
  double L_tilde = 0.0;
};

// Flux F(xi) = mu(|xi|^2) xi.
Vec2 flux(const Nonlinearity& n, Vec2 xi);

struct GrowthEstimate {
  double alpha_est;
  double L_est;
};

// Min/max divided differences of t -> mu(t^2) t over consecutive sample
// pairs. Throws if a divided difference leaves [alpha_tilde, L_tilde] by more
// than tol, naming the offending pair.
GrowthEstimate check_growth(const Nonlinearity& n,
                            const std::vector<double>& t_samples,
                            double tol = 1e-6);

enum class ScalarProductSpec { H1, WeightedExact, WeightedIterate };

struct ProblemSpec {
  std::string id;
  DomainId domain = DomainId::ZShape;
  Nonlinearity nonlinearity;
  std::function<double(Vec2)> f;
  std::function<Vec2(Vec2)> fvec;  // elementwise constant on every mesh
  // Neumann datum phi(x, n) on Gamma_N, or absent.
  std::function<double(Vec2, Vec2)> neumann;
  std::function<Vec2(Vec2)> exact_gradient;  // or absent
  std::function<double(Vec2)> exact_value;   // or absent
};

ProblemSpec benchmark1();
ProblemSpec benchmark2();

// c_q = 2((2q-1)/(2(q+1)))^{q+1}; requires q > 1/2.
double cq(double q);

}  // namespace afem
