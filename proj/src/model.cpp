#include "afem/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace afem {

Vec2 flux(const Nonlinearity& n, Vec2 xi) { return n.mu(dot(xi, xi)) * xi; }

GrowthEstimate check_growth(const Nonlinearity& n,
                            const std::vector<double>& t_samples, double tol) {
  if (t_samples.size() < 2)
    throw std::invalid_argument("check_growth: need at least 2 samples");
  auto g = [&](double t) { return n.mu(t * t) * t; };
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i + 1 < t_samples.size(); ++i) {
    double s = t_samples[i], t = t_samples[i + 1];
    if (!(t > s)) continue;
    double dd = (g(t) - g(s)) / (t - s);
    lo = std::min(lo, dd);
    hi = std::max(hi, dd);
    if (dd < n.alpha_tilde - tol || dd > n.L_tilde + tol) {
      std::ostringstream msg;
      msg << "growth condition violated on pair (" << s << ", " << t
          << "): divided difference " << dd << " outside ["
          << n.alpha_tilde << ", " << n.L_tilde << "]";
      throw std::runtime_error(msg.str());
    }
  }
  return {lo, hi};
}

double cq(double q) {
  if (!(q > 0.5)) throw std::invalid_argument("cq: requires q > 1/2");
  return 2.0 * std::pow((2.0 * q - 1.0) / (2.0 * (q + 1.0)), q + 1.0);
}

ProblemSpec benchmark1() {
  ProblemSpec p;
  p.id = "zshape";
  p.domain = DomainId::ZShape;
  p.nonlinearity.mu = [](double t) { return 1.0 + std::exp(-t); };
  p.nonlinearity.dmu = [](double t) { return -std::exp(-t); };
  p.nonlinearity.alpha_tilde = 1.0 - 2.0 * std::exp(-1.5);
  p.nonlinearity.L_tilde = 2.0;
  p.f = [](Vec2) { return 0.0; };
  // chi_omega (1,1)^T with omega = conv{(1,0),(1,1),(0,1)}; omega is a union
  // of triangles of every mesh in the hierarchy, so a centroid test decides
  // membership exactly.
  p.fvec = [](Vec2 x) -> Vec2 {
    return (x.x + x.y > 1.0) ? Vec2{1.0, 1.0} : Vec2{0.0, 0.0};
  };
  return p;
}

namespace {

struct Polar {
  double r;
  double phi;  // in (0, 3*pi/2) for the L-shaped domain
};

Polar to_polar(Vec2 x) {
  double r = norm(x);
  if (r == 0.0)
    throw std::domain_error("benchmark2: evaluation at the singular origin");
  double phi = std::atan2(x.y, x.x);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  return {r, phi};
}

}  // namespace

ProblemSpec benchmark2() {
  constexpr double tau = 0.01;
  constexpr double q = 11.0 / 20.0;
  const double c = cq(q);

  ProblemSpec p;
  p.id = "lshape";
  p.domain = DomainId::LShape;
  p.nonlinearity.mu = [=](double t) {
    return (c + tau) / (1.0 + c) + (1.0 - tau) / (1.0 + c) * std::pow(1.0 + t, -q);
  };
  p.nonlinearity.dmu = [=](double t) {
    return -q * (1.0 - tau) / (1.0 + c) * std::pow(1.0 + t, -q - 1.0);
  };
  p.nonlinearity.alpha_tilde = tau;
  p.nonlinearity.L_tilde = 1.0;

  const Nonlinearity nl = p.nonlinearity;
  // m(r) = mu(|grad u*|^2) with |grad u*| = (2/3) r^{-1/3}.
  auto m = [nl](double r) { return nl.mu((4.0 / 9.0) * std::pow(r, -2.0 / 3.0)); };
  auto dm = [nl](double r) {
    double g = (4.0 / 9.0) * std::pow(r, -2.0 / 3.0);
    double dg = -(8.0 / 27.0) * std::pow(r, -5.0 / 3.0);
    return nl.dmu(g) * dg;
  };

  p.exact_value = [](Vec2 x) {
    auto [r, phi] = to_polar(x);
    return std::pow(r, 2.0 / 3.0) * std::sin(2.0 * phi / 3.0);
  };
  p.exact_gradient = [](Vec2 x) -> Vec2 {
    auto [r, phi] = to_polar(x);
    double s = (2.0 / 3.0) * std::pow(r, -1.0 / 3.0);
    double sp = std::sin(2.0 * phi / 3.0), cp = std::cos(2.0 * phi / 3.0);
    Vec2 er{std::cos(phi), std::sin(phi)};
    Vec2 ephi{-std::sin(phi), std::cos(phi)};
    return s * (sp * er + cp * ephi);
  };
  // u* is harmonic, so f = -grad m . grad u* = -m'(r) du*/dr.
  p.f = [m, dm](Vec2 x) {
    auto [r, phi] = to_polar(x);
    return -dm(r) * (2.0 / 3.0) * std::pow(r, -1.0 / 3.0) *
           std::sin(2.0 * phi / 3.0);
  };
  p.fvec = [](Vec2) -> Vec2 { return {0.0, 0.0}; };
  auto grad = p.exact_gradient;
  p.neumann = [m, grad](Vec2 x, Vec2 n) {
    double r = norm(x);
    return m(r) * dot(grad(x), n);
  };
  return p;
}

}  // namespace afem
