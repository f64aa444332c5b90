#include "afem/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace afem {

SpdSolver::SpdSolver(const SparseSymMatrix& M) : mat_(M) {
  ldlt_.compute(M.eigen());
  if (ldlt_.info() != Eigen::Success)
    throw std::runtime_error("solve_spd: factorization failed (matrix not SPD?)");
  if ((ldlt_.vectorD().array() <= 0.0).any())
    throw std::runtime_error("solve_spd: matrix not positive definite");
}

std::vector<double> SpdSolver::solve(const std::vector<double>& b,
                                     double rtol) const {
  if (!(rtol > 0.0 && rtol < 1.0))
    throw std::invalid_argument("solve_spd: rtol must be in (0, 1)");
  if (static_cast<int>(b.size()) != mat_.dim())
    throw std::invalid_argument("solve_spd: dimension mismatch");
  if (b.empty()) return {};
  Eigen::Map<const Eigen::VectorXd> bv(b.data(), b.size());
  double bnorm = bv.norm();
  if (bnorm == 0.0) return std::vector<double>(b.size(), 0.0);
  Eigen::VectorXd x = ldlt_.solve(bv);
  // One step of iterative refinement if the direct solve is not tight enough.
  for (int iter = 0; iter < 3; ++iter) {
    Eigen::VectorXd r = bv - mat_.eigen() * x;
    if (r.norm() <= rtol * bnorm) break;
    x += ldlt_.solve(r).eval();
  }
  if ((bv - mat_.eigen() * x).norm() > rtol * bnorm)
    throw std::runtime_error("solve_spd: residual contract violated");
  return {x.data(), x.data() + x.size()};
}

std::vector<double> solve_spd(const SparseSymMatrix& M,
                              const std::vector<double>& b, double rtol) {
  return SpdSolver(M).solve(b, rtol);
}

}  // namespace afem
