#pragma once

#include <Eigen/SparseCholesky>
#include <memory>
#include <vector>

#include "afem/assembly.hpp"

namespace afem {

// Deterministic SPD solve via sparse Cholesky, with the residual contract
// ||Mx - b||_2 <= rtol ||b||_2 checked on every call. A factorization can be
// reused across right-hand sides on a fixed matrix.
class SpdSolver {
 public:
  explicit SpdSolver(const SparseSymMatrix& M);

  std::vector<double> solve(const std::vector<double>& b,
                            double rtol = 1e-10) const;

 private:
  SparseSymMatrix mat_;  // owned copy so the factorization cannot dangle
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

std::vector<double> solve_spd(const SparseSymMatrix& M,
                              const std::vector<double>& b, double rtol);

}  // namespace afem
