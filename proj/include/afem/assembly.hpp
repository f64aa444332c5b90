#pragma once

#include <Eigen/Sparse>
#include <optional>
#include <span>
#include <vector>

#include "afem/model.hpp"
#include "afem/space.hpp"

namespace afem {

// Symmetric sparse matrix on the free dofs, stored in full symmetric form.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;
  explicit SparseSymMatrix(Eigen::SparseMatrix<double> m) : mat_(std::move(m)) {}

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Eigen::SparseMatrix<double>& eigen() const { return mat_; }

  double quadratic_form(std::span<const double> x) const;
  std::vector<double> apply(std::span<const double> x) const;
  double max_asymmetry() const;

 private:
  Eigen::SparseMatrix<double> mat_;
};

// Symmetric 6-point element rule (degree-4 exact) in barycentric
// coordinates, plus a 3-point Gauss rule on [0,1] for edges. Weights are
// normalized to the reference measure 1.
struct QuadratureRule {
  struct BaryPoint {
    double l0, l1, l2, w;
  };
  std::vector<BaryPoint> element;
  std::vector<std::pair<double, double>> edge;  // (point in [0,1], weight)

  static const QuadratureRule& standard();
};

SparseSymMatrix assemble_scalar_product(const Mesh& mesh, const DofMap& dofs,
                                        ScalarProductSpec spec,
                                        const ProblemSpec& problem,
                                        const FeFunction* w = nullptr);

// b_i = (f, phi_i) + (fvec - mu(|grad w|^2) grad w, grad phi_i)
//       + (phi_N, phi_i)_{Gamma_N}, restricted to free dofs.
std::vector<double> assemble_residual(const Mesh& mesh, const DofMap& dofs,
                                      const ProblemSpec& problem,
                                      const FeFunction& w);

double energy_norm(const SparseSymMatrix& M, std::span<const double> x);

// sqrt(sum_T int_T |grad u*(x) - grad u_T|^2 dx) by element quadrature.
double h1_error(const Mesh& mesh, const FeFunction& u,
                const std::function<Vec2(Vec2)>& exact_gradient);

}  // namespace afem
