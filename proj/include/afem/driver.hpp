#pragma once

#include <optional>
#include <string>
#include <vector>

#include "afem/estimators.hpp"
#include "afem/solver.hpp"

namespace afem {

struct AdaptiveParams {
  double theta = 0.5;       // bulk parameter in (0, 1]; 1 = uniform refinement
  double lambda = 0.1;      // linearization stopping parameter
  double delta = 0.1;       // Zarantonello damping
  ScalarProductSpec scalar_product = ScalarProductSpec::H1;
  int max_dofs = 10000;
  int max_inner = 500;
  std::optional<double> error_tol;  // H1-error stopping threshold
  double solver_rtol = 1e-10;
};

enum class Termination { MaxDofs, ErrorTol, LuckyBreakdown, InnerCap };

const char* to_string(Termination t);

struct IterationRecord {
  int level = 0;
  int k = 0;
  long abs_index = 0;  // |l,k|, consecutive over the whole run
  int ndofs = 0;
  double zeta_total = 0.0;   // zeta_l(u^{k-1}; z^k)
  double eta_total = 0.0;    // eta_l(u^k), recorded for monitoring
  double z_norm = 0.0;       // ||z^k||_a
  double tildeZ = 0.0;       // ||z^k||_a + zeta
  std::optional<double> h1_error;
  long long cum_cost = 0;  // sum of ndofs over all steps so far
  double wall_time_s = 0.0;
};

struct LevelSummary {
  int level = 0;
  int k_final = 0;                  // k_underbar[l]
  std::vector<int> marked;          // Doerfler set (empty on the last level)
  double eta_marked_squared = 0.0;  // eta_l(M_l, u^{k_final})^2
  double eta_total_squared = 0.0;   // eta_l(u^{k_final})^2
};

struct RunLog {
  AdaptiveParams params;
  std::string problem_id;
  std::vector<IterationRecord> records;
  std::vector<LevelSummary> levels;
  Termination termination = Termination::MaxDofs;
};

// One Zarantonello update on an assembled scalar product: z solves
// a(z, v) = <F - A u_prev, v>, u_next = u_prev + delta z.
struct ZarantonelloStep {
  FeFunction z;
  FeFunction u_next;
  double z_norm = 0.0;
};
ZarantonelloStep zarantonello_step(const Mesh& mesh, const DofMap& dofs,
                                   const SparseSymMatrix& M,
                                   const SpdSolver& solver,
                                   const ProblemSpec& problem, double delta,
                                   const FeFunction& u_prev,
                                   double solver_rtol = 1e-10);

// Minimal-cardinality Doerfler marking (greedy on descending indicators,
// ties by triangle index); theta = 1 marks all triangles.
std::vector<int> doerfler_mark(const IndicatorField& ind, double theta);

RunLog run(const ProblemSpec& problem, const AdaptiveParams& params);

// Zarantonello fixed-point iteration on a fixed mesh until ||z||_a <= tol_ref.
FeFunction reference_discrete_solution(const Mesh& mesh,
                                       const ProblemSpec& problem,
                                       const AdaptiveParams& params,
                                       double tol_ref,
                                       int max_iter = 100000);

// Measured marking ratio eta_l(M_l, u^{k_final})^2 / eta_l(u^{k_final})^2 per
// level; absent where the total estimator vanishes or no marking happened.
std::vector<std::optional<double>> doerfler_monitor(const RunLog& log);

}  // namespace afem
