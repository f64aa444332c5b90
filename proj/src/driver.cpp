#include "afem/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace afem {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::MaxDofs: return "max_dofs";
    case Termination::ErrorTol: return "error_tol";
    case Termination::LuckyBreakdown: return "lucky_breakdown";
    case Termination::InnerCap: return "inner_cap";
  }
  return "?";
}

ZarantonelloStep zarantonello_step(const Mesh& mesh, const DofMap& dofs,
                                   const SparseSymMatrix& M,
                                   const SpdSolver& solver,
                                   const ProblemSpec& problem, double delta,
                                   const FeFunction& u_prev,
                                   double solver_rtol) {
  std::vector<double> b = assemble_residual(mesh, dofs, problem, u_prev);
  std::vector<double> zvec = solver.solve(b, solver_rtol);
  ZarantonelloStep step;
  step.z_norm = energy_norm(M, zvec);
  step.z = from_free_vector(mesh, dofs, zvec);
  step.u_next = u_prev;
  for (std::size_t i = 0; i < step.u_next.values.size(); ++i)
    step.u_next.values[i] += delta * step.z.values[i];
  return step;
}

std::vector<int> doerfler_mark(const IndicatorField& ind, double theta) {
  if (!(theta > 0.0 && theta <= 1.0))
    throw std::invalid_argument("doerfler_mark: theta must be in (0, 1]");
  const int n = static_cast<int>(ind.squared.size());
  if (theta == 1.0) {
    // Uniform refinement: mark everything, not just the Doerfler subset.
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return ind.squared[a] > ind.squared[b];
  });
  double target = theta * ind.total_squared();
  std::vector<int> marked;
  double acc = 0.0;
  for (int t : order) {
    if (acc >= target) break;
    marked.push_back(t);
    acc += ind.squared[t];
  }
  return marked;
}

namespace {

struct LevelState {
  Mesh mesh;
  DofMap dofs;
  FeFunction u;
};

}  // namespace

RunLog run(const ProblemSpec& problem, const AdaptiveParams& params) {
  if (!(params.theta > 0.0 && params.theta <= 1.0))
    throw std::invalid_argument("run: theta must be in (0, 1]");
  if (!(params.lambda > 0.0) || !(params.delta > 0.0))
    throw std::invalid_argument("run: lambda and delta must be positive");
  if (params.scalar_product == ScalarProductSpec::WeightedExact &&
      !problem.exact_gradient)
    throw std::invalid_argument("run: exact-weighted product needs exact_gradient");

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };

  RunLog log;
  log.params = params;
  log.problem_id = problem.id;

  Mesh mesh = build_initial_mesh(problem.domain);
  FeFunction u = FeFunction::zero(mesh);
  long abs_index = 0;
  long long cum_cost = 0;

  for (int level = 0;; ++level) {
    DofMap dofs = build_dof_map(mesh);
    const int n = dofs.n_free;

    SparseSymMatrix M;
    std::optional<SpdSolver> solver;
    const bool fixed_matrix =
        params.scalar_product != ScalarProductSpec::WeightedIterate;
    if (fixed_matrix) {
      M = assemble_scalar_product(mesh, dofs, params.scalar_product, problem);
      solver.emplace(M);
    }

    IndicatorField zind;
    bool stopped_inner = false;
    int k_final = 0;
    for (int k = 1; k <= params.max_inner; ++k) {
      if (!fixed_matrix) {
        M = assemble_scalar_product(mesh, dofs, params.scalar_product, problem,
                                    &u);
        solver.emplace(M);
      }
      ZarantonelloStep step = zarantonello_step(
          mesh, dofs, M, *solver, problem, params.delta, u, params.solver_rtol);
      zind = zeta_indicators(mesh, problem, params.scalar_product, u, step.z);
      double zeta = zind.total();
      FeFunction u_next = std::move(step.u_next);
      IndicatorField eind = eta_indicators(mesh, problem, u_next);

      IterationRecord rec;
      rec.level = level;
      rec.k = k;
      rec.abs_index = abs_index++;
      rec.ndofs = n;
      rec.zeta_total = zeta;
      rec.eta_total = eind.total();
      rec.z_norm = step.z_norm;
      rec.tildeZ = step.z_norm + zeta;
      if (problem.exact_gradient)
        rec.h1_error = h1_error(mesh, u_next, problem.exact_gradient);
      cum_cost += n;
      rec.cum_cost = cum_cost;
      rec.wall_time_s = elapsed();
      log.records.push_back(rec);

      u = std::move(u_next);
      k_final = k;

      if (step.z_norm == 0.0 && zeta == 0.0) {
        // Lucky breakdown: the exact solution is discrete on this mesh.
        log.levels.push_back({level, k, {}, 0.0, 0.0});
        log.termination = Termination::LuckyBreakdown;
        return log;
      }
      if (zeta > 0.0 && step.z_norm <= params.lambda * zeta) {
        stopped_inner = true;
        break;
      }
    }
    if (!stopped_inner) {
      log.levels.push_back({level, k_final, {}, 0.0, 0.0});
      log.termination = Termination::InnerCap;
      return log;
    }

    IndicatorField eta_final = eta_indicators(mesh, problem, u);
    std::vector<int> marked = doerfler_mark(zind, params.theta);
    double marked_sq = 0.0;
    for (int t : marked) marked_sq += eta_final.squared[t];
    log.levels.push_back(
        {level, k_final, marked, marked_sq, eta_final.total_squared()});

    if (params.error_tol && log.records.back().h1_error &&
        *log.records.back().h1_error <= *params.error_tol) {
      log.termination = Termination::ErrorTol;
      return log;
    }
    if (n > params.max_dofs) {
      log.termination = Termination::MaxDofs;
      return log;
    }

    Mesh fine = refine_nvb(mesh, marked);
    FeFunction u_fine = prolongate(u, mesh, fine);  // nested iteration
    mesh = std::move(fine);
    u = std::move(u_fine);
  }
}

FeFunction reference_discrete_solution(const Mesh& mesh,
                                       const ProblemSpec& problem,
                                       const AdaptiveParams& params,
                                       double tol_ref, int max_iter) {
  DofMap dofs = build_dof_map(mesh);
  const bool fixed_matrix =
      params.scalar_product != ScalarProductSpec::WeightedIterate;
  SparseSymMatrix M;
  std::optional<SpdSolver> solver;
  if (fixed_matrix) {
    M = assemble_scalar_product(mesh, dofs, params.scalar_product, problem);
    solver.emplace(M);
  }
  FeFunction u = FeFunction::zero(mesh);
  for (int k = 0; k < max_iter; ++k) {
    if (!fixed_matrix) {
      M = assemble_scalar_product(mesh, dofs, params.scalar_product, problem,
                                  &u);
      solver.emplace(M);
    }
    ZarantonelloStep step = zarantonello_step(
        mesh, dofs, M, *solver, problem, params.delta, u, params.solver_rtol);
    u = std::move(step.u_next);
    if (step.z_norm <= tol_ref) return u;
  }
  throw std::runtime_error("reference_discrete_solution: iteration cap exceeded");
}

std::vector<std::optional<double>> doerfler_monitor(const RunLog& log) {
  std::vector<std::optional<double>> out;
  out.reserve(log.levels.size());
  for (const auto& lvl : log.levels) {
    if (lvl.marked.empty() || lvl.eta_total_squared <= 0.0)
      out.push_back(std::nullopt);
    else
      out.push_back(lvl.eta_marked_squared / lvl.eta_total_squared);
  }
  return out;
}

}  // namespace afem
