#include <doctest.h>

#include <cmath>
#include <random>

#include "afem/driver.hpp"
#include "helpers.hpp"

using namespace afem;

namespace {

ProblemSpec linear_poisson() {
  ProblemSpec p;
  p.id = "poisson";
  p.domain = DomainId::ZShape;
  p.nonlinearity.mu = [](double) { return 1.0; };
  p.nonlinearity.dmu = [](double) { return 0.0; };
  p.nonlinearity.alpha_tilde = 1.0;
  p.nonlinearity.L_tilde = 1.0;
  p.f = [](Vec2) { return 1.0; };
  return p;
}

double b1_delta() {
  auto p = benchmark1();
  return p.nonlinearity.alpha_tilde /
         (p.nonlinearity.L_tilde * p.nonlinearity.L_tilde);
}

}  // namespace

TEST_CASE("linear problems converge in a single undamped step") {
  ProblemSpec p = linear_poisson();
  Mesh m = build_initial_mesh(DomainId::ZShape);
  DofMap dofs = build_dof_map(m);
  SparseSymMatrix M = assemble_scalar_product(m, dofs, ScalarProductSpec::H1, p);
  SpdSolver solver(M);

  FeFunction u0 = FeFunction::zero(m);
  auto s1 = zarantonello_step(m, dofs, M, solver, p, 1.0, u0);
  CHECK(s1.z_norm > 0.0);
  auto s2 = zarantonello_step(m, dofs, M, solver, p, 1.0, s1.u_next);
  CHECK(s2.z_norm <= 1e-9 * s1.z_norm);
}

TEST_CASE("one step from zero scales the iterate by delta") {
  auto p = benchmark1();
  Mesh m = build_initial_mesh(DomainId::ZShape);
  DofMap dofs = build_dof_map(m);
  SparseSymMatrix M = assemble_scalar_product(m, dofs, ScalarProductSpec::H1, p);
  SpdSolver solver(M);
  double delta = b1_delta();
  auto s = zarantonello_step(m, dofs, M, solver, p, delta, FeFunction::zero(m));
  auto xu = to_free_vector(dofs, s.u_next);
  CHECK(energy_norm(M, xu) ==
        doctest::Approx(delta * s.z_norm).epsilon(1e-12));
}

TEST_CASE("the step is a no-op at the discrete solution") {
  auto p = benchmark1();
  Mesh m = uniform_refine(build_initial_mesh(DomainId::ZShape));
  AdaptiveParams params;
  params.delta = b1_delta();
  FeFunction ustar = reference_discrete_solution(m, p, params, 1e-12);
  DofMap dofs = build_dof_map(m);
  SparseSymMatrix M = assemble_scalar_product(m, dofs, ScalarProductSpec::H1, p);
  SpdSolver solver(M);
  auto s = zarantonello_step(m, dofs, M, solver, p, params.delta, ustar);
  CHECK(s.z_norm <= 1e-11);
}

TEST_CASE("fixed-mesh iteration contracts at the predicted rate") {
  auto p = benchmark1();
  Mesh m = build_initial_mesh(DomainId::ZShape);
  for (int i = 0; i < 2; ++i) m = uniform_refine(m);
  AdaptiveParams params;
  params.delta = b1_delta();
  FeFunction ustar = reference_discrete_solution(m, p, params, 1e-12);

  DofMap dofs = build_dof_map(m);
  SparseSymMatrix M = assemble_scalar_product(m, dofs, ScalarProductSpec::H1, p);
  SpdSolver solver(M);
  double alpha = p.nonlinearity.alpha_tilde, L = p.nonlinearity.L_tilde;
  double q_ctr = std::sqrt(1.0 - alpha * alpha / (L * L));

  auto error_norm = [&](const FeFunction& u) {
    auto xu = to_free_vector(dofs, u);
    auto xs = to_free_vector(dofs, ustar);
    for (int i = 0; i < dofs.n_free; ++i) xu[i] -= xs[i];
    return energy_norm(M, xu);
  };

  FeFunction u = FeFunction::zero(m);
  double prev = error_norm(u);
  for (int k = 0; k < 400 && prev > 1e-6; ++k) {
    u = zarantonello_step(m, dofs, M, solver, p, params.delta, u).u_next;
    double cur = error_norm(u);
    CHECK(cur / prev <= q_ctr + 0.02);
    prev = cur;
  }
  CHECK(prev <= 1e-6);
}

TEST_CASE("doerfler marking frozen cases") {
  IndicatorField ind;
  ind.squared = {4.0, 1.0, 1.0, 1.0, 1.0};
  auto m1 = doerfler_mark(ind, 0.5);
  CHECK(m1 == std::vector<int>{0});
  auto mall = doerfler_mark(ind, 1.0);
  CHECK(mall.size() == 5);

  IndicatorField eq;
  eq.squared = {1.0, 1.0, 1.0, 1.0};
  auto m2 = doerfler_mark(eq, 0.5);
  CHECK(m2 == std::vector<int>{0, 1});
}

TEST_CASE("greedy marking has brute-force minimal cardinality") {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::uniform_int_distribution<int> len(1, 12);
  for (int rep = 0; rep < 40; ++rep) {
    IndicatorField ind;
    ind.squared.resize(len(rng));
    for (double& s : ind.squared) s = dist(rng);
    for (double theta : {0.3, 0.5, 0.9}) {
      auto marked = doerfler_mark(ind, theta);
      double acc = 0.0;
      for (int t : marked) acc += ind.squared[t];
      CHECK(acc >= theta * ind.total_squared() * (1.0 - 1e-12));
      CHECK(static_cast<int>(marked.size()) ==
            testutil::brute_force_doerfler(ind.squared, theta));
    }
  }
}

TEST_CASE("zero data terminates by lucky breakdown with the zero solution") {
  ProblemSpec p = linear_poisson();
  p.f = [](Vec2) { return 0.0; };
  AdaptiveParams params;
  params.delta = 1.0;
  RunLog log = run(p, params);
  CHECK(log.termination == Termination::LuckyBreakdown);
  REQUIRE(log.records.size() == 1);
  CHECK(log.records[0].level == 0);
  CHECK(log.records[0].k == 1);
  CHECK(log.records[0].z_norm == 0.0);
  CHECK(log.records[0].zeta_total == 0.0);
}

TEST_CASE("a huge lambda stops every inner loop after one step") {
  auto p = benchmark1();
  AdaptiveParams params;
  params.delta = b1_delta();
  params.lambda = 1e6;
  params.max_dofs = 400;
  RunLog log = run(p, params);
  REQUIRE(!log.levels.empty());
  for (const auto& lvl : log.levels) CHECK(lvl.k_final == 1);
}

TEST_CASE("run log bookkeeping is self-consistent") {
  auto p = benchmark1();
  AdaptiveParams params;
  params.delta = b1_delta();
  params.lambda = 0.1;
  params.max_dofs = 1500;
  RunLog log = run(p, params);
  CHECK(log.termination == Termination::MaxDofs);
  REQUIRE(log.records.size() >= 5);

  long long cum = 0;
  long idx = 0;
  for (const auto& r : log.records) {
    CHECK(r.abs_index == idx++);
    cum += r.ndofs;
    CHECK(r.cum_cost == cum);
    CHECK(r.tildeZ == doctest::Approx(r.z_norm + r.zeta_total).epsilon(1e-15));
  }

  // stopping semantics: within each level, the criterion fails strictly
  // before the final step and holds at it
  REQUIRE(log.levels.size() >= 2);
  std::size_t pos = 0;
  for (const auto& lvl : log.levels) {
    int count = 0;
    for (; pos < log.records.size() && log.records[pos].level == lvl.level;
         ++pos) {
      const auto& r = log.records[pos];
      ++count;
      bool is_last = r.k == lvl.k_final;
      if (!is_last)
        CHECK(r.z_norm > params.lambda * r.zeta_total);
      else if (r.zeta_total > 0.0)
        CHECK(r.z_norm <= params.lambda * r.zeta_total);
    }
    CHECK(count == lvl.k_final);
  }
  CHECK(pos == log.records.size());
}

TEST_CASE("marking monitor stays in range") {
  auto p = benchmark1();
  AdaptiveParams params;
  params.delta = b1_delta();
  params.max_dofs = 1000;
  RunLog log = run(p, params);
  auto ratios = doerfler_monitor(log);
  REQUIRE(ratios.size() == log.levels.size());
  for (std::size_t i = 0; i + 1 < ratios.size(); ++i) {
    REQUIRE(ratios[i].has_value());
    CHECK(*ratios[i] > 0.0);
    CHECK(*ratios[i] <= 1.0 + 1e-12);
  }

  params.theta = 1.0;
  RunLog ulog = run(p, params);
  auto uratios = doerfler_monitor(ulog);
  for (std::size_t i = 0; i + 1 < uratios.size(); ++i) {
    REQUIRE(uratios[i].has_value());
    CHECK(*uratios[i] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("reference solution of the linear problem is the direct solve") {
  ProblemSpec p = linear_poisson();
  Mesh m = uniform_refine(build_initial_mesh(DomainId::ZShape));
  AdaptiveParams params;
  params.delta = 1.0;
  FeFunction u = reference_discrete_solution(m, p, params, 1e-12);

  DofMap dofs = build_dof_map(m);
  SparseSymMatrix M = assemble_scalar_product(m, dofs, ScalarProductSpec::H1, p);
  auto b = assemble_residual(m, dofs, p, FeFunction::zero(m));
  auto x = solve_spd(M, b, 1e-12);
  auto xu = to_free_vector(dofs, u);
  for (int i = 0; i < dofs.n_free; ++i) CHECK(std::abs(xu[i] - x[i]) < 1e-10);
}

TEST_CASE("the exact-weighted product needs two inner steps per level") {
  auto p = benchmark2();
  AdaptiveParams params;
  params.theta = 0.5;
  params.lambda = 0.1;
  params.delta = 1.5;
  params.scalar_product = ScalarProductSpec::WeightedExact;
  params.max_dofs = 3000;
  RunLog log = run(p, params);
  REQUIRE(log.levels.size() >= 5);
  for (std::size_t l = 1; l < log.levels.size(); ++l)
    CHECK(log.levels[l].k_final == 2);
}

TEST_CASE("quasi-error decays along the whole index set") {
  auto p = benchmark1();
  AdaptiveParams params;
  params.delta = b1_delta();
  params.max_dofs = 2000;
  RunLog log = run(p, params);
  double first = log.records.front().tildeZ;
  double last = log.records.back().tildeZ;
  CHECK(last < 0.5 * first);
}
