#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "afem/model.hpp"
#include "afem/report.hpp"

namespace {

afem::ScalarProductSpec parse_scalar_product(const std::string& s) {
  if (s == "h1") return afem::ScalarProductSpec::H1;
  if (s == "mu") return afem::ScalarProductSpec::WeightedExact;
  if (s == "iterate") return afem::ScalarProductSpec::WeightedIterate;
  throw CLI::ValidationError("--scalar-product must be h1, mu, or iterate");
}

void print_summary(const afem::RunLog& log) {
  using afem::fit_rate;
  auto finals = afem::final_iterates(log);
  std::printf("problem: %s\n", log.problem_id.c_str());
  std::printf("termination: %s\n", afem::to_string(log.termination));
  if (!log.records.empty()) {
    const auto& last = log.records.back();
    std::printf("final level %d, dofs %d, steps %ld, cum_cost %lld\n",
                last.level, last.ndofs, last.abs_index + 1, last.cum_cost);
  }
  std::printf("k_underbar per level:");
  for (const auto& lvl : log.levels) std::printf(" %d", lvl.k_final);
  std::printf("\n");

  if (finals.size() >= 3) {
    std::vector<double> dofs, zeta, err;
    for (const auto& r : finals) {
      dofs.push_back(r.ndofs);
      zeta.push_back(r.zeta_total);
      if (r.h1_error) err.push_back(*r.h1_error);
    }
    int window = std::min<int>(8, static_cast<int>(finals.size()));
    try {
      auto fit = fit_rate(dofs, zeta, window);
      std::printf("zeta rate vs dofs (last %d levels): %.3f\n", fit.window,
                  fit.slope);
    } catch (const std::exception&) {
    }
    if (err.size() == finals.size()) {
      try {
        auto fit = fit_rate(dofs, err, window);
        std::printf("H1-error rate vs dofs (last %d levels): %.3f\n",
                    fit.window, fit.slope);
      } catch (const std::exception&) {
      }
      std::printf("weighted cost: %.4f\n", afem::weighted_cost(log));
    }
  }
}

double average_k_last3(const afem::RunLog& log) {
  int n = static_cast<int>(log.levels.size());
  int cnt = std::min(3, n);
  double s = 0.0;
  for (int i = n - cnt; i < n; ++i) s += log.levels[i].k_final;
  return cnt > 0 ? s / cnt : 0.0;
}

int run_sweep(const afem::AdaptiveParams& base, const std::string& output) {
  const std::vector<double> lambdas = {0.01, 0.05, 0.1, 0.5, 1.0};
  const std::vector<double> deltas = {0.1, 0.5, 1.0, 1.5};
  const std::vector<std::pair<std::string, afem::ScalarProductSpec>> products = {
      {"h1", afem::ScalarProductSpec::H1},
      {"mu", afem::ScalarProductSpec::WeightedExact},
      {"iterate", afem::ScalarProductSpec::WeightedIterate}};

  std::ofstream out;
  if (!output.empty()) {
    out.open(output);
    if (!out) {
      std::fprintf(stderr, "cannot open %s\n", output.c_str());
      return 3;
    }
    out << "scalar_product,lambda,delta,weighted_cost,avg_k_last3\n";
  }
  afem::ProblemSpec problem = afem::benchmark2();
  for (const auto& [name, spec] : products) {
    for (double lambda : lambdas) {
      for (double delta : deltas) {
        afem::AdaptiveParams p = base;
        p.scalar_product = spec;
        p.lambda = lambda;
        p.delta = delta;
        if (!p.error_tol) p.error_tol = 1e-2;
        afem::RunLog log = afem::run(problem, p);
        double wc = afem::weighted_cost(log);
        double ak = average_k_last3(log);
        std::printf("%-8s lambda=%-5g delta=%-4g weighted_cost=%8.3f avg_k=%6.2f\n",
                    name.c_str(), lambda, delta, wc, ak);
        if (out) out << name << ',' << lambda << ',' << delta << ',' << wc
                     << ',' << ak << '\n';
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive iterative Galerkin solver for quasilinear elliptic PDEs"};
  app.get_formatter()->column_width(34);

  std::string benchmark;
  std::string scalar_product = "h1";
  std::string output;
  afem::AdaptiveParams params;
  params.max_dofs = 100000;
  double error_tol = 0.0;
  bool sweep = false;

  app.add_option("--benchmark", benchmark, "Problem: zshape or lshape")
      ->check(CLI::IsMember({"zshape", "lshape"}));
  app.add_option("--theta", params.theta, "Bulk parameter in (0,1]; 1 = uniform");
  app.add_option("--lambda", params.lambda, "Linearization stopping parameter");
  app.add_option("--delta", params.delta, "Zarantonello damping parameter");
  app.add_option("--scalar-product", scalar_product, "h1, mu, or iterate");
  app.add_option("--max-dofs", params.max_dofs, "Stop once dofs exceed this");
  app.add_option("--error-tol", error_tol, "Stop once the H1 error drops below");
  app.add_option("--solver-rtol", params.solver_rtol, "Linear solver tolerance");
  app.add_option("--output", output, "CSV output path");
  app.add_flag("--sweep", sweep, "Run the lambda/delta/scalar-product grid");

  try {
    app.parse(argc, argv);
    params.scalar_product = parse_scalar_product(scalar_product);
    if (error_tol > 0.0) params.error_tol = error_tol;

    if (sweep) return run_sweep(params, output);

    if (benchmark.empty()) {
      std::cerr << "error: --benchmark is required\n" << app.help();
      return 2;
    }
    afem::ProblemSpec problem =
        benchmark == "zshape" ? afem::benchmark1() : afem::benchmark2();
    if (benchmark == "zshape" &&
        params.scalar_product == afem::ScalarProductSpec::WeightedExact) {
      std::cerr << "error: zshape has no exact solution; --scalar-product mu "
                   "is unavailable\n";
      return 2;
    }
    afem::RunLog log = afem::run(problem, params);
    if (!output.empty()) afem::emit_csv(log, output);
    print_summary(log);
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
