#include "afem/report.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace afem {

RateFit fit_rate(const std::vector<double>& xs, const std::vector<double>& ys,
                 int window) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("fit_rate: size mismatch");
  if (window > static_cast<int>(xs.size())) window = static_cast<int>(xs.size());
  if (window < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
  const int n = static_cast<int>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = n - window; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw std::invalid_argument("fit_rate: values must be positive");
    double lx = std::log10(xs[i]), ly = std::log10(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double denom = window * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_rate: degenerate abscissae");
  RateFit fit;
  fit.window = window;
  fit.slope = (window * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / window;
  double ss = 0.0;
  for (int i = n - window; i < n; ++i) {
    double r = std::log10(ys[i]) - (fit.intercept + fit.slope * std::log10(xs[i]));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / window);
  return fit;
}

std::vector<IterationRecord> final_iterates(const RunLog& log) {
  std::vector<IterationRecord> out;
  for (const auto& lvl : log.levels) {
    for (const auto& rec : log.records) {
      if (rec.level == lvl.level && rec.k == lvl.k_final) {
        out.push_back(rec);
        break;
      }
    }
  }
  return out;
}

double weighted_cost(const RunLog& log) {
  if (log.records.empty()) throw std::invalid_argument("weighted_cost: empty run");
  const auto& rec = log.records.back();
  if (!rec.h1_error)
    throw std::invalid_argument("weighted_cost: exact solution unknown");
  return *rec.h1_error * std::sqrt(static_cast<double>(rec.cum_cost));
}

void emit_csv(const RunLog& log, std::ostream& out) {
  out << "ell,k,abs_index,ndofs,zeta,eta,z_norm,tildeZ,h1_error,cum_cost,"
         "wall_time_s\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : log.records) {
    out << r.level << ',' << r.k << ',' << r.abs_index << ',' << r.ndofs << ','
        << num(r.zeta_total) << ',' << num(r.eta_total) << ','
        << num(r.z_norm) << ',' << num(r.tildeZ) << ','
        << (r.h1_error ? num(*r.h1_error) : std::string{}) << ','
        << r.cum_cost << ',' << num(r.wall_time_s) << '\n';
  }
}

void emit_csv(const RunLog& log, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("emit_csv: cannot open " + path);
  emit_csv(log, f);
  if (!f) throw std::runtime_error("emit_csv: write failure on " + path);
}

}  // namespace afem
