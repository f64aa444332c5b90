#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "afem/driver.hpp"

namespace afem {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  int window = 0;
  double residual = 0.0;  // RMS residual of the log10-log10 fit
};

// Least-squares slope of log10(y) vs log10(x) over the trailing window.
RateFit fit_rate(const std::vector<double>& xs, const std::vector<double>& ys,
                 int window);

// Final iterates (k = k_underbar) per level, one record each.
std::vector<IterationRecord> final_iterates(const RunLog& log);

// ||grad(u* - u)|| * cost^{1/2} at the final record.
double weighted_cost(const RunLog& log);

void emit_csv(const RunLog& log, std::ostream& out);
void emit_csv(const RunLog& log, const std::string& path);

}  // namespace afem
