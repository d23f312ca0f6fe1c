#pragma once

// Convergence-rate fitting: least squares on (log k, log residual) with a
// noise floor, exact-zero short-circuit, and verdicts against a slope window.

#include <string>
#include <utility>
#include <vector>

namespace btq {

struct FitWindow {
  int k_min = 16;            // points with k below this are ignored by the fit
  double max_slope = -0.85;  // pass requires slope <= max_slope ...
  double min_slope = -1e300; // ... and slope >= min_slope (default unbounded)
  double min_r2 = 0.98;
};

struct RateReport {
  std::vector<std::pair<int, double>> table;  // (k, residual) as supplied
  int k_min = 0;                              // window actually applied
  std::vector<int> excluded;                  // ks dropped at the noise floor
  int points_used = 0;
  double slope = 0;
  double intercept = 0;  // log-log intercept
  double r2 = 0;
  bool monotone_decreasing = true;  // sanity flag over the fitted points
  // "pass" | "fail" | "exact" (all residuals zero) | "floor" (too few points
  // above the noise floor to fit)
  std::string verdict;

  bool passed() const { return verdict == "pass" || verdict == "exact"; }
};

// Fits residual ~ C k^slope on the points with k >= window.k_min. Requires at
// least 4 such points. Residuals must be non-negative; exact zeros are treated
// as converged-to-zero: all zero -> verdict "exact", isolated zeros join the
// noise-floor exclusions.
RateReport fit_rate(const std::vector<std::pair<int, double>>& table, const FitWindow& window);

// Noise level below which a residual is considered indistinguishable from
// rounding error of O(1)-normalized quantities.
inline constexpr double kRateNoiseFloor = 1e-14;

}  // namespace btq
