#include "btq/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace btq {

RateReport fit_rate(const std::vector<std::pair<int, double>>& table, const FitWindow& window) {
  RateReport rep;
  rep.table = table;
  rep.k_min = window.k_min;

  std::vector<std::pair<int, double>> windowed;
  for (const auto& [k, r] : table) {
    if (r < 0) throw std::invalid_argument("fit_rate: negative residual");
    if (k >= window.k_min) windowed.emplace_back(k, r);
  }
  if (windowed.size() < 4) throw std::invalid_argument("fit_rate: needs at least 4 points in the window");

  std::vector<std::pair<int, double>> used;
  bool all_zero = true;
  for (const auto& [k, r] : windowed) {
    if (r != 0.0) all_zero = false;
    if (r <= kRateNoiseFloor)
      rep.excluded.push_back(k);
    else
      used.emplace_back(k, r);
  }
  if (all_zero) {
    rep.verdict = "exact";
    rep.points_used = 0;
    return rep;
  }
  if (used.size() < 4) {
    rep.verdict = "floor";
    rep.points_used = int(used.size());
    return rep;
  }
  rep.points_used = int(used.size());

  for (size_t i = 0; i + 1 < used.size(); ++i)
    if (used[i + 1].second > used[i].second) rep.monotone_decreasing = false;

  // centered least squares in log-log coordinates
  const size_t n = used.size();
  double mx = 0, my = 0;
  std::vector<double> xs(n), ys(n);
  for (size_t i = 0; i < n; ++i) {
    xs[i] = std::log(double(used[i].first));
    ys[i] = std::log(used[i].second);
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  rep.slope = sxy / sxx;
  rep.intercept = my - rep.slope * mx;
  double ss_res = syy - sxy * sxy / sxx;  // residual sum of squares of the fit
  rep.r2 = (syy > 0) ? std::min(1.0, 1.0 - ss_res / syy) : 1.0;

  bool ok = rep.slope <= window.max_slope && rep.slope >= window.min_slope &&
            rep.r2 >= window.min_r2;
  rep.verdict = ok ? "pass" : "fail";
  return rep;
}

}  // namespace btq
