#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "asclab/errors.hpp"

namespace asclab {

struct RateEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::pair<std::size_t, std::size_t> window{0, 0};  // [first, last) indices used
};

using Point = std::pair<double, double>;

/// OLS of log y on log x over points[window.first, window.second).
inline RateEstimate fit_rate(const std::vector<Point>& points,
                             std::optional<std::pair<std::size_t, std::size_t>> window = {}) {
  const auto w = window.value_or(std::make_pair(std::size_t{0}, points.size()));
  if (w.first > w.second || w.second > points.size()) {
    throw InvalidParameter("fit window out of bounds");
  }
  const std::size_t m = w.second - w.first;
  if (m < 3) throw InvalidParameter("rate fit needs at least 3 points");
  double sx = 0, sy = 0;
  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto [x, y] = points[w.first + i];
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
      throw DomainError("rate fit requires positive finite values");
    }
    lx[i] = std::log(x);
    ly[i] = std::log(y);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("rate fit needs distinct abscissae");
  RateEstimate r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = ly[i] - (r.intercept + r.slope * lx[i]);
    sse += e * e;
  }
  r.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  r.window = w;
  return r;
}

/// Points with lo <= x <= hi, then drop `trim` of the log-x span at each end.
inline std::vector<Point> select_window(const std::vector<Point>& pts, double lo,
                                        double hi, double trim = 0.0) {
  std::vector<Point> in;
  for (const auto& p : pts)
    if (p.first >= lo && p.first <= hi && p.second > 0.0) in.push_back(p);
  if (trim <= 0.0 || in.size() < 2) return in;
  auto [mn, mx] = std::minmax_element(in.begin(), in.end());
  const double a = std::log(mn->first), b = std::log(mx->first);
  const double ta = a + trim * (b - a), tb = b - trim * (b - a);
  std::vector<Point> out;
  for (const auto& p : in) {
    const double l = std::log(p.first);
    if (l >= ta - 1e-12 && l <= tb + 1e-12) out.push_back(p);
  }
  return out;
}

}  // namespace asclab
