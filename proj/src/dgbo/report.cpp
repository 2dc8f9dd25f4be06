// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#include "dgbo/report.hpp"

#include <algorithm>
#include <cmath>

#include "dgbo/errors.hpp"

namespace dgbo {

std::vector<double> Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  require(it != columns.end(), ErrorKind::InputShape, "no column named " + name);
  const auto j = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(j));
  return out;
}

RatioStats ratio_stats(std::vector<double> values) {
  RatioStats s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  s.min = values.front();
  s.max = values.back();
  s.median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  const auto idx = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(n))) - 1;
  s.p99 = values[std::min(idx, n - 1)];
  return s;
}

Regression linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                      const std::string& parameter) {
  require(x.size() == y.size(), ErrorKind::InputShape, "regression inputs differ in length");
  const std::size_t n = x.size();
  require(n >= 2, ErrorKind::InsufficientData, "regression needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorKind::Degenerate, "regression abscissae are all equal");
  Regression r;
  r.parameter = parameter;
  r.points = n;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  if (n > 2) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - r.intercept - r.slope * x[i];
      ss += e * e;
    }
    r.stderr_slope = std::sqrt(ss / static_cast<double>(n - 2) / sxx);
  }
  return r;
}

}  // namespace dgbo
