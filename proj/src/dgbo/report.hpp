// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dgbo {

/// Column-named numeric table; serialized as CSV by the CLI.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) { rows.push_back(std::move(row)); }
  std::vector<double> column(const std::string& name) const;
};

struct RatioStats {
  double min = 0.0;
  double median = 0.0;
  double p99 = 0.0;
  double max = 0.0;
};

/// Empty input gives all zeros.
RatioStats ratio_stats(std::vector<double> values);

struct Regression {
  std::string parameter;
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double predicted_slope = 0.0;
  bool has_prediction = false;
  std::size_t points = 0;

  /// slope <= 0.05 + 2 stderr.
  bool no_growth() const noexcept { return slope <= 0.05 + 2.0 * stderr_slope; }
};

/// Least-squares line y = intercept + slope * x with the standard error of
/// the slope. Needs at least two distinct x.
Regression linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                      const std::string& parameter);

struct EstimateReport {
  std::string id;
  std::size_t samples = 0;
  std::size_t skipped = 0;
  RatioStats ratios;
  std::vector<Regression> regressions;
  std::vector<std::string> violations;
  std::vector<std::string> notes;
  Table table;
  bool exploratory = false;

  bool passed() const noexcept { return violations.empty(); }
};

}  // namespace dgbo
