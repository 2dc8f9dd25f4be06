// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "dgbo/spacetime.hpp"
#include "dgbo/spectral_field.hpp"

namespace dgbo {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  double length() const noexcept { return hi > lo ? hi - lo : 0.0; }
  bool empty() const noexcept { return hi < lo; }
};

/// The canonical smooth step: 0 for x <= 0, 1 for x >= 1, with
/// s(x) + s(1 - x) = 1 exactly by construction.
double smooth_step(double x);

/// Non-dyadic block endpoints n_k: n_0 = 0, n_1 = 4,
/// n_{k+1} = n_k + sqrt(n_k), n_{-k} = -n_k, for |k| <= K + 1.
class BlockSystem {
 public:
  BlockSystem(double alpha, int K);

  double alpha() const noexcept { return alpha_; }
  int K() const noexcept { return K_; }

  /// Valid for |k| <= K + 1.
  double n(int k) const;
  /// Closed interval [(5 n_{k-1} + n_k)/6, (5 n_{k+1} + n_k)/6], |k| <= K.
  Interval interval_I(int k) const;
  /// [(2 n_{k-1} + n_k)/3, (2 n_{k+1} + n_k)/3], |k| <= K.
  Interval chi_support(int k) const;
  /// Region where chi_k == 1.
  Interval chi_plateau(int k) const;

  /// Largest |xi| at which the cutoffs still sum to one.
  double covered_limit() const noexcept { return covered_; }
  bool covers(double xi) const noexcept { return std::abs(xi) <= covered_; }

  /// chi_k(xi); zero for |k| > K.
  double chi(int k, double xi) const;
  /// The (at most two) indices whose cutoff can be nonzero at xi.
  std::vector<int> blocks_at(double xi) const;
  /// Index k with xi in the plateau or transition of chi_k, preferring the
  /// larger cutoff value.
  int dominant_block(double xi) const;

 private:
  void check_k(int k, int limit) const;

  double alpha_;
  int K_;
  std::vector<double> n_pos_;  // n_0 .. n_{K+1}
  double covered_;
};

/// Finite-difference report of sup |d^s chi_k| (1 + |n_k|)^{s/2} per k.
struct DerivativeBound {
  int order = 0;
  std::vector<int> k;
  std::vector<double> constant;
  double max_constant = 0.0;
  /// max/min of the per-k constants over the upper half of the k-range.
  double tail_spread = 0.0;
};

DerivativeBound chi_derivative_bound(const BlockSystem& bs, int order);

/// max |sum_k chi_k(xi) - 1| over `samples` evenly spaced points of the
/// covered range.
double partition_of_unity_defect(const BlockSystem& bs, std::size_t samples);

/// Throws a coverage error naming modes with |c| > 1e-13 max|c| beyond the
/// covered range.
void require_coverage(const BlockSystem& bs, const SpectralField& f);
void require_coverage(const BlockSystem& bs, const SpaceTimeSpectral& f);

/// P_k (smooth) or P~_k (sharp indicator of I_k).
SpectralField project(const BlockSystem& bs, const SpectralField& f, int k, bool sharp = false);
SpaceTimeSpectral project(const BlockSystem& bs, const SpaceTimeSpectral& f, int k,
                          bool sharp = false);

/// U_k = I_k u I_{-k} for k >= 1, the annulus |nu| in [2^{k+1}, 2^{k+3}]
/// for k <= 0. Stored as two disjoint closed intervals.
struct FrequencyCell {
  int k = 0;
  Interval parts[2];

  bool contains(double nu) const noexcept { return parts[0].contains(nu) || parts[1].contains(nu); }
  double measure() const noexcept { return parts[0].length() + parts[1].length(); }
};

FrequencyCell u_cell(const BlockSystem& bs, int k);

inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

/// inf ||xi1|^a - |xi2|^a| over xi1 in U_k1, xi2 in U_k2, xi1 + xi2 in U_k3;
/// kInfeasible when the constraint set is empty.
double d_alpha(const BlockSystem& bs, int k1, int k2, int k3);
double d_alpha(const FrequencyCell& u1, const FrequencyCell& u2, const FrequencyCell& u3,
               double alpha);

}  // namespace dgbo
