// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace dgbo {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Uniform periodic grid on [-L/2, L/2) with N points (N a power of two).
///
/// Frequencies follow the usual FFT layout: index i < N/2 carries mode i,
/// index i >= N/2 carries mode i - N, and xi_m = 2 pi m / L. The Nyquist
/// index N/2 is the only one without a mirror partner.
class SpatialGrid {
 public:
  SpatialGrid(std::size_t n_points, double length);

  std::size_t size() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return length_ / static_cast<double>(n_); }
  double frequency_spacing() const noexcept { return kTwoPi / length_; }

  double x(std::size_t i) const noexcept {
    return -0.5 * length_ + static_cast<double>(i) * spacing();
  }
  long mode(std::size_t i) const noexcept {
    return i < n_ / 2 ? static_cast<long>(i)
                      : static_cast<long>(i) - static_cast<long>(n_);
  }
  double frequency(std::size_t i) const noexcept {
    return static_cast<double>(mode(i)) * frequency_spacing();
  }
  std::size_t index_of_mode(long m) const;
  bool is_nyquist(std::size_t i) const noexcept { return i == n_ / 2; }

  std::vector<double> points() const;
  std::vector<double> frequencies() const;

  /// Largest |mode| kept by the 2/3 rule.
  long dealias_cutoff() const noexcept { return static_cast<long>(n_ / 3); }

  /// True when at least eight modes fall in the low band |xi| <= 1/2,
  /// i.e. frequency spacing <= 1/8.
  bool resolves_low_band() const noexcept { return frequency_spacing() <= 0.125; }

  /// Throws a config error unless resolves_low_band().
  void require_low_band_resolution() const;

  friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) {
    return a.n_ == b.n_ && a.length_ == b.length_;
  }

 private:
  std::size_t n_;
  double length_;
};

/// Space-time grid: a spatial grid times a periodic time axis
/// [-T/2, T/2) of M points. T >= 16 so that supports in [-4, 4] sit well
/// inside the period.
class SpaceTimeGrid {
 public:
  SpaceTimeGrid(SpatialGrid spatial, std::size_t n_times, double t_length);

  const SpatialGrid& spatial() const noexcept { return spatial_; }
  std::size_t n_times() const noexcept { return m_; }
  double t_length() const noexcept { return t_length_; }
  double dt() const noexcept { return t_length_ / static_cast<double>(m_); }
  double tau_spacing() const noexcept { return kTwoPi / t_length_; }

  double t(std::size_t n) const noexcept {
    return -0.5 * t_length_ + static_cast<double>(n) * dt();
  }
  long tau_mode(std::size_t n) const noexcept {
    return n < m_ / 2 ? static_cast<long>(n)
                      : static_cast<long>(n) - static_cast<long>(m_);
  }
  double tau(std::size_t n) const noexcept {
    return static_cast<double>(tau_mode(n)) * tau_spacing();
  }
  double tau_nyquist() const noexcept { return 0.5 * static_cast<double>(m_) * tau_spacing(); }

  std::size_t size() const noexcept { return spatial_.size() * m_; }

  friend bool operator==(const SpaceTimeGrid& a, const SpaceTimeGrid& b) {
    return a.spatial_ == b.spatial_ && a.m_ == b.m_ && a.t_length_ == b.t_length_;
  }

 private:
  SpatialGrid spatial_;
  std::size_t m_;
  double t_length_;
};

}  // namespace dgbo
