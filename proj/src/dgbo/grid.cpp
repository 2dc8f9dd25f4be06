// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#include "dgbo/grid.hpp"

#include <cmath>
#include <sstream>

#include "dgbo/errors.hpp"

namespace dgbo {
namespace {

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace

SpatialGrid::SpatialGrid(std::size_t n_points, double length)
    : n_(n_points), length_(length) {
  require(is_power_of_two(n_points), ErrorKind::Config,
          "grid size must be a power of two >= 2, got " + std::to_string(n_points));
  require(std::isfinite(length) && length > 0.0, ErrorKind::Config,
          "grid length must be positive and finite");
}

std::size_t SpatialGrid::index_of_mode(long m) const {
  const long half = static_cast<long>(n_ / 2);
  require(m >= -half && m < half, ErrorKind::Range,
          "mode " + std::to_string(m) + " outside the grid");
  return m >= 0 ? static_cast<std::size_t>(m) : static_cast<std::size_t>(m + static_cast<long>(n_));
}

std::vector<double> SpatialGrid::points() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = x(i);
  return out;
}

std::vector<double> SpatialGrid::frequencies() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = frequency(i);
  return out;
}

void SpatialGrid::require_low_band_resolution() const {
  if (!resolves_low_band()) {
    std::ostringstream msg;
    msg << "frequency spacing 2*pi/L = " << frequency_spacing()
        << " exceeds 1/8; the band |xi| <= 1/2 needs L >= 16*pi";
    fail(ErrorKind::Config, msg.str());
  }
}

SpaceTimeGrid::SpaceTimeGrid(SpatialGrid spatial, std::size_t n_times, double t_length)
    : spatial_(spatial), m_(n_times), t_length_(t_length) {
  require(is_power_of_two(n_times), ErrorKind::Config,
          "time grid size must be a power of two >= 2");
  require(std::isfinite(t_length) && t_length >= 16.0, ErrorKind::Config,
          "time period must be >= 16");
}

}  // namespace dgbo
