#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "dgbo/grid.hpp"
#include "dgbo/spectral_field.hpp"

namespace dgbo::testing {

inline double rel_err(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

inline double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(std::span<const cplx> a) {
  double m = 0.0;
  for (auto z : a) m = std::max(m, std::abs(z));
  return m;
}

// Real field with Gaussian coefficients on 0 < |m| <= max_mode.
inline SpectralField random_real_field(const SpatialGrid& g, long max_mode, std::mt19937_64& rng,
                                       double scale = 1.0) {
  std::normal_distribution<double> nd;
  auto f = SpectralField::zeros(g, true);
  for (long m = 1; m <= max_mode; ++m) {
    const cplx c(scale * nd(rng), scale * nd(rng));
    f.coeff(g.index_of_mode(m)) = c;
    f.coeff(g.index_of_mode(-m)) = std::conj(c);
  }
  return f;
}

}  // namespace dgbo::testing
