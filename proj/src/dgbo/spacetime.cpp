// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#include "dgbo/spacetime.hpp"

#include <cmath>

#include "dgbo/errors.hpp"
#include "dgbo/spectral_field.hpp"

namespace dgbo {
namespace {

double origin_sign(long m) { return (m % 2 == 0) ? 1.0 : -1.0; }

void check_same(const SpaceTimeSpectral& a, const SpaceTimeSpectral& b) {
  require(a.grid() == b.grid(), ErrorKind::InputShape, "space-time tables on different grids");
  require(a.frame() == b.frame() && a.alpha() == b.alpha(), ErrorKind::InputShape,
          "space-time tables in different frames");
}

// Forward x-transform of every time column in place: samples -> mixed.
void x_forward(std::vector<cplx>& a, const SpaceTimeGrid& g) {
  const std::size_t n = g.spatial().size();
  const std::size_t m = g.n_times();
  fft_many(a.data(), n, m, m, 1, kForwardSign);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = inv * origin_sign(g.spatial().mode(i));
    for (std::size_t k = 0; k < m; ++k) a[i * m + k] *= s;
  }
}

void x_backward(std::vector<cplx>& a, const SpaceTimeGrid& g) {
  const std::size_t n = g.spatial().size();
  const std::size_t m = g.n_times();
  for (std::size_t i = 0; i < n; ++i) {
    const double s = origin_sign(g.spatial().mode(i));
    for (std::size_t k = 0; k < m; ++k) a[i * m + k] *= s;
  }
  fft_many(a.data(), n, m, m, 1, kBackwardSign);
}

void t_forward(std::vector<cplx>& a, const SpaceTimeGrid& g) {
  const std::size_t n = g.spatial().size();
  const std::size_t m = g.n_times();
  fft_many(a.data(), m, n, 1, m, kForwardSign);
  const double inv = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) a[i * m + k] *= inv * origin_sign(g.tau_mode(k));
  }
}

void t_backward(std::vector<cplx>& a, const SpaceTimeGrid& g) {
  const std::size_t n = g.spatial().size();
  const std::size_t m = g.n_times();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) a[i * m + k] *= origin_sign(g.tau_mode(k));
  }
  fft_many(a.data(), m, n, 1, m, kBackwardSign);
}

// Multiplies mixed data by e^{s i t omega(xi)}, s = +1 or -1.
void rotate(std::vector<cplx>& a, const SpaceTimeGrid& g, double alpha, double s) {
  const std::size_t n = g.spatial().size();
  const std::size_t m = g.n_times();
  for (std::size_t i = 0; i < n; ++i) {
    const double w = dispersion_symbol(g.spatial().frequency(i), alpha);
    if (w == 0.0) continue;
    for (std::size_t k = 0; k < m; ++k) a[i * m + k] *= std::polar(1.0, s * g.t(k) * w);
  }
}

}  // namespace

SpaceTimeSpectral::SpaceTimeSpectral(SpaceTimeGrid grid, std::vector<cplx> coeffs, TimeFrame frame,
                                     double alpha)
    : grid_(grid), coeffs_(std::move(coeffs)), frame_(frame), alpha_(alpha) {
  require(coeffs_.size() == grid_.size(), ErrorKind::InputShape,
          "space-time coefficient count " + std::to_string(coeffs_.size()) + " != grid size " +
              std::to_string(grid_.size()));
  require(std::isfinite(alpha) && alpha >= 0.0, ErrorKind::Config, "alpha must be finite and >= 0");
}

SpaceTimeSpectral SpaceTimeSpectral::zeros(const SpaceTimeGrid& grid, TimeFrame frame, double alpha) {
  return SpaceTimeSpectral(grid, std::vector<cplx>(grid.size()), frame, alpha);
}

double SpaceTimeSpectral::modulation(std::size_t i, std::size_t n) const noexcept {
  if (frame_ == TimeFrame::Modulation) return grid_.tau(n);
  return grid_.tau(n) - dispersion_symbol(xi(i), alpha_);
}

double SpaceTimeSpectral::tau(std::size_t i, std::size_t n) const noexcept {
  if (frame_ == TimeFrame::Plain) return grid_.tau(n);
  return grid_.tau(n) + dispersion_symbol(xi(i), alpha_);
}

cplx SpaceTimeSpectral::transform_value(std::size_t i, std::size_t n) const noexcept {
  return coeff(i, n) * (grid_.spatial().length() * grid_.t_length() / kTwoPi);
}

double SpaceTimeSpectral::cell_measure() const noexcept {
  return grid_.spatial().frequency_spacing() * grid_.tau_spacing();
}

double SpaceTimeSpectral::l2_norm() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return std::sqrt(grid_.spatial().length() * grid_.t_length() * s);
}

SpaceTimeSpectral& SpaceTimeSpectral::operator+=(const SpaceTimeSpectral& other) {
  check_same(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpaceTimeSpectral& SpaceTimeSpectral::operator-=(const SpaceTimeSpectral& other) {
  check_same(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpaceTimeSpectral& SpaceTimeSpectral::operator*=(cplx s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpaceTimeSpectral operator+(SpaceTimeSpectral a, const SpaceTimeSpectral& b) { return a += b; }
SpaceTimeSpectral operator-(SpaceTimeSpectral a, const SpaceTimeSpectral& b) { return a -= b; }
SpaceTimeSpectral operator*(cplx s, SpaceTimeSpectral a) { return a *= s; }

std::vector<cplx> to_mixed(const SpaceTimeSpectral& f) {
  std::vector<cplx> a(f.coeffs().begin(), f.coeffs().end());
  t_backward(a, f.grid());
  if (f.frame() == TimeFrame::Modulation) rotate(a, f.grid(), f.alpha(), +1.0);
  return a;
}

SpaceTimeSpectral from_mixed(std::span<const cplx> mixed, const SpaceTimeGrid& grid, TimeFrame frame,
                             double alpha) {
  require(mixed.size() == grid.size(), ErrorKind::InputShape, "mixed table size mismatch");
  std::vector<cplx> a(mixed.begin(), mixed.end());
  if (frame == TimeFrame::Modulation) rotate(a, grid, alpha, -1.0);
  t_forward(a, grid);
  return SpaceTimeSpectral(grid, std::move(a), frame, alpha);
}

SpaceTimeSpectral spacetime_to_spectral(std::span<const cplx> samples, const SpaceTimeGrid& grid,
                                        TimeFrame frame, double alpha) {
  require(samples.size() == grid.size(), ErrorKind::InputShape,
          "space-time sample count " + std::to_string(samples.size()) + " != grid size " +
              std::to_string(grid.size()));
  std::vector<cplx> a(samples.begin(), samples.end());
  x_forward(a, grid);
  return from_mixed(a, grid, frame, alpha);
}

std::vector<cplx> spacetime_samples(const SpaceTimeSpectral& f) {
  auto a = to_mixed(f);
  x_backward(a, f.grid());
  return a;
}

SpaceTimeSpectral change_frame(const SpaceTimeSpectral& f, TimeFrame frame, double alpha) {
  if (f.frame() == frame && f.alpha() == alpha) return f;
  return from_mixed(to_mixed(f), f.grid(), frame, alpha);
}

SpaceTimeSpectral multiply_by_factor(const SpaceTimeSpectral& f, std::span<const cplx> factor) {
  require(factor.size() == f.grid().size(), ErrorKind::InputShape, "factor sample count mismatch");
  auto a = spacetime_samples(f);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= factor[i];
  return spacetime_to_spectral(a, f.grid(), f.frame(), f.alpha());
}

SpaceTimeSpectral apply_xi_symbol(const SpaceTimeSpectral& f, const std::function<cplx(double)>& symbol) {
  SpaceTimeSpectral out = f;
  const std::size_t m = f.grid().n_times();
  for (std::size_t i = 0; i < f.grid().spatial().size(); ++i) {
    const cplx s = symbol(f.xi(i));
    for (std::size_t n = 0; n < m; ++n) out.coeff(i, n) *= s;
  }
  return out;
}

SpaceTimeSpectral apply_modulation_weight(const SpaceTimeSpectral& f,
                                          const std::function<cplx(double)>& weight) {
  SpaceTimeSpectral out = f;
  const std::size_t m = f.grid().n_times();
  for (std::size_t i = 0; i < f.grid().spatial().size(); ++i) {
    for (std::size_t n = 0; n < m; ++n) out.coeff(i, n) *= weight(f.modulation(i, n));
  }
  return out;
}

SpaceTimeSpectral windowed_free_wave(std::span<const cplx> phi_coeffs, const SpaceTimeGrid& grid,
                                     double alpha, const std::function<double(double)>& window) {
  const std::size_t n = grid.spatial().size();
  const std::size_t m = grid.n_times();
  require(phi_coeffs.size() == n, ErrorKind::InputShape, "datum size mismatch");
  // The profile e^{-it omega} W(t) phi is window(t) phi, so only the window
  // needs a time transform.
  std::vector<cplx> w(m);
  for (std::size_t k = 0; k < m; ++k) w[k] = window(grid.t(k));
  fft_forward(w);
  const double inv = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < m; ++k) w[k] *= inv * origin_sign(grid.tau_mode(k));
  std::vector<cplx> c(grid.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) c[i * m + k] = phi_coeffs[i] * w[k];
  }
  return SpaceTimeSpectral(grid, std::move(c), TimeFrame::Modulation, alpha);
}

SpaceTimeSpectral windowed_duhamel(const SpaceTimeSpectral& u, double alpha,
                                   const std::function<double(double)>& window) {
  const auto& g = u.grid();
  const std::size_t n = g.spatial().size();
  const std::size_t m = g.n_times();
  auto p = to_mixed(u);
  rotate(p, g, alpha, -1.0);
  // Cumulative trapezoid of the profile from t = 0 (index m/2).
  std::vector<cplx> out(g.size());
  const std::size_t origin = m / 2;
  const double h = g.dt();
  for (std::size_t i = 0; i < n; ++i) {
    const cplx* row = &p[i * m];
    cplx* dst = &out[i * m];
    cplx acc = 0.0;
    dst[origin] = 0.0;
    for (std::size_t k = origin + 1; k < m; ++k) {
      acc += 0.5 * h * (row[k - 1] + row[k]);
      dst[k] = acc;
    }
    acc = 0.0;
    for (std::size_t k = origin; k-- > 0;) {
      acc -= 0.5 * h * (row[k + 1] + row[k]);
      dst[k] = acc;
    }
    for (std::size_t k = 0; k < m; ++k) dst[k] *= window(g.t(k));
  }
  t_forward(out, g);
  return SpaceTimeSpectral(g, std::move(out), TimeFrame::Modulation, alpha);
}

std::vector<cplx> time_slice(const SpaceTimeSpectral& f, std::size_t n) {
  const auto& g = f.grid();
  require(n < g.n_times(), ErrorKind::Range, "time index outside the grid");
  const auto mixed = to_mixed(f);
  std::vector<cplx> out(g.spatial().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mixed[i * g.n_times() + n];
  return out;
}

}  // namespace dgbo
