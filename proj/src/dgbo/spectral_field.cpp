// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#include "dgbo/spectral_field.hpp"

#include <algorithm>
#include <cmath>

#include "dgbo/errors.hpp"

namespace dgbo {
namespace {

// e^{i xi_m L/2} = (-1)^m accounts for the grid starting at -L/2.
double origin_sign(long m) { return (m % 2 == 0) ? 1.0 : -1.0; }

void check_same_grid(const SpectralField& a, const SpectralField& b) {
  require(a.grid() == b.grid(), ErrorKind::InputShape, "fields live on different grids");
}

}  // namespace

SpectralField::SpectralField(SpatialGrid grid, std::vector<cplx> coeffs, bool real_valued)
    : grid_(grid), coeffs_(std::move(coeffs)), real_(real_valued) {
  require(coeffs_.size() == grid_.size(), ErrorKind::InputShape,
          "coefficient count " + std::to_string(coeffs_.size()) + " != grid size " +
              std::to_string(grid_.size()));
}

SpectralField SpectralField::zeros(const SpatialGrid& grid, bool real_valued) {
  return SpectralField(grid, std::vector<cplx>(grid.size()), real_valued);
}

std::vector<cplx> SpectralField::samples() const {
  std::vector<cplx> out(coeffs_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = origin_sign(grid_.mode(i)) * coeffs_[i];
  fft_backward(out);
  return out;
}

std::vector<double> SpectralField::real_samples() const {
  const auto s = samples();
  std::vector<double> out(s.size());
  std::transform(s.begin(), s.end(), out.begin(), [](cplx z) { return z.real(); });
  return out;
}

double SpectralField::hermitian_residual() const {
  const double scale = max_abs_coeff();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  const std::size_t n = coeffs_.size();
  for (std::size_t i = 1; i < n / 2; ++i) {
    worst = std::max(worst, std::abs(coeffs_[n - i] - std::conj(coeffs_[i])));
  }
  worst = std::max(worst, std::abs(coeffs_[0].imag()));
  worst = std::max(worst, std::abs(coeffs_[n / 2].imag()));
  return worst / scale;
}

double SpectralField::l2_norm() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return std::sqrt(grid_.length() * s);
}

double SpectralField::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  check_same_grid(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  real_ = real_ && other.real_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  check_same_grid(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  real_ = real_ && other.real_;
  return *this;
}

SpectralField& SpectralField::operator*=(cplx s) {
  for (auto& c : coeffs_) c *= s;
  real_ = real_ && s.imag() == 0.0;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx s, SpectralField a) { return a *= s; }

SpectralField to_spectral(std::span<const cplx> samples, const SpatialGrid& grid) {
  require(samples.size() == grid.size(), ErrorKind::InputShape,
          "sample count " + std::to_string(samples.size()) + " != grid size " +
              std::to_string(grid.size()));
  std::vector<cplx> c(samples.begin(), samples.end());
  fft_forward(c);
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= inv_n * origin_sign(grid.mode(i));
  return SpectralField(grid, std::move(c), false);
}

SpectralField to_spectral(std::span<const double> samples, const SpatialGrid& grid) {
  require(samples.size() == grid.size(), ErrorKind::InputShape,
          "sample count " + std::to_string(samples.size()) + " != grid size " +
              std::to_string(grid.size()));
  std::vector<cplx> z(samples.begin(), samples.end());
  auto f = to_spectral(std::span<const cplx>(z), grid);
  f.set_real_valued(true);
  return f;
}

SpectralField apply_symbol(const SpectralField& f, const std::function<cplx(double)>& symbol,
                           SymbolParity parity) {
  SpectralField out = f;
  const auto& g = f.grid();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (parity == SymbolParity::Odd && g.is_nyquist(i)) {
      out.coeff(i) = 0.0;
    } else {
      out.coeff(i) = symbol(g.frequency(i)) * f.coeff(i);
    }
  }
  return out;
}

SpectralField fractional_derivative(const SpectralField& f, double alpha) {
  if (alpha == 0.0) return f;
  return apply_symbol(
      f, [alpha](double xi) { return cplx(xi == 0.0 ? 0.0 : std::pow(std::abs(xi), alpha)); },
      SymbolParity::Even);
}

SpectralField derivative(const SpectralField& f, int order) {
  const auto parity = (order % 2 == 0) ? SymbolParity::Even : SymbolParity::Odd;
  return apply_symbol(
      f, [order](double xi) { return std::pow(cplx(0.0, xi), order); }, parity);
}

SpectralField dispersive_operator(const SpectralField& f, double alpha) {
  return apply_symbol(
      f, [alpha](double xi) { return cplx(0.0, xi * std::pow(std::abs(xi), alpha)); },
      SymbolParity::Odd);
}

double dispersion_symbol(double xi, double alpha) { return -xi * std::pow(std::abs(xi), alpha); }

SpectralField free_evolution(const SpectralField& phi, double t, double alpha) {
  if (t == 0.0) return phi;
  return apply_symbol(
      phi, [t, alpha](double xi) { return std::polar(1.0, t * dispersion_symbol(xi, alpha)); },
      SymbolParity::Even);
}

double sobolev_norm(const SpectralField& phi, double sigma) {
  require(sigma >= 0.0, ErrorKind::Config, "Sobolev index must be >= 0");
  const auto& g = phi.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double xi = g.frequency(i);
    s += std::pow(1.0 + xi * xi, sigma) * std::norm(phi.coeff(i));
  }
  return std::sqrt(g.length() * s);
}

SpectralField dealias(const SpectralField& f) {
  SpectralField out = f;
  const long cut = f.grid().dealias_cutoff();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::labs(f.grid().mode(i)) > cut) out.coeff(i) = 0.0;
  }
  return out;
}

SpectralField multiply(const SpectralField& a, const SpectralField& b) {
  check_same_grid(a, b);
  auto sa = a.samples();
  const auto sb = b.samples();
  for (std::size_t i = 0; i < sa.size(); ++i) sa[i] *= sb[i];
  auto out = to_spectral(std::span<const cplx>(sa), a.grid());
  out.set_real_valued(a.real_valued() && b.real_valued());
  return out;
}

SpectralField dealiased_product(const SpectralField& a, const SpectralField& b) {
  return dealias(multiply(dealias(a), dealias(b)));
}

SpectralField multiply_samples(const SpectralField& a, std::span<const cplx> samples) {
  require(samples.size() == a.size(), ErrorKind::InputShape, "factor sample count mismatch");
  auto sa = a.samples();
  for (std::size_t i = 0; i < sa.size(); ++i) sa[i] *= samples[i];
  return to_spectral(std::span<const cplx>(sa), a.grid());
}

SpectralField truncate(const SpectralField& f, double cutoff) {
  SpectralField out = f;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(f.grid().frequency(i)) > cutoff) out.coeff(i) = 0.0;
  }
  return out;
}

}  // namespace dgbo
