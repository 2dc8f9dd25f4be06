// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "dgbo/fft.hpp"
#include "dgbo/grid.hpp"

namespace dgbo {

/// Fourier coefficients of a periodic function of x at one time.
///
/// Convention: c(xi_m) = (1/N) sum_n h(x_n) e^{-i xi_m x_n}, inverse
/// h(x_n) = sum_m c(xi_m) e^{i xi_m x_n}. With this normalization the L2
/// norm over the torus is sqrt(L * sum |c|^2).
class SpectralField {
 public:
  SpectralField(SpatialGrid grid, std::vector<cplx> coeffs, bool real_valued = false);

  static SpectralField zeros(const SpatialGrid& grid, bool real_valued = true);

  const SpatialGrid& grid() const noexcept { return grid_; }
  std::span<const cplx> coeffs() const noexcept { return coeffs_; }
  std::span<cplx> coeffs() noexcept { return coeffs_; }
  cplx coeff(std::size_t i) const noexcept { return coeffs_[i]; }
  cplx& coeff(std::size_t i) noexcept { return coeffs_[i]; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  bool real_valued() const noexcept { return real_; }
  void set_real_valued(bool r) noexcept { real_ = r; }

  std::vector<cplx> samples() const;
  std::vector<double> real_samples() const;

  /// max_m |c(-xi_m) - conj c(xi_m)| / max|c|, over mirrored pairs.
  double hermitian_residual() const;

  double l2_norm() const;
  double max_abs_coeff() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(cplx s);

 private:
  SpatialGrid grid_;
  std::vector<cplx> coeffs_;
  bool real_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx s, SpectralField a);

SpectralField to_spectral(std::span<const double> samples, const SpatialGrid& grid);
SpectralField to_spectral(std::span<const cplx> samples, const SpatialGrid& grid);

enum class SymbolParity { Even, Odd };

/// Multiplies every coefficient by symbol(xi). Odd symbols vanish on the
/// Nyquist mode, which has no mirror partner.
SpectralField apply_symbol(const SpectralField& f, const std::function<cplx(double)>& symbol,
                           SymbolParity parity);

/// |xi|^alpha multiplier; |0|^alpha = 0 for alpha > 0, identity at alpha = 0.
SpectralField fractional_derivative(const SpectralField& f, double alpha);

/// (i xi)^order multiplier.
SpectralField derivative(const SpectralField& f, int order = 1);

/// |xi|^alpha * (i xi): the linear operator D^alpha d/dx.
SpectralField dispersive_operator(const SpectralField& f, double alpha);

/// omega(xi) = -xi |xi|^alpha.
double dispersion_symbol(double xi, double alpha);

/// W(t): multiplies c(xi) by e^{i t omega(xi)}.
SpectralField free_evolution(const SpectralField& phi, double t, double alpha);

/// sqrt(L sum (1 + xi^2)^sigma |c|^2).
double sobolev_norm(const SpectralField& phi, double sigma);

/// Zeroes every mode with |m| > N/3.
SpectralField dealias(const SpectralField& f);

/// Pointwise product computed in physical space without truncation.
SpectralField multiply(const SpectralField& a, const SpectralField& b);

/// Pointwise product under the 2/3 rule: inputs and output truncated to
/// |m| <= N/3.
SpectralField dealiased_product(const SpectralField& a, const SpectralField& b);

/// Multiplies by a physical-space function given as samples.
SpectralField multiply_samples(const SpectralField& a, std::span<const cplx> samples);

/// Sharp truncation to |xi| <= cutoff.
SpectralField truncate(const SpectralField& f, double cutoff);

}  // namespace dgbo
