// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dgbo/fft.hpp"
#include "dgbo/grid.hpp"

namespace dgbo {

/// How the second coordinate of a space-time table is read.
///
/// Plain: the table index n carries tau_n.
/// Modulation: the table index n carries lambda_n = tau - omega(xi); the
/// table is the time transform of the profile e^{-i t omega(xi)} u~(xi, t).
/// Both describe the same function; the modulation frame keeps functions
/// close to the dispersion surface resolvable on a short tau axis.
enum class TimeFrame { Plain, Modulation };

/// 2D Fourier coefficients f(xi, tau) of a function of (x, t).
///
/// Layout is xi-major: coeff(i, n) sits at i * n_times + n. Normalization
/// is 1/(N M) forward, plain sum inverse; the Parseval norm is
/// sqrt(L T sum |c|^2).
class SpaceTimeSpectral {
 public:
  SpaceTimeSpectral(SpaceTimeGrid grid, std::vector<cplx> coeffs, TimeFrame frame,
                    double alpha = 0.0);

  static SpaceTimeSpectral zeros(const SpaceTimeGrid& grid, TimeFrame frame, double alpha = 0.0);

  const SpaceTimeGrid& grid() const noexcept { return grid_; }
  TimeFrame frame() const noexcept { return frame_; }
  double alpha() const noexcept { return alpha_; }

  std::span<const cplx> coeffs() const noexcept { return coeffs_; }
  std::span<cplx> coeffs() noexcept { return coeffs_; }
  cplx coeff(std::size_t i, std::size_t n) const noexcept { return coeffs_[i * grid_.n_times() + n]; }
  cplx& coeff(std::size_t i, std::size_t n) noexcept { return coeffs_[i * grid_.n_times() + n]; }

  double xi(std::size_t i) const noexcept { return grid_.spatial().frequency(i); }
  /// Distance tau - omega(xi) of the cell from the dispersion surface.
  double modulation(std::size_t i, std::size_t n) const noexcept;
  /// The time frequency tau of the cell.
  double tau(std::size_t i, std::size_t n) const noexcept;

  /// Unitary continuous-transform value represented by the cell,
  /// L T c / (2 pi).
  cplx transform_value(std::size_t i, std::size_t n) const noexcept;
  /// (2 pi / L) (2 pi / T).
  double cell_measure() const noexcept;

  double l2_norm() const;

  SpaceTimeSpectral& operator+=(const SpaceTimeSpectral& other);
  SpaceTimeSpectral& operator-=(const SpaceTimeSpectral& other);
  SpaceTimeSpectral& operator*=(cplx s);

 private:
  SpaceTimeGrid grid_;
  std::vector<cplx> coeffs_;
  TimeFrame frame_;
  double alpha_;
};

SpaceTimeSpectral operator+(SpaceTimeSpectral a, const SpaceTimeSpectral& b);
SpaceTimeSpectral operator-(SpaceTimeSpectral a, const SpaceTimeSpectral& b);
SpaceTimeSpectral operator*(cplx s, SpaceTimeSpectral a);

/// Samples are x-major: samples[i * n_times + n] = u(x_i, t_n).
SpaceTimeSpectral spacetime_to_spectral(std::span<const cplx> samples, const SpaceTimeGrid& grid,
                                        TimeFrame frame = TimeFrame::Plain, double alpha = 0.0);
std::vector<cplx> spacetime_samples(const SpaceTimeSpectral& f);

/// Partial transform in x only: u~(xi_i, t_n) at i * n_times + n, with the
/// 1/N spatial normalization.
std::vector<cplx> to_mixed(const SpaceTimeSpectral& f);
SpaceTimeSpectral from_mixed(std::span<const cplx> mixed, const SpaceTimeGrid& grid, TimeFrame frame,
                             double alpha = 0.0);

SpaceTimeSpectral change_frame(const SpaceTimeSpectral& f, TimeFrame frame, double alpha);

/// Multiplies the underlying function by a physical-space factor m(x, t)
/// (x-major samples); the result keeps the input's frame.
SpaceTimeSpectral multiply_by_factor(const SpaceTimeSpectral& f, std::span<const cplx> factor);

/// Multiplies every coefficient by a function of xi alone.
SpaceTimeSpectral apply_xi_symbol(const SpaceTimeSpectral& f, const std::function<cplx(double)>& symbol);

/// Multiplies every coefficient by g(modulation).
SpaceTimeSpectral apply_modulation_weight(const SpaceTimeSpectral& f,
                                          const std::function<cplx(double)>& weight);

/// u(x, t) = window(t) * [W(t) phi](x): samples of a windowed free wave.
/// phi is given by its spatial Fourier coefficients on grid.spatial().
SpaceTimeSpectral windowed_free_wave(std::span<const cplx> phi_coeffs, const SpaceTimeGrid& grid,
                                     double alpha, const std::function<double(double)>& window);

/// window(t) * int_0^t W(t - s) u(s) ds, with the s-integral taken by the
/// cumulative trapezoid rule on the time grid.
SpaceTimeSpectral windowed_duhamel(const SpaceTimeSpectral& u, double alpha,
                                   const std::function<double(double)>& window);

/// Spatial Fourier coefficients of u(., t_n).
std::vector<cplx> time_slice(const SpaceTimeSpectral& f, std::size_t n);

}  // namespace dgbo
