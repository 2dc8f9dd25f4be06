// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "dgbo/blocks.hpp"
#include "dgbo/report.hpp"
#include "dgbo/spacetime.hpp"
#include "dgbo/spectral_field.hpp"

namespace dgbo {

/// Modulation windows: eta_0 is even, 1 on [-5/4, 5/4], 0 off [-8/5, 8/5];
/// eta_j(nu) = eta_0(nu / 2^j) - eta_0(nu / 2^{j-1}) for j >= 1, and the
/// same formula for eta~_k at every k in Z.
class WindowSystem {
 public:
  static double eta0(double nu);
  /// j >= 0.
  static double eta(int j, double nu);
  static double eta_tilde(int k, double nu);
  /// J_0 = [-2, 2], J_j = {|nu| in [2^{j-1}, 2^{j+1}]}; returned as the
  /// interval of |nu|.
  static Interval J(int j);
  static Interval J_tilde(int k);

  /// Smallest k' whose eta~_{k'} is nonzero at some nonzero multiple of
  /// xi_spacing. The xi = 0 column is assigned to this shell.
  static int lowest_shell(double xi_spacing);

  /// max |sum_{j <= j_max} eta_j(nu) - 1| on evenly spaced |nu| <= nu_max,
  /// with j_max the first index whose window covers nu_max.
  static double partition_defect(double nu_max, std::size_t samples);
};

/// beta_{k,j} = 1 + (2^j / |n_k|^{alpha+1})^{1/2 - delta}, delta = (alpha-1)/100.
class WeightTable {
 public:
  explicit WeightTable(BlockSystem bs);

  const BlockSystem& blocks() const noexcept { return bs_; }
  double alpha() const noexcept { return bs_.alpha(); }
  double delta() const noexcept { return delta_; }
  /// k != 0, j >= 0.
  double beta(int k, int j) const;
  /// 2^{j/2} beta_{k,j}.
  double z_weight(int k, int j) const;
  /// 2^{j(1 - delta)}.
  double low_weight(int j) const;

 private:
  BlockSystem bs_;
  double delta_;
};

/// Which time variable the X_0 windows act on: tau - omega(xi) (the
/// X_0^rho family, default) or tau (the original X_0 display).
enum class X0Variant { Modulation, Plain };

/// Z_k norm, k != 0. The cells of f with |f| above 1e-13 max|f| must lie in
/// I_k x R, else a support error lists them.
double z_norm(const SpaceTimeSpectral& f, int k, const WeightTable& wt);

double x0_norm(const SpaceTimeSpectral& f, double rho, const WeightTable& wt,
               X0Variant variant = X0Variant::Modulation);

double y0_norm(const SpaceTimeSpectral& f, const WeightTable& wt);

/// Splitting f = g + h by a sharp xi threshold. `low_in_x` puts the
/// |xi| <= theta part in X_0 and the rest in Y_0; otherwise the reverse.
/// theta < 0 encodes "nothing below", theta = inf "everything below".
struct Splitting {
  double value = 0.0;
  double theta = 0.0;
  bool low_in_x = true;
};

/// Upper bound for the Z_0 = X_0 + Y_0 norm: the minimum over the two
/// trivial splittings and the dyadic thresholds in both orientations.
Splitting z0_norm(const SpaceTimeSpectral& f, const WeightTable& wt,
                  X0Variant variant = X0Variant::Modulation);

/// Upper bound for the B_0 norm of the spatial coefficients f, found the
/// same way with ||F^{-1} g||_{L^1} and sum 2^{-k'} ||eta~_{k'} h||.
Splitting b0_norm(const SpectralField& f);

/// (||chi_0 phi^||_{B_0}^2 + sum_{|k|>=1} (1+|n_k|)^{2 sigma} ||chi_k phi^||^2)^{1/2}.
double htilde_norm(const SpectralField& phi, double sigma, const WeightTable& wt);

/// F^sigma and N^sigma norms of a space-time function. If u has mass at
/// |t| > 4 it is multiplied by eta_0(2t/5) first and a warning is appended
/// to `warnings` (when given).
double f_norm(const SpaceTimeSpectral& u, double sigma, const WeightTable& wt,
              std::vector<std::string>* warnings = nullptr);
double n_norm(const SpaceTimeSpectral& u, double sigma, const WeightTable& wt,
              std::vector<std::string>* warnings = nullptr);

/// A piece of f on one sharp cell D_k^j (k != 0) or D_{0,k'}^j (k == 0),
/// stored sparsely as table indices and coefficients. Sharp modulation
/// shells are |lambda| < 2^{1/2} for j = 0 and [2^{j-1/2}, 2^{j+1/2}) for
/// j >= 1; sharp xi shells for k' likewise.
struct BlockAtom {
  int k = 0;
  int j = 0;
  int k_prime = 0;
  std::vector<std::size_t> cells;
  std::vector<cplx> values;
  double l2 = 0.0;
};

/// Sharp atomic decomposition of f; assemble() of the result is f. For
/// k == 0 the modulation is tau - omega(xi).
std::vector<BlockAtom> atomic_decompose(const SpaceTimeSpectral& f, int k, const WeightTable& wt);

SpaceTimeSpectral assemble(const std::vector<BlockAtom>& atoms, const SpaceTimeSpectral& like);

/// sum over atoms of weight * ||atom||: 2^{j/2} beta_{k,j} for k != 0,
/// 2^{j(1-delta)} 2^{rho k'} for k == 0.
double atomic_weight_sum(const std::vector<BlockAtom>& atoms, const WeightTable& wt, double rho = -1.0);

struct LinearEstimateReport {
  EstimateReport free_wave;  // ||eta_0(t) W(t) phi||_F / ||phi||_H~
  EstimateReport duhamel;    // ||eta_0(t) int_0^t W(t-s) u(s) ds||_F / ||u||_N
  EstimateReport embedding;  // sup_t ||w(t)||_H~ / ||w||_F
};

/// For each datum phi: w = eta_0(t) W(t) phi on `grid`, the three ratios
/// above with u = w as the Duhamel source. Zero data are skipped.
LinearEstimateReport linear_estimate_check(const std::vector<SpectralField>& data, double sigma,
                                           const SpaceTimeGrid& grid, const WeightTable& wt);

}  // namespace dgbo
