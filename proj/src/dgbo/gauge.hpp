// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <vector>

#include "dgbo/blocks.hpp"
#include "dgbo/spectral_field.hpp"

namespace dgbo {

struct LowHighSplit {
  SpectralField low;   // |xi| <= 1/2
  SpectralField high;  // |xi| > 1/2
};

/// Sharp split at |xi| = 1/2. Requires frequency spacing <= 1/8.
LowHighSplit split_low_high(const SpectralField& phi);

/// Psi' = phi_low with Psi(0) = 0. Rejects phi_low with nonzero mean.
SpectralField antiderivative_psi(const SpectralField& phi_low);

/// a_k = -n_k |n_k|^{-alpha} / (alpha + 1), a_0 = 0.
double gauge_coefficient(const BlockSystem& bs, int k);

class GaugeData {
 public:
  GaugeData(const SpectralField& phi, const BlockSystem& bs, double eps0 = 0.01);

  const SpectralField& phi_low() const noexcept { return phi_low_; }
  const SpectralField& phi_high() const noexcept { return phi_high_; }
  const SpectralField& psi() const noexcept { return psi_; }
  double a(int k) const;
  double eps0() const noexcept { return eps0_; }
  /// ||phi_low + phi_high||_{L2} <= eps0.
  bool within_budget() const noexcept { return within_budget_; }

  /// Samples of e^{i s a_k Psi(x)}.
  std::vector<cplx> phase(int k, double s) const;

 private:
  SpectralField phi_low_;
  SpectralField phi_high_;
  SpectralField psi_;
  std::vector<double> psi_samples_;
  std::vector<double> a_;
  int K_;
  double eps0_;
  bool within_budget_;
};

struct RenormalizedBlocks {
  SpectralField v;
  std::vector<SpectralField> blocks;  // v_k at index k + K
  int K = 0;

  const SpectralField& block(int k) const { return blocks.at(static_cast<std::size_t>(k + K)); }
};

/// v = u - phi_low, v_k = P_k(v) e^{-i a_k Psi}.
RenormalizedBlocks renormalize(const SpectralField& u, const GaugeData& gd, const BlockSystem& bs);

/// u = phi_low + sum_k e^{i a_k Psi} v_k.
SpectralField reconstruct(const RenormalizedBlocks& rb, const GaugeData& gd, const BlockSystem& bs);

/// max_k ||v_k - e^{-i a_k Psi} P~_k(e^{i a_k Psi} v_k)|| / ||v||.
double fixed_point_defect(const RenormalizedBlocks& rb, const GaugeData& gd, const BlockSystem& bs);

/// Right-hand side of the k = 0 block equation.
SpectralField rhs_R0(const SpectralField& v, const GaugeData& gd, const BlockSystem& bs);

/// Right-hand side of the gauged block equation
///   d_t v_k + D^alpha d_x v_k = R_k,  k != 0,
/// computed directly from the definition of v_k.
SpectralField rhs_Rk(int k, const RenormalizedBlocks& rb, const GaugeData& gd, const BlockSystem& bs);

/// The five-term decomposition of R_k: nonlinearity, drift-corrected
/// transport, dispersive gauge commutator, projection commutator, and the
/// remaining low-frequency terms.
std::array<SpectralField, 5> rhs_Rk_split(int k, const RenormalizedBlocks& rb, const GaugeData& gd,
                                          const BlockSystem& bs);

/// max over interior snapshots of ||d_t v_k + D^alpha d_x v_k - R_k||_{L2},
/// with d_t by fourth-order central differences of e^{-it omega} v_k (so
/// the linear part is differenced in the interaction picture). Snapshots
/// must be equally spaced; at least five are needed.
double residual_check(std::span<const double> times, std::span<const SpectralField> states,
                      const GaugeData& gd, const BlockSystem& bs, int k);

}  // namespace dgbo
