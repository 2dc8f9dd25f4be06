// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dgbo/blocks.hpp"
#include "dgbo/lattice.hpp"
#include "dgbo/norms.hpp"
#include "dgbo/report.hpp"
#include "dgbo/spacetime.hpp"
#include "dgbo/spectral_field.hpp"

namespace dgbo {

/// Samples |xi1| and |xi2| log-uniformly on [2^-20, 2^20] with random signs
/// (half the samples) and near the degenerate set xi2 = -xi1 (1 - 2^-s),
/// s uniform on [1, 40] (the other half); every ratio must lie in [2^-4, 2^4].
EstimateReport resonance_bound_check(double alpha, std::size_t samples, std::uint64_t seed = 1);

struct DualityReport {
  std::size_t triples = 0;
  std::size_t redrawn = 0;
  /// | |J(g1, g2, h)| - ||1_V (g1 * g2)|| | / ||1_V (g1 * g2)|| with h the
  /// normalized conjugate of the restricted convolution.
  double duality_error = 0.0;
  /// | |J(f, g, h)| - |J(g, f, h)| | / |J(f, g, h)|.
  double swap_error = 0.0;
  /// | |J(f, g, h)| - |J(f~, h, g)| | / |J(f, g, h)|.
  double reflect_error = 0.0;
};

/// Random V-atoms with k1, k2 in {-2, ..., 3}, j in {0, 1, 2} and a target
/// (k3, j3) hit by the convolution; triples with an empty restriction are
/// redrawn.
DualityReport trilinear_duality_check(const BlockSystem& bs, std::size_t triples, const Lattice& lat,
                                      std::uint64_t seed = 1);

enum class TrilinearPart { A, B, C };

const char* to_string(TrilinearPart p);

struct TrilinearSweep {
  std::vector<std::array<int, 3>> k_triples{{1, 1, 1}, {1, 2, 2}, {2, 2, 1}, {-1, 2, 2}, {0, 1, 1}, {-2, -1, -1}};
  /// j1 and j2 are drawn from j_values; j3 is the shell up to j3_max where
  /// f1 * f2 restricted to U_k3 x J_j3 is largest.
  std::vector<int> j_values{0, 1, 2, 3};
  int j3_max = 10;
  std::size_t instances = 96;
  Lattice lattice{};
  std::uint64_t seed = 1;
  /// Ratios above this (or non-finite) are violations.
  double ceiling = 1e3;
  /// Saturation run for part (a): j1 over these values against fixed
  /// constant atoms at j_big. Empty disables it.
  std::vector<int> saturation_j{1, 2, 3, 4, 5, 6};
  int saturation_j_big = 9;
  unsigned jobs = 1;
};

/// Random UxJ atoms f1, f2 over (k-triple, j1, j2) instances drawn from the
/// sweep and the maximizing unit h on U_k3 x J_j3 (the normalized
/// conjugate of the restricted convolution); ratio = |J| / (RHS without
/// constant). Instances with J = 0 (or,
/// for part (b), d_alpha = 0 in every permutation) are skipped. Log-ratio
/// regressions against j1, j2, j3 and log2 min |U_k|.
EstimateReport check_trilinear(TrilinearPart part, const BlockSystem& bs, const TrilinearSweep& sweep);

/// Slope of log2(|J| / prod ||f_i||) against min(j) for constant atoms: f1
/// on U_k1 x J_j1, f2 on the inner part of U_k2 x J_big, f3 on U_k3 x J_big
/// so that every target cell of f1, f2 lies in the support of f3.
Regression trilinear_saturation(const BlockSystem& bs, const std::array<int, 3>& k, const std::vector<int>& j_values,
                                int j_big, const Lattice& lat);

enum class BilinearLemma { L61a, L61b, L62, L63 };

const char* to_string(BilinearLemma l);
BilinearLemma bilinear_lemma_from_string(const std::string& s);

struct BilinearInstance {
  int k1 = 0;
  int k2 = 0;
  int k = 0;
  int k_prime = 0;  // 6.1b: the D_{0,k'} shell of f_0
};

/// Desk-scale stand-ins for the regime gates: |n_k| >= n_threshold (the
/// 2^20 gate), separation for the 2^10 gaps, comparable for the 2^20 band
/// of 6.3 and lambda_factor for its 2^50 crossover.
struct BilinearRegime {
  double n_threshold = 64.0;
  double separation = 4.0;
  double comparable = 4.0;
  double lambda_factor = 16.0;
};

struct BilinearSweep {
  std::vector<BilinearInstance> instances;
  std::vector<int> j_values{0, 1, 2, 3};
  int samples = 2;
  double rho = -0.5;  // 6.1b; -1/2 + delta and delta are the lemma's values
  Lattice lattice{};
  BilinearRegime regime{};
  std::uint64_t seed = 1;
  double ceiling = 1e3;
  unsigned jobs = 1;
};

/// Throws a regime error naming the violated hypothesis.
void validate_bilinear(BilinearLemma lemma, const BlockSystem& bs, const BilinearInstance& in,
                       const BilinearRegime& regime);

/// The default instance families: 6.1a k in [K/2, K] x k1 in [1, 5] with
/// k2 the block of n_k - n_k1; 6.1b k in [K/2, K] x k' in [-2, 1]; 6.2 the
/// pairs (m + 1, -m) landing in the block of n_{m+1} - n_m, m in [K/2, K-1];
/// 6.3 k in [K/2, K] with k1, k2 near n_k / 2. Instances failing the
/// regime are dropped.
std::vector<BilinearInstance> default_bilinear_instances(BilinearLemma lemma, const BlockSystem& bs,
                                                         const BilinearRegime& regime);

/// Lambda(k1, k2, k) with the crossover at lambda_factor (1 + |n_k|)^{1/2}.
double bilinear_lambda(const BlockSystem& bs, int k1, int k2, int k, double lambda_factor);

/// LHS / RHS-without-constant over random D-atoms (D0-atoms for the f_0
/// slot of 6.1b), with regressions of the log-ratio against
/// log2(1 + |n|) of each block index.
EstimateReport check_bilinear(BilinearLemma lemma, const WeightTable& wt, const BilinearSweep& sweep);

enum class FactorSpace { SInf, S2 };

struct SNorm {
  double value = 0.0;
  int order = 0;
  std::vector<std::string> warnings;
};

/// Highest derivative order the grid resolves: roundoff amplification
/// max(xi_max, tau_max)^order stays below 1e12.
int max_factor_order(const SpaceTimeGrid& grid);

/// S^inf_N or S^2_N norm of x-major samples m(x_i, t_n), derivatives
/// taken spectrally. Orders above max_factor_order are capped with a
/// warning. Support error if |m| > 1e-12 max|m| at |t| > 10 (S^inf) or
/// |t| > 4 (S^2).
SNorm s_norm(std::span<const cplx> m, const SpaceTimeGrid& grid, FactorSpace which, int order);

struct MultiplicationSweep {
  std::vector<int> k1_values{1, 2, 3, 4};
  int max_shift = 6;
  std::vector<int> j_values{0, 1, 2};
  int epsilon = 0;  // 0 or -1
  FactorSpace space = FactorSpace::SInf;
  int s_order = 4;
  /// M^high uses 2^{j + high_gap} >= |n_k|^alpha.
  double high_gap = 20.0;
  std::uint64_t seed = 1;
  /// Rows with LHS below floor * RHS are left out of the decay fit.
  double floor = 1e-12;
};

/// Random atoms on the D_k1^j cells of the grid (modulation frame) times
/// the factor m, projected with chi_k2. Ratio = Z_k2 norm over
/// ln(2 + |n_k1|) ||m||_S ||(tau - omega + i)^eps f||_Z_k1; the
/// (1 + |k1 - k2|)^{-60} factor is fitted, not divided out: the log-ratio
/// slope against log(1 + |k1 - k2|) must be <= -2.
EstimateReport check_multiplication(const WeightTable& wt, const SpaceTimeGrid& grid, std::span<const cplx> m,
                                    const MultiplicationSweep& sweep);

/// LHS of the multiplication estimate for one input; exposed for tests.
double multiplication_lhs(const WeightTable& wt, const SpaceTimeSpectral& f, std::span<const cplx> m, int k2,
                          int epsilon);

/// D^alpha d_x (m' w) - m' D^alpha d_x w - (alpha+1) d_x(m') D^alpha w
///   + alpha(alpha+1)/2 d_x^2(m') D^{alpha-2} d_x w,
/// products taken without aliasing on a doubled grid and truncated back.
/// Requires 1 < alpha <= 2.
SpectralField triple_commutator(const SpectralField& m_prime, const SpectralField& w, double alpha);

/// R(D) = d_x^sigma1 D^sigma2 with sigma1 in {0, 1} and sigma2 = 0 or in (1, 2).
struct CommutatorSpec {
  int sigma1 = 1;
  double sigma2 = 0.0;
  double sigma = 0.0;
  int decay_power = 40;
};

/// m P_k R(D)(m' w) - P_k R(D)(m m' w) for x-major factor samples; keeps
/// the frame of w.
SpaceTimeSpectral commutator_field(const WeightTable& wt, int k, const CommutatorSpec& spec,
                                   std::span<const cplx> m, std::span<const cplx> m_prime,
                                   const SpaceTimeSpectral& w);

/// F_k (k != 0) or X_0^0 (k = 0) norm of P_k u; N-type with the
/// (tau - omega + i)^{-1} weight when dual.
double block_norm(const SpaceTimeSpectral& u, int k, const WeightTable& wt, bool dual);

/// For each k in ks and |mu| <= mu_max: ratio of the weighted squared F
/// (and N) block norm of the commutator to the nu-sum of the w block norms.
/// Rows with a zero commutator block are recorded with ratio 0. The
/// constant is not quantified, so the check is growth of the F-ratio
/// against log2(1 + |n_k|) at each mu, not its size.
EstimateReport check_commutator(const WeightTable& wt, const CommutatorSpec& spec, const std::vector<int>& ks,
                                int mu_max, std::span<const cplx> m, std::span<const cplx> m_prime,
                                const SpaceTimeSpectral& w);

}  // namespace dgbo
