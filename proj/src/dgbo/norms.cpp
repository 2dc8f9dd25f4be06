// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#include "dgbo/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "dgbo/errors.hpp"

namespace dgbo {
namespace {

constexpr double kSupportTol = 1e-13;
constexpr int kMaxShell = 62;
constexpr double kTimeSupport = 4.0;

// The same function with the norm system's alpha attached, so that
// modulation() is tau - omega(xi) for that alpha in either frame.
SpaceTimeSpectral with_alpha(const SpaceTimeSpectral& f, double alpha) {
  if (f.frame() == TimeFrame::Modulation) {
    require(f.alpha() == alpha, ErrorKind::Config,
            "modulation-frame table built for a different alpha than the norm system");
    return f;
  }
  if (f.alpha() == alpha) return f;
  return SpaceTimeSpectral(f.grid(), std::vector<cplx>(f.coeffs().begin(), f.coeffs().end()),
                           TimeFrame::Plain, alpha);
}

double max_abs(std::span<const cplx> c) {
  double m = 0.0;
  for (const auto& z : c) m = std::max(m, std::abs(z));
  return m;
}

// Support error when cells with non-negligible mass have xi outside `iv`.
void require_xi_support(const SpaceTimeSpectral& f, const Interval& iv, const std::string& name) {
  const auto& g = f.grid();
  const std::size_t m = g.n_times();
  const double tol = kSupportTol * max_abs(f.coeffs());
  std::ostringstream bad;
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.spatial().size(); ++i) {
    if (iv.contains(f.xi(i))) continue;
    for (std::size_t n = 0; n < m; ++n) {
      if (std::abs(f.coeff(i, n)) <= tol) continue;
      if (count < 5) bad << " (xi=" << f.xi(i) << ", tau=" << f.tau(i, n) << ")";
      ++count;
    }
  }
  if (count > 0) {
    std::ostringstream msg;
    msg << "f is not supported in " << name << " x R: " << count << " cells outside, e.g." << bad.str();
    fail(ErrorKind::Support, msg.str());
  }
}

// Indices j >= 0 with eta_j(nu) possibly nonzero.
std::pair<int, int> shell_range(double nu) {
  const double a = std::abs(nu);
  if (a < 1.25) return {0, 0};
  const int c = static_cast<int>(std::floor(std::log2(a)));
  return {std::max(0, c - 1), std::min(kMaxShell, c + 2)};
}

// k' candidates for a nonzero xi, clamped to [lowest, 2].
std::pair<int, int> tilde_range(double xi, int lowest) {
  const int c = static_cast<int>(std::floor(std::log2(std::abs(xi))));
  return {std::max(lowest, c - 1), std::min(2, c + 2)};
}

int sharp_index(double nu) {
  const double a = std::abs(nu);
  if (a < std::sqrt(2.0)) return 0;
  return static_cast<int>(std::floor(std::log2(a) + 0.5));
}

// Sum over k' of weight(k') * ||eta~_{k'} f||_{L^2_xi} for spatial
// coefficients, with the xi = 0 mode in the lowest shell.
double tilde_sum_1d(const SpectralField& f, double rho) {
  const auto& g = f.grid();
  const int lowest = WindowSystem::lowest_shell(g.frequency_spacing());
  std::vector<double> bucket(static_cast<std::size_t>(3 - lowest), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = std::norm(f.coeff(i));
    if (a == 0.0) continue;
    const double xi = g.frequency(i);
    if (xi == 0.0) {
      bucket[0] += a;
      continue;
    }
    const auto [lo, hi] = tilde_range(xi, lowest);
    for (int k = lo; k <= hi; ++k) {
      const double e = WindowSystem::eta_tilde(k, xi);
      if (e != 0.0) bucket[static_cast<std::size_t>(k - lowest)] += e * e * a;
    }
  }
  double s = 0.0;
  for (std::size_t b = 0; b < bucket.size(); ++b) {
    s += std::pow(2.0, rho * (lowest + static_cast<int>(b))) * std::sqrt(g.length() * bucket[b]);
  }
  return s;
}

double l1_norm(const SpectralField& f) {
  double s = 0.0;
  for (const auto& z : f.samples()) s += std::abs(z);
  return s * f.grid().spacing();
}

// Candidate thresholds: the trivial splits and dyadic 2^{k'}.
std::vector<double> thresholds(double xi_spacing) {
  std::vector<double> th{-1.0};
  for (int k = WindowSystem::lowest_shell(xi_spacing); k <= 2; ++k) th.push_back(std::ldexp(1.0, k));
  th.push_back(std::numeric_limits<double>::infinity());
  return th;
}

template <typename Field, typename XiOf>
std::pair<Field, Field> split_by_xi(const Field& f, double theta, XiOf xi_of, std::size_t stride) {
  Field low = f, high = f;
  auto lc = low.coeffs();
  auto hc = high.coeffs();
  for (std::size_t idx = 0; idx < lc.size(); ++idx) {
    if (std::abs(xi_of(idx / stride)) <= theta) {
      hc[idx] = 0.0;
    } else {
      lc[idx] = 0.0;
    }
  }
  return {std::move(low), std::move(high)};
}

template <typename Field, typename NormX, typename NormY, typename XiOf>
Splitting minimize_split(const Field& f, double xi_spacing, std::size_t stride, XiOf xi_of, NormX nx,
                         NormY ny) {
  Splitting best;
  const auto coeffs = f.coeffs();
  // |xi| of the columns that carry mass; thresholds giving the same
  // partition of them are evaluated once.
  std::vector<double> active;
  for (std::size_t idx = 0; idx < coeffs.size(); ++idx) {
    if (coeffs[idx] != 0.0) active.push_back(std::abs(xi_of(idx / stride)));
  }
  if (active.empty()) return best;
  std::sort(active.begin(), active.end());
  best.value = std::numeric_limits<double>::infinity();
  std::ptrdiff_t last_count = -1;
  for (double theta : thresholds(xi_spacing)) {
    const auto count = std::upper_bound(active.begin(), active.end(), theta) - active.begin();
    if (count == last_count) continue;
    last_count = count;
    const auto [low, high] = split_by_xi(f, theta, xi_of, stride);
    for (bool low_in_x : {true, false}) {
      // The trivial splits are the same in both orientations.
      if (!low_in_x && (count == 0 || count == static_cast<std::ptrdiff_t>(active.size()))) continue;
      const double v = low_in_x ? nx(low) + ny(high) : nx(high) + ny(low);
      if (v < best.value) best = {v, theta, low_in_x};
    }
  }
  return best;
}

// Accumulates |w c|^2 per (k, j) for the F and N norms, k != 0.
double block_norm_sum(const SpaceTimeSpectral& u, double sigma, const WeightTable& wt, bool dual) {
  const auto& bs = wt.blocks();
  const auto& g = u.grid();
  const std::size_t m = g.n_times();
  const int K = bs.K();
  std::vector<std::vector<double>> bucket(static_cast<std::size_t>(2 * K + 1),
                                          std::vector<double>(kMaxShell + 1, 0.0));
  for (std::size_t i = 0; i < g.spatial().size(); ++i) {
    const double xi = u.xi(i);
    const auto ks = bs.blocks_at(xi);
    for (int k : ks) {
      if (k == 0) continue;
      const double chi = bs.chi(k, xi);
      if (chi == 0.0) continue;
      auto& row = bucket[static_cast<std::size_t>(k + K)];
      for (std::size_t n = 0; n < m; ++n) {
        const cplx c = u.coeff(i, n);
        if (c == 0.0) continue;
        const double lam = u.modulation(i, n);
        double a = chi * chi * std::norm(c);
        if (dual) a /= lam * lam + 1.0;
        const auto [lo, hi] = shell_range(lam);
        for (int j = lo; j <= hi; ++j) {
          const double e = WindowSystem::eta(j, lam);
          if (e != 0.0) row[static_cast<std::size_t>(j)] += e * e * a;
        }
      }
    }
  }
  const double scale = g.spatial().length() * g.t_length();
  double total = 0.0;
  for (int k = -K; k <= K; ++k) {
    if (k == 0) continue;
    const auto& row = bucket[static_cast<std::size_t>(k + K)];
    double z = 0.0;
    for (int j = 0; j <= kMaxShell; ++j) {
      if (row[static_cast<std::size_t>(j)] > 0.0) z += wt.z_weight(k, j) * std::sqrt(scale * row[static_cast<std::size_t>(j)]);
    }
    total += std::pow(1.0 + std::abs(bs.n(k)), 2.0 * sigma) * z * z;
  }
  return total;
}

SpaceTimeSpectral restrict_time_support(const SpaceTimeSpectral& u, std::vector<std::string>* warnings) {
  const auto s = spacetime_samples(u);
  const auto& g = u.grid();
  const std::size_t m = g.n_times();
  double peak = 0.0, outside = 0.0;
  for (std::size_t i = 0; i < g.spatial().size(); ++i) {
    for (std::size_t n = 0; n < m; ++n) {
      const double a = std::abs(s[i * m + n]);
      peak = std::max(peak, a);
      if (std::abs(g.t(n)) > kTimeSupport) outside = std::max(outside, a);
    }
  }
  if (outside <= 1e-12 * peak) return u;
  if (warnings) {
    std::ostringstream msg;
    msg << "u is not supported in |t| <= 4 (relative mass " << outside / peak
        << " outside); multiplied by eta_0(2t/5)";
    warnings->push_back(msg.str());
  }
  std::vector<cplx> factor(s.size());
  for (std::size_t i = 0; i < g.spatial().size(); ++i) {
    for (std::size_t n = 0; n < m; ++n) factor[i * m + n] = WindowSystem::eta0(0.4 * g.t(n));
  }
  return multiply_by_factor(u, factor);
}

double f_or_n_norm(const SpaceTimeSpectral& in, double sigma, const WeightTable& wt,
                   std::vector<std::string>* warnings, bool dual) {
  require(sigma >= 0.0, ErrorKind::Config, "sigma must be >= 0");
  const auto u = restrict_time_support(with_alpha(in, wt.alpha()), warnings);
  require_coverage(wt.blocks(), u);
  const double high = block_norm_sum(u, sigma, wt, dual);
  auto low = project(wt.blocks(), u, 0);
  if (dual) low = apply_modulation_weight(low, [](double lam) { return 1.0 / cplx(lam, 1.0); });
  const double z0 = z0_norm(low, wt).value;
  return std::sqrt(high + z0 * z0);
}

}  // namespace

double WindowSystem::eta0(double nu) {
  const double a = std::abs(nu);
  if (a <= 1.25) return 1.0;
  if (a >= 1.6) return 0.0;
  return smooth_step((1.6 - a) / 0.35);
}

double WindowSystem::eta(int j, double nu) {
  require(j >= 0, ErrorKind::Range, "modulation index j must be >= 0");
  if (j == 0) return eta0(nu);
  return eta_tilde(j, nu);
}

double WindowSystem::eta_tilde(int k, double nu) {
  return eta0(std::ldexp(nu, -k)) - eta0(std::ldexp(nu, 1 - k));
}

Interval WindowSystem::J(int j) {
  require(j >= 0, ErrorKind::Range, "modulation index j must be >= 0");
  if (j == 0) return {0.0, 2.0};
  return J_tilde(j);
}

Interval WindowSystem::J_tilde(int k) { return {std::ldexp(1.0, k - 1), std::ldexp(1.0, k + 1)}; }

int WindowSystem::lowest_shell(double xi_spacing) {
  require(xi_spacing > 0.0, ErrorKind::Config, "xi spacing must be positive");
  return static_cast<int>(std::floor(std::log2(xi_spacing / 1.6))) + 1;
}

double WindowSystem::partition_defect(double nu_max, std::size_t samples) {
  require(samples >= 2, ErrorKind::Config, "need at least two samples");
  int j_max = 0;
  while (std::ldexp(1.25, j_max) < nu_max) ++j_max;
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double nu = nu_max * static_cast<double>(s) / static_cast<double>(samples - 1);
    double sum = 0.0;
    for (int j = 0; j <= j_max; ++j) sum += eta(j, nu);
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

WeightTable::WeightTable(BlockSystem bs) : bs_(std::move(bs)), delta_((bs_.alpha() - 1.0) / 100.0) {}

double WeightTable::beta(int k, int j) const {
  require(k != 0, ErrorKind::Range, "beta_{k,j} is defined for k != 0");
  require(j >= 0, ErrorKind::Range, "modulation index j must be >= 0");
  const double nk = std::abs(bs_.n(k));
  return 1.0 + std::pow(std::ldexp(1.0, j) / std::pow(nk, alpha() + 1.0), 0.5 - delta_);
}

double WeightTable::z_weight(int k, int j) const { return std::pow(2.0, 0.5 * j) * beta(k, j); }

double WeightTable::low_weight(int j) const { return std::pow(2.0, j * (1.0 - delta_)); }

double z_norm(const SpaceTimeSpectral& in, int k, const WeightTable& wt) {
  require(k != 0, ErrorKind::Range, "z_norm needs k != 0; use z0_norm for k = 0");
  const auto f = with_alpha(in, wt.alpha());
  require_xi_support(f, wt.blocks().interval_I(k), "I_" + std::to_string(k));
  const auto& g = f.grid();
  const std::size_t m = g.n_times();
  std::vector<double> bucket(kMaxShell + 1, 0.0);
  for (std::size_t i = 0; i < g.spatial().size(); ++i) {
    for (std::size_t n = 0; n < m; ++n) {
      const double a = std::norm(f.coeff(i, n));
      if (a == 0.0) continue;
      const double lam = f.modulation(i, n);
      const auto [lo, hi] = shell_range(lam);
      for (int j = lo; j <= hi; ++j) {
        const double e = WindowSystem::eta(j, lam);
        if (e != 0.0) bucket[static_cast<std::size_t>(j)] += e * e * a;
      }
    }
  }
  const double scale = g.spatial().length() * g.t_length();
  double s = 0.0;
  for (int j = 0; j <= kMaxShell; ++j) {
    if (bucket[static_cast<std::size_t>(j)] > 0.0) s += wt.z_weight(k, j) * std::sqrt(scale * bucket[static_cast<std::size_t>(j)]);
  }
  return s;
}

double x0_norm(const SpaceTimeSpectral& in, double rho, const WeightTable& wt, X0Variant variant) {
  require(rho >= -1.0 && rho <= 1.0, ErrorKind::Config, "rho must lie in [-1, 1]");
  const auto f = with_alpha(in, wt.alpha());
  require_xi_support(f, wt.blocks().interval_I(0), "I_0");
  const auto& g = f.grid();
  const std::size_t m = g.n_times();
  const int lowest = WindowSystem::lowest_shell(g.spatial().frequency_spacing());
  const std::size_t n_kp = static_cast<std::size_t>(3 - lowest);
  std::vector<double> bucket((kMaxShell + 1) * n_kp, 0.0);
  for (std::size_t i = 0; i < g.spatial().size(); ++i) {
    const double xi = f.xi(i);
    int k_lo = lowest, k_hi = lowest;
    if (xi != 0.0) std::tie(k_lo, k_hi) = tilde_range(xi, lowest);
    for (int kp = k_lo; kp <= k_hi; ++kp) {
      const double ex = xi == 0.0 ? 1.0 : WindowSystem::eta_tilde(kp, xi);
      if (ex == 0.0) continue;
      for (std::size_t n = 0; n < m; ++n) {
        const double a = std::norm(f.coeff(i, n));
        if (a == 0.0) continue;
        const double nu = variant == X0Variant::Modulation ? f.modulation(i, n) : f.tau(i, n);
        const auto [lo, hi] = shell_range(nu);
        for (int j = lo; j <= hi; ++j) {
          const double e = WindowSystem::eta(j, nu);
          if (e != 0.0) bucket[static_cast<std::size_t>(j) * n_kp + static_cast<std::size_t>(kp - lowest)] += e * e * ex * ex * a;
        }
      }
    }
  }
  const double scale = g.spatial().length() * g.t_length();
  double s = 0.0;
  for (int j = 0; j <= kMaxShell; ++j) {
    for (std::size_t b = 0; b < n_kp; ++b) {
      const double v = bucket[static_cast<std::size_t>(j) * n_kp + b];
      if (v > 0.0) {
        s += wt.low_weight(j) * std::pow(2.0, rho * (lowest + static_cast<int>(b))) * std::sqrt(scale * v);
      }
    }
  }
  return s;
}

double y0_norm(const SpaceTimeSpectral& in, const WeightTable& wt) {
  const auto f = with_alpha(in, wt.alpha());
  require_xi_support(f, wt.blocks().interval_I(0), "I_0");
  const auto& g = f.grid();
  const std::size_t m = g.n_times();
  // Windowed coefficients grouped by shell; each cell feeds at most two.
  std::vector<std::vector<std::pair<std::size_t, cplx>>> shells(kMaxShell + 1);
  for (std::size_t i = 0; i < g.spatial().size(); ++i) {
    for (std::size_t n = 0; n < m; ++n) {
      const cplx c = f.coeff(i, n);
      if (c == 0.0) continue;
      const double tau = f.tau(i, n);
      const auto [lo, hi] = shell_range(tau);
      for (int j = lo; j <= hi; ++j) {
        const double e = WindowSystem::eta(j, tau);
        if (e != 0.0) shells[static_cast<std::size_t>(j)].emplace_back(i * m + n, e * c);
      }
    }
  }
  double s = 0.0;
  for (int j = 0; j <= kMaxShell; ++j) {
    const auto& cells = shells[static_cast<std::size_t>(j)];
    if (cells.empty()) continue;
    auto piece = SpaceTimeSpectral::zeros(g, f.frame(), f.alpha());
    auto pc = piece.coeffs();
    for (const auto& [idx, c] : cells) pc[idx] = c;
    const auto samples = spacetime_samples(piece);
    double l1 = 0.0;
    for (std::size_t i = 0; i < g.spatial().size(); ++i) {
      double l2 = 0.0;
      for (std::size_t n = 0; n < m; ++n) l2 += std::norm(samples[i * m + n]);
      l1 += std::sqrt(l2 * g.dt());
    }
    s += wt.low_weight(j) * l1 * g.spatial().spacing();
  }
  return s;
}

Splitting z0_norm(const SpaceTimeSpectral& in, const WeightTable& wt, X0Variant variant) {
  const auto f = with_alpha(in, wt.alpha());
  require_xi_support(f, wt.blocks().interval_I(0), "I_0");
  const auto& sg = f.grid().spatial();
  return minimize_split(
      f, sg.frequency_spacing(), f.grid().n_times(), [&](std::size_t i) { return sg.frequency(i); },
      [&](const SpaceTimeSpectral& x) { return x0_norm(x, -1.0, wt, variant); },
      [&](const SpaceTimeSpectral& y) { return y0_norm(y, wt); });
}

Splitting b0_norm(const SpectralField& f) {
  const auto& g = f.grid();
  const double tol = kSupportTol * f.max_abs_coeff();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(g.frequency(i)) > 5.0 && std::abs(f.coeff(i)) > tol) {
      fail(ErrorKind::Support, "B_0 argument has mass at |xi| = " + std::to_string(std::abs(g.frequency(i))) +
                                   " > 5, beyond the eta~ shells k' <= 2");
    }
  }
  return minimize_split(
      f, g.frequency_spacing(), 1, [&](std::size_t i) { return g.frequency(i); },
      [](const SpectralField& x) { return tilde_sum_1d(x, -1.0); },
      [](const SpectralField& y) { return l1_norm(y); });
}

double htilde_norm(const SpectralField& phi, double sigma, const WeightTable& wt) {
  require(sigma >= 0.0, ErrorKind::Config, "sigma must be >= 0");
  const auto& bs = wt.blocks();
  require_coverage(bs, phi);
  const auto& g = phi.grid();
  const int K = bs.K();
  std::vector<double> mass(static_cast<std::size_t>(2 * K + 1), 0.0);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double a = std::norm(phi.coeff(i));
    if (a == 0.0) continue;
    for (int k : bs.blocks_at(g.frequency(i))) {
      if (k == 0) continue;
      const double chi = bs.chi(k, g.frequency(i));
      mass[static_cast<std::size_t>(k + K)] += chi * chi * a;
    }
  }
  double total = 0.0;
  for (int k = -K; k <= K; ++k) {
    if (k == 0) continue;
    total += std::pow(1.0 + std::abs(bs.n(k)), 2.0 * sigma) * g.length() * mass[static_cast<std::size_t>(k + K)];
  }
  const double b0 = b0_norm(project(bs, phi, 0)).value;
  return std::sqrt(total + b0 * b0);
}

double f_norm(const SpaceTimeSpectral& u, double sigma, const WeightTable& wt, std::vector<std::string>* warnings) {
  return f_or_n_norm(u, sigma, wt, warnings, false);
}

double n_norm(const SpaceTimeSpectral& u, double sigma, const WeightTable& wt, std::vector<std::string>* warnings) {
  return f_or_n_norm(u, sigma, wt, warnings, true);
}

std::vector<BlockAtom> atomic_decompose(const SpaceTimeSpectral& in, int k, const WeightTable& wt) {
  const auto f = with_alpha(in, wt.alpha());
  require_xi_support(f, wt.blocks().interval_I(k), "I_" + std::to_string(k));
  const auto& g = f.grid();
  const std::size_t m = g.n_times();
  const int lowest = WindowSystem::lowest_shell(g.spatial().frequency_spacing());
  std::vector<BlockAtom> atoms;
  auto find = [&](int j, int kp) -> BlockAtom& {
    for (auto& a : atoms) {
      if (a.j == j && a.k_prime == kp) return a;
    }
    atoms.push_back(BlockAtom{k, j, kp, {}, {}, 0.0});
    return atoms.back();
  };
  for (std::size_t i = 0; i < g.spatial().size(); ++i) {
    const double xi = f.xi(i);
    int kp = 0;
    if (k == 0) {
      kp = xi == 0.0 ? lowest
                     : std::clamp(static_cast<int>(std::floor(std::log2(std::abs(xi)) + 0.5)), lowest, 2);
    }
    for (std::size_t n = 0; n < m; ++n) {
      const cplx c = f.coeff(i, n);
      if (c == 0.0) continue;
      auto& a = find(sharp_index(f.modulation(i, n)), kp);
      a.cells.push_back(i * m + n);
      a.values.push_back(c);
    }
  }
  const double scale = g.spatial().length() * g.t_length();
  for (auto& a : atoms) {
    double s = 0.0;
    for (const auto& v : a.values) s += std::norm(v);
    a.l2 = std::sqrt(scale * s);
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const BlockAtom& a, const BlockAtom& b) { return std::tie(a.k_prime, a.j) < std::tie(b.k_prime, b.j); });
  return atoms;
}

SpaceTimeSpectral assemble(const std::vector<BlockAtom>& atoms, const SpaceTimeSpectral& like) {
  auto out = SpaceTimeSpectral::zeros(like.grid(), like.frame(), like.alpha());
  auto c = out.coeffs();
  for (const auto& a : atoms) {
    for (std::size_t q = 0; q < a.cells.size(); ++q) {
      require(a.cells[q] < c.size(), ErrorKind::InputShape, "atom cell outside the table");
      c[a.cells[q]] += a.values[q];
    }
  }
  return out;
}

double atomic_weight_sum(const std::vector<BlockAtom>& atoms, const WeightTable& wt, double rho) {
  double s = 0.0;
  for (const auto& a : atoms) {
    const double w = a.k != 0 ? wt.z_weight(a.k, a.j) : wt.low_weight(a.j) * std::pow(2.0, rho * a.k_prime);
    s += w * a.l2;
  }
  return s;
}

LinearEstimateReport linear_estimate_check(const std::vector<SpectralField>& data, double sigma,
                                           const SpaceTimeGrid& grid, const WeightTable& wt) {
  LinearEstimateReport rep;
  rep.free_wave.id = "linear-free-wave";
  rep.duhamel.id = "linear-duhamel";
  rep.embedding.id = "embedding";
  for (auto* r : {&rep.free_wave, &rep.duhamel, &rep.embedding}) r->table.columns = {"index", "lhs", "rhs", "ratio"};
  std::vector<double> r1, r2, r3;
  const auto window = [](double t) { return WindowSystem::eta0(t); };
  auto record = [](EstimateReport& r, std::vector<double>& ratios, std::size_t idx, double lhs, double rhs) {
    const double ratio = lhs / rhs;
    r.table.add({static_cast<double>(idx), lhs, rhs, ratio});
    ratios.push_back(ratio);
    if (!std::isfinite(ratio)) r.violations.push_back("non-finite ratio for datum " + std::to_string(idx));
  };
  const double alpha = wt.alpha();
  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    const auto& phi = data[idx];
    require(phi.grid() == grid.spatial(), ErrorKind::InputShape, "datum grid differs from the space-time grid");
    if (phi.max_abs_coeff() == 0.0) {
      ++rep.free_wave.skipped;
      ++rep.duhamel.skipped;
      ++rep.embedding.skipped;
      continue;
    }
    const auto w = windowed_free_wave(phi.coeffs(), grid, alpha, window);
    const double fw = f_norm(w, sigma, wt);
    record(rep.free_wave, r1, idx, fw, htilde_norm(phi, sigma, wt));
    const auto d = windowed_duhamel(w, alpha, window);
    record(rep.duhamel, r2, idx, f_norm(d, sigma, wt), n_norm(w, sigma, wt));
    const auto mixed = to_mixed(w);
    const std::size_t m = grid.n_times();
    double sup = 0.0;
    for (std::size_t n = 0; n < m; ++n) {
      std::vector<cplx> c(grid.spatial().size());
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = mixed[i * m + n];
      sup = std::max(sup, htilde_norm(SpectralField(grid.spatial(), std::move(c), phi.real_valued()), sigma, wt));
    }
    record(rep.embedding, r3, idx, sup, fw);
  }
  rep.free_wave.samples = r1.size();
  rep.duhamel.samples = r2.size();
  rep.embedding.samples = r3.size();
  rep.free_wave.ratios = ratio_stats(r1);
  rep.duhamel.ratios = ratio_stats(r2);
  rep.embedding.ratios = ratio_stats(r3);
  return rep;
}

}  // namespace dgbo
