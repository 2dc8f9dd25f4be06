// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#include "dgbo/blocks.hpp"

#include <algorithm>
#include <sstream>

#include "dgbo/errors.hpp"

namespace dgbo {
namespace {

double sigma(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

constexpr double kActiveTolerance = 1e-13;

// Cutoff on the nonnegative block chain, k >= 0, xi any sign.
// Transition k -> k+1 occupies the middle third of [n_k, n_{k+1}].
double chi_nonnegative(const std::vector<double>& n, int k, double xi) {
  if (k == 0) {
    const double t = std::abs(xi);
    const double a = n[1] / 3.0, w = n[1] / 3.0;
    if (t <= a) return 1.0;
    if (t >= a + w) return 0.0;
    return 1.0 - smooth_step((t - a) / w);
  }
  const double w_lo = (n[k] - n[k - 1]) / 3.0;
  const double a_lo = n[k - 1] + w_lo;
  const double w_hi = (n[k + 1] - n[k]) / 3.0;
  const double a_hi = n[k] + w_hi;
  if (xi <= a_lo || xi >= a_hi + w_hi) return 0.0;
  if (xi < a_lo + w_lo) return smooth_step((xi - a_lo) / w_lo);
  if (xi <= a_hi) return 1.0;
  return 1.0 - smooth_step((xi - a_hi) / w_hi);
}

}  // namespace

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = sigma(x), b = sigma(1.0 - x);
  return a / (a + b);
}

BlockSystem::BlockSystem(double alpha, int K) : alpha_(alpha), K_(K) {
  require(K >= 2, ErrorKind::Config, "block range K must be >= 2, got " + std::to_string(K));
  require(alpha > 1.0 && alpha < 2.0, ErrorKind::Config,
          "alpha must lie in the open interval (1,2)");
  n_pos_.resize(static_cast<std::size_t>(K) + 2);
  n_pos_[0] = 0.0;
  n_pos_[1] = 4.0;
  for (std::size_t k = 1; k + 1 < n_pos_.size(); ++k) n_pos_[k + 1] = n_pos_[k] + std::sqrt(n_pos_[k]);
  covered_ = n_pos_[K_] + (n_pos_[K_ + 1] - n_pos_[K_]) / 3.0;
}

void BlockSystem::check_k(int k, int limit) const {
  if (std::abs(k) > limit) {
    fail(ErrorKind::Range, "block index " + std::to_string(k) + " outside [-" +
                               std::to_string(limit) + ", " + std::to_string(limit) + "]");
  }
}

double BlockSystem::n(int k) const {
  check_k(k, K_ + 1);
  const double v = n_pos_[static_cast<std::size_t>(std::abs(k))];
  return k < 0 ? -v : v;
}

Interval BlockSystem::interval_I(int k) const {
  check_k(k, K_);
  return {(5.0 * n(k - 1) + n(k)) / 6.0, (5.0 * n(k + 1) + n(k)) / 6.0};
}

Interval BlockSystem::chi_support(int k) const {
  check_k(k, K_);
  return {(2.0 * n(k - 1) + n(k)) / 3.0, (2.0 * n(k + 1) + n(k)) / 3.0};
}

Interval BlockSystem::chi_plateau(int k) const {
  check_k(k, K_);
  if (k == 0) return {-n(1) / 3.0, n(1) / 3.0};
  const int a = std::abs(k);
  const Interval pos{n(a - 1) + 2.0 * (n(a) - n(a - 1)) / 3.0, n(a) + (n(a + 1) - n(a)) / 3.0};
  return k > 0 ? pos : Interval{-pos.hi, -pos.lo};
}

double BlockSystem::chi(int k, double xi) const {
  if (std::abs(k) > K_) return 0.0;
  return k >= 0 ? chi_nonnegative(n_pos_, k, xi) : chi_nonnegative(n_pos_, -k, -xi);
}

std::vector<int> BlockSystem::blocks_at(double xi) const {
  const double t = std::abs(xi);
  const auto it = std::upper_bound(n_pos_.begin(), n_pos_.end(), t);
  const int k = static_cast<int>(it - n_pos_.begin()) - 1;
  std::vector<int> out;
  const int sign = xi < 0.0 ? -1 : 1;
  for (int c : {k, k + 1}) {
    if (c <= K_) out.push_back(sign * c);
  }
  if (xi == 0.0) out = {0};
  return out;
}

int BlockSystem::dominant_block(double xi) const {
  const auto ks = blocks_at(xi);
  int best = ks.front();
  double v = -1.0;
  for (int k : ks) {
    const double c = chi(k, xi);
    if (c > v) {
      v = c;
      best = k;
    }
  }
  return best;
}

DerivativeBound chi_derivative_bound(const BlockSystem& bs, int order) {
  require(order == 1 || order == 2, ErrorKind::Config, "derivative order must be 1 or 2");
  DerivativeBound out;
  out.order = order;
  constexpr int kSamples = 2000;
  for (int k = 0; k <= bs.K(); ++k) {
    const Interval sup = bs.chi_support(k);
    const Interval pl = bs.chi_plateau(k);
    std::vector<Interval> zones;
    if (k == 0) {
      zones.push_back({pl.hi, sup.hi});
    } else {
      zones.push_back({sup.lo, pl.lo});
      zones.push_back({pl.hi, sup.hi});
    }
    double worst = 0.0;
    for (const auto& z : zones) {
      const double h = z.length() / kSamples;
      for (int i = 0; i <= kSamples; ++i) {
        const double x = z.lo + i * h;
        const double f_p = bs.chi(k, x + h), f_0 = bs.chi(k, x), f_m = bs.chi(k, x - h);
        const double d = order == 1 ? (f_p - f_m) / (2.0 * h) : (f_p - 2.0 * f_0 + f_m) / (h * h);
        worst = std::max(worst, std::abs(d));
      }
    }
    const double c = worst * std::pow(1.0 + std::abs(bs.n(k)), 0.5 * order);
    out.k.push_back(k);
    out.constant.push_back(c);
    out.max_constant = std::max(out.max_constant, c);
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < out.k.size(); ++i) {
    if (2 * out.k[i] < bs.K()) continue;
    lo = std::min(lo, out.constant[i]);
    hi = std::max(hi, out.constant[i]);
  }
  out.tail_spread = hi / lo - 1.0;
  return out;
}

double partition_of_unity_defect(const BlockSystem& bs, std::size_t samples) {
  const double lim = bs.covered_limit();
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double xi = -lim + 2.0 * lim * static_cast<double>(i) / static_cast<double>(samples - 1);
    double s = 0.0;
    for (int k = -bs.K(); k <= bs.K(); ++k) s += bs.chi(k, xi);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

namespace {

void report_uncovered(const BlockSystem& bs, const std::vector<double>& bad) {
  std::ostringstream msg;
  msg << bad.size() << " active frequencies beyond the covered range |xi| <= " << bs.covered_limit()
      << " (K = " << bs.K() << "):";
  for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 8); ++i) msg << ' ' << bad[i];
  if (bad.size() > 8) msg << " ...";
  fail(ErrorKind::Coverage, msg.str());
}

}  // namespace

void require_coverage(const BlockSystem& bs, const SpectralField& f) {
  const double tol = kActiveTolerance * f.max_abs_coeff();
  std::vector<double> bad;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double xi = f.grid().frequency(i);
    if (!bs.covers(xi) && std::abs(f.coeff(i)) > tol) bad.push_back(xi);
  }
  if (!bad.empty()) report_uncovered(bs, bad);
}

void require_coverage(const BlockSystem& bs, const SpaceTimeSpectral& f) {
  double peak = 0.0;
  for (auto c : f.coeffs()) peak = std::max(peak, std::abs(c));
  const double tol = kActiveTolerance * peak;
  std::vector<double> bad;
  const std::size_t m = f.grid().n_times();
  for (std::size_t i = 0; i < f.grid().spatial().size(); ++i) {
    if (bs.covers(f.xi(i))) continue;
    for (std::size_t n = 0; n < m; ++n) {
      if (std::abs(f.coeff(i, n)) > tol) {
        bad.push_back(f.xi(i));
        break;
      }
    }
  }
  if (!bad.empty()) report_uncovered(bs, bad);
}

SpectralField project(const BlockSystem& bs, const SpectralField& f, int k, bool sharp) {
  require(std::abs(k) <= bs.K(), ErrorKind::Range, "block index " + std::to_string(k) + " outside range");
  require_coverage(bs, f);
  SpectralField out = f;
  const Interval I = bs.interval_I(k);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double xi = f.grid().frequency(i);
    out.coeff(i) *= sharp ? (I.contains(xi) ? 1.0 : 0.0) : bs.chi(k, xi);
  }
  out.set_real_valued(f.real_valued() && k == 0);
  return out;
}

SpaceTimeSpectral project(const BlockSystem& bs, const SpaceTimeSpectral& f, int k, bool sharp) {
  require(std::abs(k) <= bs.K(), ErrorKind::Range, "block index " + std::to_string(k) + " outside range");
  require_coverage(bs, f);
  const Interval I = bs.interval_I(k);
  return apply_xi_symbol(f, [&](double xi) {
    return cplx(sharp ? (I.contains(xi) ? 1.0 : 0.0) : bs.chi(k, xi));
  });
}

FrequencyCell u_cell(const BlockSystem& bs, int k) {
  FrequencyCell c;
  c.k = k;
  if (k >= 1) {
    c.parts[0] = bs.interval_I(k);
    c.parts[1] = bs.interval_I(-k);
  } else {
    const double a = std::ldexp(1.0, k + 1), b = std::ldexp(1.0, k + 3);
    c.parts[0] = {a, b};
    c.parts[1] = {-b, -a};
  }
  return c;
}

double d_alpha(const BlockSystem& bs, int k1, int k2, int k3) {
  return d_alpha(u_cell(bs, k1), u_cell(bs, k2), u_cell(bs, k3), bs.alpha());
}

double d_alpha(const FrequencyCell& u1, const FrequencyCell& u2, const FrequencyCell& u3,
               double alpha) {
  double best = kInfeasible;
  for (const auto& A : u1.parts) {
    for (const auto& B : u2.parts) {
      for (const auto& C : u3.parts) {
        const double lo = std::max(A.lo, C.lo - B.hi);
        const double hi = std::min(A.hi, C.hi - B.lo);
        if (lo > hi) continue;
        // For fixed xi1 the feasible xi2 form a segment on which |xi2|^a
        // covers an interval, so the inner infimum is a distance.
        auto inner = [&](double x) {
          double s_lo = std::max(B.lo, C.lo - x);
          double s_hi = std::min(B.hi, C.hi - x);
          if (s_lo > s_hi) s_lo = s_hi = 0.5 * (s_lo + s_hi);
          double r_lo, r_hi;
          if (s_lo <= 0.0 && s_hi >= 0.0) {
            r_lo = 0.0;
            r_hi = std::pow(std::max(-s_lo, s_hi), alpha);
          } else {
            const double a = std::abs(s_lo), b = std::abs(s_hi);
            r_lo = std::pow(std::min(a, b), alpha);
            r_hi = std::pow(std::max(a, b), alpha);
          }
          const double v = std::pow(std::abs(x), alpha);
          return v < r_lo ? r_lo - v : (v > r_hi ? v - r_hi : 0.0);
        };
        constexpr int kGrid = 4096;
        const double h = (hi - lo) / kGrid;
        int arg = 0;
        double fmin = inner(lo);
        for (int i = 1; i <= kGrid; ++i) {
          const double v = inner(lo + i * h);
          if (v < fmin) {
            fmin = v;
            arg = i;
          }
        }
        if (h > 0.0 && fmin > 0.0) {
          double a = lo + std::max(arg - 1, 0) * h, b = lo + std::min(arg + 1, kGrid) * h;
          const double g = 0.5 * (std::sqrt(5.0) - 1.0);
          double c = b - g * (b - a), d = a + g * (b - a);
          double fc = inner(c), fd = inner(d);
          for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
            if (fc < fd) {
              b = d;
              d = c;
              fd = fc;
              c = b - g * (b - a);
              fc = inner(c);
            } else {
              a = c;
              c = d;
              fc = fd;
              d = a + g * (b - a);
              fd = inner(d);
            }
          }
          fmin = std::min({fmin, fc, fd});
        }
        best = std::min(best, fmin);
      }
    }
  }
  return best;
}

}  // namespace dgbo
