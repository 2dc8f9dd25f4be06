// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#include "dgbo/gauge.hpp"

#include <cmath>

#include "dgbo/errors.hpp"

namespace dgbo {
namespace {

constexpr double kLowBand = 0.5;

std::vector<cplx> as_complex(const std::vector<double>& s) { return {s.begin(), s.end()}; }

SpectralField times_low(const GaugeData& gd, const SpectralField& f) {
  return multiply_samples(f, as_complex(gd.phi_low().real_samples()));
}

SpectralField with_phase(const GaugeData& gd, const SpectralField& f, int k, double s) {
  if (gd.a(k) == 0.0) return f;
  return multiply_samples(f, gd.phase(k, s));
}

SpectralField block_of(const GaugeData& gd, const BlockSystem& bs, const SpectralField& v, int k) {
  return with_phase(gd, project(bs, v, k), k, -1.0);
}

SpectralField rk_unsplit(int k, const SpectralField& v, const SpectralField& vk, const GaugeData& gd,
                         const BlockSystem& bs) {
  const double alpha = bs.alpha();
  auto nl = dealiased_product(v, v);
  nl *= 0.5;
  nl += times_low(gd, v);
  auto out = with_phase(gd, project(bs, derivative(nl), k), k, -1.0);
  out *= -1.0;
  auto conj = with_phase(gd, dispersive_operator(with_phase(gd, vk, k, +1.0), alpha), k, -1.0);
  out -= conj;
  out += dispersive_operator(vk, alpha);
  return out;
}

SpectralField r0_impl(const SpectralField& v, const GaugeData& gd, const BlockSystem& bs) {
  const auto& low = gd.phi_low();
  auto q = dealiased_product(v, v);
  q *= 0.5;
  q += times_low(gd, v);
  auto ll = dealiased_product(low, low);
  ll *= 0.5;
  q += ll;
  auto out = project(bs, derivative(q), 0);
  out += dispersive_operator(project(bs, low, 0), bs.alpha());
  out *= -1.0;
  return out;
}

}  // namespace

LowHighSplit split_low_high(const SpectralField& phi) {
  phi.grid().require_low_band_resolution();
  auto low = truncate(phi, kLowBand);
  low.set_real_valued(phi.real_valued());
  auto high = phi - low;
  high.set_real_valued(phi.real_valued());
  return {std::move(low), std::move(high)};
}

SpectralField antiderivative_psi(const SpectralField& phi_low) {
  const auto& g = phi_low.grid();
  const double mean = std::abs(phi_low.coeff(0));
  if (mean > 1e-10 * phi_low.l2_norm()) {
    fail(ErrorKind::NonPeriodicPsi,
         "phi_low has mean " + std::to_string(phi_low.coeff(0).real()) +
             "; its antiderivative is not periodic on the torus");
  }
  auto psi = SpectralField::zeros(g, true);
  cplx at_origin = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (g.is_nyquist(i)) continue;
    const cplx c = phi_low.coeff(i) / cplx(0.0, g.frequency(i));
    psi.coeff(i) = c;
    at_origin += c;
  }
  // x = 0 is a grid point (index N/2) where every mode equals one.
  psi.coeff(0) = -at_origin.real();
  return psi;
}

double gauge_coefficient(const BlockSystem& bs, int k) {
  if (k == 0) return 0.0;
  const double n = bs.n(k);
  return -n * std::pow(std::abs(n), -bs.alpha()) / (bs.alpha() + 1.0);
}

GaugeData::GaugeData(const SpectralField& phi, const BlockSystem& bs, double eps0)
    : phi_low_(phi), phi_high_(phi), psi_(phi), K_(bs.K()), eps0_(eps0) {
  require(eps0 > 0.0, ErrorKind::Config, "eps0 must be positive");
  auto split = split_low_high(phi);
  phi_low_ = std::move(split.low);
  phi_high_ = std::move(split.high);
  psi_ = antiderivative_psi(phi_low_);
  psi_samples_ = psi_.real_samples();
  a_.resize(static_cast<std::size_t>(2 * K_ + 1));
  for (int k = -K_; k <= K_; ++k) a_[static_cast<std::size_t>(k + K_)] = gauge_coefficient(bs, k);
  within_budget_ = phi.l2_norm() <= eps0;
}

double GaugeData::a(int k) const {
  require(std::abs(k) <= K_, ErrorKind::Range, "block index " + std::to_string(k) + " outside range");
  return a_[static_cast<std::size_t>(k + K_)];
}

std::vector<cplx> GaugeData::phase(int k, double s) const {
  const double a = this->a(k);
  std::vector<cplx> out(psi_samples_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::polar(1.0, s * a * psi_samples_[i]);
  return out;
}

RenormalizedBlocks renormalize(const SpectralField& u, const GaugeData& gd, const BlockSystem& bs) {
  RenormalizedBlocks rb{u - gd.phi_low(), {}, bs.K()};
  require_coverage(bs, rb.v);
  rb.blocks.reserve(static_cast<std::size_t>(2 * bs.K() + 1));
  for (int k = -bs.K(); k <= bs.K(); ++k) rb.blocks.push_back(block_of(gd, bs, rb.v, k));
  return rb;
}

SpectralField reconstruct(const RenormalizedBlocks& rb, const GaugeData& gd, const BlockSystem& bs) {
  require(rb.K == bs.K(), ErrorKind::InputShape, "renormalized blocks built for another block range");
  auto u = gd.phi_low();
  u.set_real_valued(false);
  for (int k = -rb.K; k <= rb.K; ++k) u += with_phase(gd, rb.block(k), k, +1.0);
  return u;
}

double fixed_point_defect(const RenormalizedBlocks& rb, const GaugeData& gd, const BlockSystem& bs) {
  const double scale = rb.v.l2_norm();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (int k = -rb.K; k <= rb.K; ++k) {
    const auto& vk = rb.block(k);
    auto back = with_phase(gd, project(bs, with_phase(gd, vk, k, +1.0), k, true), k, -1.0);
    worst = std::max(worst, (back - vk).l2_norm() / scale);
  }
  return worst;
}

SpectralField rhs_R0(const SpectralField& v, const GaugeData& gd, const BlockSystem& bs) {
  return r0_impl(v, gd, bs);
}

SpectralField rhs_Rk(int k, const RenormalizedBlocks& rb, const GaugeData& gd, const BlockSystem& bs) {
  require(k != 0, ErrorKind::Range, "k = 0 has its own right-hand side (rhs_R0)");
  return rk_unsplit(k, rb.v, rb.block(k), gd, bs);
}

std::array<SpectralField, 5> rhs_Rk_split(int k, const RenormalizedBlocks& rb, const GaugeData& gd,
                                          const BlockSystem& bs) {
  require(k != 0, ErrorKind::Range, "k = 0 has its own right-hand side (rhs_R0)");
  const double alpha = bs.alpha();
  const double a = gd.a(k);
  const double nk = bs.n(k);
  const auto& v = rb.v;
  const auto& vk = rb.block(k);
  const auto da_vk = fractional_derivative(vk, alpha);
  const cplx i1(0.0, 1.0);

  auto sq = dealiased_product(v, v);
  sq *= 0.5;
  auto r1 = with_phase(gd, project(bs, derivative(sq), k), k, -1.0);
  r1 *= -1.0;

  auto drift = derivative(vk) - (i1 * nk * std::pow(std::abs(nk), -alpha)) * da_vk;
  auto r2 = times_low(gd, drift);
  r2 *= -1.0;

  auto r3 = with_phase(gd, dispersive_operator(with_phase(gd, vk, k, +1.0), alpha), k, -1.0);
  r3 -= dispersive_operator(vk, alpha);
  r3 -= ((alpha + 1.0) * i1 * a) * times_low(gd, da_vk);
  r3 *= -1.0;

  auto r4 = project(bs, times_low(gd, derivative(v)), k) - times_low(gd, derivative(project(bs, v, k)));
  r4 = with_phase(gd, r4, k, -1.0);
  r4 *= -1.0;

  auto r5 = (i1 * a) * times_low(gd, times_low(gd, vk));
  r5 += with_phase(gd, project(bs, multiply(v, derivative(gd.phi_low())), k), k, -1.0);
  r5 *= -1.0;

  return {std::move(r1), std::move(r2), std::move(r3), std::move(r4), std::move(r5)};
}

double residual_check(std::span<const double> times, std::span<const SpectralField> states,
                      const GaugeData& gd, const BlockSystem& bs, int k) {
  require(times.size() == states.size(), ErrorKind::InputShape, "times and states differ in length");
  if (times.size() < 5) {
    fail(ErrorKind::InsufficientData,
         "residual check needs at least 5 snapshots, got " + std::to_string(times.size()));
  }
  const double h = times[1] - times[0];
  for (std::size_t n = 1; n < times.size(); ++n) {
    require(std::abs((times[n] - times[n - 1]) - h) <= 1e-9 * std::abs(h), ErrorKind::InputShape,
            "snapshots must be equally spaced");
  }
  const double alpha = bs.alpha();

  // Interaction-picture profiles q_n = e^{-i t_n omega} v_k(t_n).
  std::vector<SpectralField> q;
  std::vector<SpectralField> v;
  q.reserve(states.size());
  v.reserve(states.size());
  for (std::size_t n = 0; n < states.size(); ++n) {
    v.push_back(states[n] - gd.phi_low());
    q.push_back(free_evolution(block_of(gd, bs, v.back(), k), -times[n], alpha));
  }

  double worst = 0.0;
  for (std::size_t n = 2; n + 2 < states.size(); ++n) {
    auto dq = q[n - 2] - q[n + 2];
    dq += 8.0 * (q[n + 1] - q[n - 1]);
    dq *= 1.0 / (12.0 * h);
    auto lhs = free_evolution(dq, times[n], alpha);
    const auto vk = block_of(gd, bs, v[n], k);
    const auto rhs = k == 0 ? r0_impl(v[n], gd, bs) : rk_unsplit(k, v[n], vk, gd, bs);
    worst = std::max(worst, (lhs - rhs).l2_norm());
  }
  return worst;
}

}  // namespace dgbo
