#include <cmath>
#include <random>

#include "doctest.h"
#include "dgbo/errors.hpp"
#include "dgbo/gauge.hpp"
#include "support.hpp"

using namespace dgbo;
using testing::max_abs_diff;

namespace {

// Mean-zero real datum: low modes 1..low_max (|xi| <= 1/2 on L = 256),
// high modes up to high_max.
SpectralField random_datum(const SpatialGrid& g, long low_max, long high_max, std::mt19937_64& rng,
                           double scale) {
  std::normal_distribution<double> nd;
  auto f = SpectralField::zeros(g, true);
  for (long m = 1; m <= high_max; ++m) {
    if (m > low_max && g.frequency(static_cast<std::size_t>(m)) <= 0.5) continue;
    const double amp = scale * std::exp(-3.0 * static_cast<double>(m) / static_cast<double>(high_max));
    const cplx c(amp * nd(rng), amp * nd(rng));
    f.coeff(g.index_of_mode(m)) = c;
    f.coeff(g.index_of_mode(-m)) = std::conj(c);
  }
  return f;
}

double rel_diff(const SpectralField& a, const SpectralField& b) {
  const double s = std::max(a.max_abs_coeff(), b.max_abs_coeff());
  return s == 0.0 ? 0.0 : max_abs_diff(a.coeffs(), b.coeffs()) / s;
}

// Zero-pad to twice the points on the same period.
SpectralField refine(const SpectralField& f) {
  const auto& g = f.grid();
  SpatialGrid fine(2 * g.size(), g.length());
  auto out = SpectralField::zeros(fine, f.real_valued());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_nyquist(i)) continue;
    out.coeff(fine.index_of_mode(g.mode(i))) = f.coeff(i);
  }
  return out;
}

SpectralField coarsen(const SpectralField& f, const SpatialGrid& g) {
  auto out = SpectralField::zeros(g, f.real_valued());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_nyquist(i)) continue;
    out.coeff(i) = f.coeff(f.grid().index_of_mode(g.mode(i)));
  }
  return out;
}

}  // namespace

TEST_CASE("low/high split") {
  SpatialGrid g(1024, 200.0 * kPi);  // xi spacing 0.01
  std::vector<double> s(1024);
  std::vector<double> lo(1024), hi(1024);
  for (std::size_t i = 0; i < 1024; ++i) {
    lo[i] = std::cos(0.3 * g.x(i));
    hi[i] = std::cos(3.0 * g.x(i));
    s[i] = lo[i] + hi[i];
  }
  auto split = split_low_high(to_spectral(s, g));
  const auto l = split.low.real_samples(), h = split.high.real_samples();
  for (std::size_t i = 0; i < 1024; ++i) {
    CHECK(std::abs(l[i] - lo[i]) < 1e-12);
    CHECK(std::abs(h[i] - hi[i]) < 1e-12);
  }
  std::vector<double> ones(1024, 1.0);
  CHECK(split_low_high(to_spectral(ones, g)).high.max_abs_coeff() == 0.0);
  CHECK(split_low_high(to_spectral(hi, g)).low.max_abs_coeff() < 1e-14);
  auto sum = split.low + split.high;
  CHECK(max_abs_diff(sum.coeffs(), to_spectral(s, g).coeffs()) == 0.0);
  CHECK_THROWS_AS(split_low_high(to_spectral(ones, SpatialGrid(1024, 20.0))), Error);
}

TEST_CASE("antiderivative") {
  SpatialGrid g(256, 256.0);
  const double xi0 = kTwoPi / g.length();
  CHECK(antiderivative_psi(SpectralField::zeros(g)).max_abs_coeff() == 0.0);
  std::vector<double> c(256), s(256);
  for (std::size_t i = 0; i < 256; ++i) {
    c[i] = std::cos(xi0 * g.x(i));
    s[i] = std::sin(xi0 * g.x(i));
  }
  const auto pc = antiderivative_psi(to_spectral(c, g)).real_samples();
  const auto ps = antiderivative_psi(to_spectral(s, g)).real_samples();
  for (std::size_t i = 0; i < 256; ++i) {
    CHECK(std::abs(pc[i] - std::sin(xi0 * g.x(i)) / xi0) < 1e-11);
    CHECK(std::abs(ps[i] - (1.0 - std::cos(xi0 * g.x(i))) / xi0) < 1e-11);
  }
  CHECK(std::abs(ps[128]) < 1e-13);  // x = 0
  std::vector<double> shifted(c);
  for (auto& v : shifted) v += 0.1;
  try {
    antiderivative_psi(to_spectral(shifted, g));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPeriodicPsi);
  }
}

TEST_CASE("gauge coefficients") {
  BlockSystem bs(1.5, 10);
  CHECK(gauge_coefficient(bs, 0) == 0.0);
  CHECK(gauge_coefficient(bs, 1) == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(gauge_coefficient(bs, -1) == doctest::Approx(0.2).epsilon(1e-15));
  for (int k = 1; k <= 10; ++k) CHECK(gauge_coefficient(bs, -k) == -gauge_coefficient(bs, k));
}

TEST_CASE("renormalize and reconstruct") {
  SpatialGrid g(512, 256.0);
  BlockSystem bs(1.5, 30);
  std::mt19937_64 rng(31);
  auto phi = random_datum(g, 20, 150, rng, 0.05);
  GaugeData gd(phi, bs);

  auto rb0 = renormalize(gd.phi_low(), gd, bs);
  for (const auto& b : rb0.blocks) CHECK(b.max_abs_coeff() == 0.0);

  auto rb = renormalize(phi, gd, bs);
  CHECK(max_abs_diff(rb.block(0).coeffs(), project(bs, rb.v, 0).coeffs()) == 0.0);

  double worst = 0.0, worst_fp = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto u = random_datum(g, 20, 150, rng, 0.05);
    GaugeData gu(u, bs);
    auto r = renormalize(u, gu, bs);
    worst = std::max(worst, rel_diff(reconstruct(r, gu, bs), u));
    worst_fp = std::max(worst_fp, fixed_point_defect(r, gu, bs));
  }
  CHECK(worst <= 1e-10);
  CHECK(worst_fp <= 1e-10);
}

TEST_CASE("R_0") {
  SpatialGrid g(512, 256.0);
  BlockSystem bs(1.5, 30);
  std::mt19937_64 rng(5);
  auto zero = SpectralField::zeros(g);
  GaugeData g0(zero, bs);
  CHECK(rhs_R0(zero, g0, bs).max_abs_coeff() == 0.0);

  auto phi = random_datum(g, 20, 150, rng, 0.05);
  GaugeData gd(phi, bs);
  const auto& low = gd.phi_low();
  auto only_low = rhs_R0(zero, gd, bs);
  auto expect = dispersive_operator(project(bs, low, 0), 1.5);
  auto ll = multiply(low, low);
  ll *= 0.5;
  expect += project(bs, derivative(ll), 0);
  expect *= -1.0;
  CHECK(rel_diff(only_low, expect) < 1e-13);

  // Oracle: every product evaluated exactly on a grid twice as fine.
  auto v = random_datum(g, 20, 150, rng, 0.05);
  auto r0 = rhs_R0(v, gd, bs);
  BlockSystem bf(1.5, 30);
  const auto vf = refine(v), lf = refine(low);
  auto q = multiply(vf, vf);
  q *= 0.5;
  q += multiply(lf, vf);
  auto lsq = multiply(lf, lf);
  lsq *= 0.5;
  q += lsq;
  auto oracle = project(bf, derivative(q), 0);
  oracle += dispersive_operator(project(bf, lf, 0), 1.5);
  oracle *= -1.0;
  CHECK(rel_diff(r0, coarsen(oracle, g)) < 1e-10);
}

TEST_CASE("R_k and its five-term split") {
  SpatialGrid g(2048, 256.0);
  BlockSystem bs(1.5, 30);
  std::mt19937_64 rng(8);
  auto phi = random_datum(g, 20, 600, rng, 0.05);
  GaugeData gd(phi, bs);
  auto rb = renormalize(phi, gd, bs);

  for (int k : {-4, -2, -1, 1, 3, 4}) {
    const auto total = rhs_Rk(k, rb, gd, bs);
    const auto parts = rhs_Rk_split(k, rb, gd, bs);
    auto sum = parts[0];
    for (int i = 1; i < 5; ++i) sum += parts[static_cast<std::size_t>(i)];
    CHECK(rel_diff(sum, total) <= 1e-12);
  }

  // Without a low part only the nonlinearity survives.
  auto high = random_datum(g, 0, 600, rng, 0.05);
  GaugeData gh(high, bs);
  CHECK(gh.phi_low().max_abs_coeff() == 0.0);
  auto rh = renormalize(high, gh, bs);
  for (int k : {-3, 2}) {
    auto sq = dealiased_product(high, high);
    sq *= -0.5;
    const auto expect = project(bs, derivative(sq), k);
    CHECK(rel_diff(rhs_Rk(k, rh, gh, bs), expect) < 1e-12);
    const auto parts = rhs_Rk_split(k, rh, gh, bs);
    CHECK(rel_diff(parts[0], expect) < 1e-12);
    for (int i = 1; i < 5; ++i) CHECK(parts[static_cast<std::size_t>(i)].max_abs_coeff() <= 1e-12 * expect.max_abs_coeff());
  }

  // v = 0 gives zero right-hand sides.
  auto rz = renormalize(gd.phi_low(), gd, bs);
  for (int k : {-4, 5}) CHECK(rhs_Rk(k, rz, gd, bs).max_abs_coeff() == 0.0);
  CHECK_THROWS_AS(rhs_Rk(0, rb, gd, bs), Error);
}

TEST_CASE("gauged equation is equivalent to the projected v-equation") {
  // Manufactured v(t) with known d_t v: e^{i a Psi}(d_t v_k + D^a d_x v_k - R_k)
  // must equal P_k(v_t + D^a d_x v + D^a d_x phi_low + d_x(u^2/2)).
  SpatialGrid g(2048, 256.0);
  BlockSystem bs(1.5, 30);
  std::mt19937_64 rng(12);
  auto phi = random_datum(g, 20, 600, rng, 0.05);
  GaugeData gd(phi, bs);
  auto v = random_datum(g, 0, 600, rng, 0.05);
  auto vt = random_datum(g, 0, 600, rng, 0.3);
  auto rb = renormalize(gd.phi_low() + v, gd, bs);
  auto u = gd.phi_low() + v;
  auto usq = dealiased_product(u, u);
  usq *= 0.5;
  auto veq = vt + dispersive_operator(v, 1.5) + dispersive_operator(gd.phi_low(), 1.5) + derivative(usq);

  for (int k : {-4, -1, 2, 4}) {
    const double a = gd.a(k);
    auto dt_vk = multiply_samples(project(bs, vt, k), gd.phase(k, -1.0));
    const auto parts = rhs_Rk_split(k, rb, gd, bs);
    auto rk = parts[0];
    for (int i = 1; i < 5; ++i) rk += parts[static_cast<std::size_t>(i)];
    auto lhs = multiply_samples(dt_vk + dispersive_operator(rb.block(k), 1.5) - rk, gd.phase(k, 1.0));
    CHECK(a != 0.0);
    CHECK(rel_diff(lhs, project(bs, veq, k)) < 1e-11);
  }
}

TEST_CASE("residual check input validation") {
  SpatialGrid g(256, 256.0);
  BlockSystem bs(1.5, 20);
  auto z = SpectralField::zeros(g);
  GaugeData gd(z, bs);
  std::vector<double> t{0.0, 0.1, 0.2, 0.3};
  std::vector<SpectralField> s(4, z);
  try {
    residual_check(t, s, gd, bs, 1);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }
  t.push_back(0.4);
  s.push_back(z);
  for (int k : {0, 1, -3}) CHECK(residual_check(t, s, gd, bs, k) == 0.0);
}
