#include <chrono>
#include <cmath>
#include <random>

#include "doctest.h"
#include "dgbo/errors.hpp"
#include "dgbo/verifier.hpp"
#include "support.hpp"

using namespace dgbo;
using testing::rel_err;

namespace {

Atom constant_atom(const BlockSystem& bs, const Lattice& lat, int k, int j) {
  return make_atom(bs, lat, AtomSupport::UJ, k, j, [](double, double) { return cplx(1.0); });
}

LatticeField single_cell(const Lattice& lat, long xi, long mu, cplx v) {
  LatticeField f;
  f.lattice = lat;
  f.columns.push_back({xi, mu, {v}});
  return f;
}

double bspline2(double x) {
  x = std::abs(x);
  if (x < 0.5) return 0.75 - x * x;
  if (x < 1.5) return 0.5 * (1.5 - x) * (1.5 - x);
  return 0.0;
}

// Smooth factor supported in |t| <= 9.6, x-major samples.
std::vector<cplx> smooth_factor(const SpaceTimeGrid& g, double t_scale) {
  std::vector<cplx> m(g.size());
  for (std::size_t i = 0; i < g.spatial().size(); ++i) {
    const double x = g.spatial().x(i);
    for (std::size_t n = 0; n < g.n_times(); ++n) {
      m[i * g.n_times() + n] = WindowSystem::eta0(g.t(n) / t_scale) * (1.0 + 0.5 * std::exp(-x * x / 4.0));
    }
  }
  return m;
}

}  // namespace

TEST_CASE("resonance closed forms") {
  const double a = 1.5;
  CHECK(resonance(1.0, 1.0, a) == doctest::Approx(std::pow(2.0, 2.5) - 2.0).epsilon(1e-14));
  CHECK(resonance_ratio(1.0, 1.0, a) == doctest::Approx((std::pow(2.0, 2.5) - 2.0) / std::pow(2.0, 1.5)).epsilon(1e-14));
  CHECK(resonance(3.0, -3.0, a) == 0.0);
  CHECK(resonance_ratio(3.0, -3.0, a) == 0.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int s = 0; s < 200; ++s) {
    const double x = u(rng), y = u(rng);
    const double direct = -dispersion_symbol(x + y, a) + dispersion_symbol(x, a) + dispersion_symbol(y, a);
    CHECK(resonance(x, y, a) == doctest::Approx(direct).epsilon(1e-9).scale(1.0));
    CHECK(resonance(x, y, a) == doctest::Approx(resonance(y, x, a)).epsilon(1e-14));
    CHECK(resonance(-x, -y, a) == doctest::Approx(-resonance(x, y, a)).epsilon(1e-14));
  }
  // Near the degenerate set the ratio stays in the band without cancellation.
  for (int s = 1; s <= 40; ++s) {
    const double r = resonance_ratio(7.0, -7.0 * (1.0 - std::exp2(-s)), a);
    CHECK(r >= 1.0 / 16.0);
    CHECK(r <= 16.0);
  }
}

TEST_CASE("resonance bound over a million samples") {
  const auto t0 = std::chrono::steady_clock::now();
  for (double a : {1.1, 1.5, 1.9}) {
    const auto rep = resonance_bound_check(a, 1000000, 3);
    CHECK(rep.violations.empty());
    CHECK(rep.samples + rep.skipped == 1000000);
    CHECK(rep.ratios.min >= 1.0 / 16.0);
    CHECK(rep.ratios.max <= 16.0);
  }
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(60));
  CHECK_THROWS_AS(resonance_bound_check(2.0, 10), Error);
}

TEST_CASE("J on single cells") {
  const BlockSystem bs(1.5, 6);
  const Lattice lat;
  const double a = 1.5;
  const long i1 = 5, i2 = 7;
  const double om = resonance(i1 * lat.dxi, i2 * lat.dxi, a);
  const auto f = single_cell(lat, i1, 3, 1.0);
  const auto g = single_cell(lat, i2, -2, 1.0);
  const double c2 = lat.cell_measure() * lat.cell_measure();
  // Sweep the h cell across the target; the weights are the quadratic B-spline.
  double total = 0.0;
  for (long c = -80; c <= 80; ++c) {
    const auto h = single_cell(lat, i1 + i2, c, 1.0);
    const cplx J = j_functional(f, g, h, a);
    CHECK(std::abs(J - c2 * bspline2(static_cast<double>(c - 1) - om / lat.dmu)) <= 1e-15);
    total += J.real();
  }
  CHECK(total == doctest::Approx(c2).epsilon(1e-13));
  // Wrong xi column: zero.
  CHECK(j_functional(f, g, single_cell(lat, i1 + i2 + 1, 1, 1.0), a) == cplx(0.0));
  CHECK(j_functional(f, LatticeField{lat, {}}, single_cell(lat, i1 + i2, 1, 1.0), a) == cplx(0.0));
}

TEST_CASE("J is trilinear") {
  const BlockSystem bs(1.5, 6);
  const Lattice lat;
  std::mt19937_64 rng(11);
  const auto f = random_atom(bs, lat, AtomSupport::UJ, 1, 1, rng);
  const auto g = random_atom(bs, lat, AtomSupport::UJ, 2, 2, rng);
  const auto h1 = random_atom(bs, lat, AtomSupport::UJ, -3, 2, rng);
  const auto h2 = random_atom(bs, lat, AtomSupport::UJ, -3, 2, rng);
  const cplx s(0.3, -1.2);
  auto sum = h1.field;
  for (std::size_t c = 0; c < sum.columns.size(); ++c) {
    for (std::size_t v = 0; v < sum.columns[c].values.size(); ++v) {
      sum.columns[c].values[v] = s * h1.field.columns[c].values[v] + h2.field.columns[c].values[v];
    }
  }
  const cplx lhs = j_functional(f.field, g.field, sum, 1.5);
  const cplx rhs = s * j_functional(f.field, g.field, h1.field, 1.5) + j_functional(f.field, g.field, h2.field, 1.5);
  CHECK(std::abs(lhs) > 0.0);
  CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
  validate_atom(bs, f);
  validate_atom(bs, reflect(f));
}

TEST_CASE("duality and permutation identities") {
  const BlockSystem bs(1.5, 6);
  const auto rep = trilinear_duality_check(bs, 200, Lattice{}, 7);
  CHECK(rep.triples == 200);
  CHECK(rep.duality_error <= 1e-8);
  CHECK(rep.swap_error <= 1e-10);
  CHECK(rep.reflect_error <= 1e-10);
}

TEST_CASE("trilinear estimates show no growth") {
  const BlockSystem bs(1.5, 6);
  TrilinearSweep sweep;
  sweep.instances = 48;
  sweep.jobs = 4;
  for (auto part : {TrilinearPart::A, TrilinearPart::B, TrilinearPart::C}) {
    const auto rep = check_trilinear(part, bs, sweep);
    INFO(std::string(to_string(part)));
    CHECK(rep.passed());
    CHECK(rep.samples > 20);
    CHECK(rep.ratios.max <= sweep.ceiling);
    for (const auto& v : rep.violations) MESSAGE(v);
  }
  // Thread count does not change the result.
  sweep.instances = 12;
  const auto one = check_trilinear(TrilinearPart::C, bs, [&] { auto s = sweep; s.jobs = 1; return s; }());
  const auto many = check_trilinear(TrilinearPart::C, bs, sweep);
  CHECK(one.table.rows == many.table.rows);
}

TEST_CASE("trilinear saturation slope") {
  const BlockSystem bs(1.5, 6);
  const auto r = trilinear_saturation(bs, {-2, -2, -2}, {1, 2, 3, 4, 5, 6}, 9, Lattice{});
  CHECK(r.has_prediction);
  CHECK(r.slope == doctest::Approx(0.5).epsilon(0.2));
  CHECK(std::abs(r.slope - 0.5) <= 0.1);
}

TEST_CASE("bilinear lemmas on default instances") {
  const WeightTable wt(BlockSystem(1.5, 22));
  const auto& bs = wt.blocks();
  for (auto lemma : {BilinearLemma::L61a, BilinearLemma::L61b, BilinearLemma::L62, BilinearLemma::L63}) {
    INFO(std::string(to_string(lemma)));
    BilinearSweep sweep;
    sweep.instances = default_bilinear_instances(lemma, bs, sweep.regime);
    REQUIRE(!sweep.instances.empty());
    sweep.jobs = 4;
    const auto rep = check_bilinear(lemma, wt, sweep);
    for (const auto& v : rep.violations) MESSAGE(v);
    CHECK(rep.passed());
    CHECK(rep.samples > 0);
  }
  CHECK(bilinear_lemma_from_string("6.2") == BilinearLemma::L62);
  CHECK_THROWS_AS(bilinear_lemma_from_string("7.1"), Error);
}

TEST_CASE("bilinear regime gates") {
  const BlockSystem bs(1.5, 20);
  const BilinearRegime regime;
  try {
    validate_bilinear(BilinearLemma::L61a, bs, {5, 5, 2, 0}, regime);
    FAIL("expected a regime error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Regime);
    CHECK(std::string(e.what()).find("n_threshold") != std::string::npos);
  }
  CHECK_THROWS_AS(validate_bilinear(BilinearLemma::L61b, bs, {0, 18, 18, 3}, regime), Error);
  CHECK(bilinear_lambda(bs, 10, 10, 20, 16.0) == 1.0);
  CHECK(bilinear_lambda(bs, 18, 19, 20, 1e-3) < 1.0);
}

TEST_CASE("S norms") {
  const SpaceTimeGrid g(SpatialGrid(64, 32.0), 256, 24.0);
  std::vector<cplx> zero(g.size());
  CHECK(s_norm(zero, g, FactorSpace::SInf, 2).value == 0.0);
  // Order 0 of S^2 is the space-time L^2 norm.
  const auto m = smooth_factor(g, 2.0);
  double s = 0.0;
  for (auto v : m) s += std::norm(v);
  const double dx = g.spatial().length() / 64.0, dt = 24.0 / 256.0;
  CHECK(s_norm(m, g, FactorSpace::S2, 0).value == doctest::Approx(std::sqrt(dx * dt * s)).epsilon(1e-12));
  // Order 0 of S^inf is the sup norm.
  CHECK(s_norm(m, g, FactorSpace::SInf, 0).value == doctest::Approx(testing::max_abs(m)).epsilon(1e-12));
  // Supported in |t| <= 9.6: fine for S^inf, too wide for S^2.
  const auto wide = smooth_factor(g, 6.0);
  CHECK_NOTHROW(s_norm(wide, g, FactorSpace::SInf, 1));
  CHECK_THROWS_AS(s_norm(wide, g, FactorSpace::S2, 1), Error);
  const auto capped = s_norm(m, g, FactorSpace::SInf, 60);
  CHECK(capped.order == max_factor_order(g));
  CHECK(capped.warnings.size() == 1);
  CHECK(s_norm(m, g, FactorSpace::SInf, 2).value > s_norm(m, g, FactorSpace::SInf, 1).value);
}

TEST_CASE("multiplication estimate decays across blocks") {
  const double alpha = 1.5;
  const WeightTable wt(BlockSystem(alpha, 10));
  const SpaceTimeGrid g(SpatialGrid(256, 64.0), 2048, 24.0);
  const auto m = smooth_factor(g, 6.0);
  for (int eps : {0, -1}) {
    MultiplicationSweep sweep;
    sweep.epsilon = eps;
    const auto rep = check_multiplication(wt, g, m, sweep);
    for (const auto& v : rep.violations) MESSAGE(v);
    CHECK(rep.passed());
    REQUIRE(!rep.regressions.empty());
    CHECK(rep.regressions.back().slope <= -2.0);
  }
}

TEST_CASE("triple commutator") {
  const SpatialGrid g(64, kTwoPi);
  const double alpha = 1.5;
  std::mt19937_64 rng(3);
  const auto w = testing::random_real_field(g, 10, rng);
  // Constant m' gives zero.
  auto c = SpectralField::zeros(g, true);
  c.coeff(0) = 2.0;
  const double scale = testing::max_abs(dispersive_operator(w, alpha).coeffs());
  CHECK(testing::max_abs(triple_commutator(c, w, alpha).coeffs()) <= 1e-12 * scale);
  // Two modes: closed form of the symbol.
  auto sym = [&](double xi) { return cplx(0.0, xi) * std::pow(std::abs(xi), alpha); };
  for (auto [p, q] : {std::pair{3L, 2L}, {5L, -4L}, {-7L, 1L}, {2L, -9L}}) {
    auto mp = SpectralField::zeros(g, false);
    auto ww = SpectralField::zeros(g, false);
    mp.coeff(g.index_of_mode(q)) = 1.0;
    ww.coeff(g.index_of_mode(p)) = 1.0;
    const double P = static_cast<double>(p), Q = static_cast<double>(q);
    const cplx iq(0.0, Q);
    const cplx expect = sym(P + Q) - sym(P) - (alpha + 1.0) * iq * std::pow(std::abs(P), alpha) +
                        0.5 * alpha * (alpha + 1.0) * iq * iq * std::pow(std::abs(P), alpha - 2.0) * cplx(0.0, P);
    const auto r = triple_commutator(mp, ww, alpha);
    CHECK(std::abs(r.coeff(g.index_of_mode(p + q)) - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
  }
  // At alpha = 2 the commutator reduces to -m''' w.
  const auto mp = testing::random_real_field(g, 6, rng);
  const auto r = triple_commutator(mp, w, 2.0);
  auto expect = multiply(derivative(mp, 3), w);
  expect *= -1.0;
  CHECK(testing::max_abs_diff(r.coeffs(), expect.coeffs()) <= 1e-10 * testing::max_abs(expect.coeffs()));
  CHECK_THROWS_AS(triple_commutator(mp, w, 2.5), Error);
}

TEST_CASE("commutator vanishes for constant factors") {
  const double alpha = 1.5;
  const WeightTable wt(BlockSystem(alpha, 6));
  const SpaceTimeGrid g(SpatialGrid(128, 64.0), 64, 16.0);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  auto w = SpaceTimeSpectral::zeros(g, TimeFrame::Modulation, alpha);
  for (std::size_t i = 0; i < g.spatial().size(); ++i) {
    if (std::abs(w.xi(i)) > 6.0) continue;
    for (std::size_t n = 0; n < g.n_times(); ++n) {
      if (std::abs(g.tau(n)) <= 4.0) w.coeff(i, n) = cplx(nd(rng), nd(rng));
    }
  }
  const std::vector<cplx> one(g.size(), cplx(1.0));
  CommutatorSpec spec;
  const auto field = commutator_field(wt, 2, spec, one, one, w);
  CHECK(testing::max_abs(field.coeffs()) <= 1e-12);
  const auto rep = check_commutator(wt, spec, {1, 2}, 1, one, one, w);
  for (const auto& v : rep.violations) MESSAGE(v);
  CHECK(rep.violations.empty());
  CHECK(rep.ratios.max <= 1e-15);
  spec.sigma2 = 0.5;
  CHECK_THROWS_AS(commutator_field(wt, 2, spec, one, one, w), Error);
}

TEST_CASE("modulation weight lowers the multiplication LHS") {
  const double alpha = 1.5;
  const WeightTable wt(BlockSystem(alpha, 10));
  const SpaceTimeGrid g(SpatialGrid(256, 64.0), 512, 24.0);
  const auto m = smooth_factor(g, 6.0);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  auto f = SpaceTimeSpectral::zeros(g, TimeFrame::Modulation, alpha);
  const auto I = wt.blocks().interval_I(2);
  for (std::size_t i = 0; i < g.spatial().size(); ++i) {
    if (!I.contains(f.xi(i))) continue;
    for (std::size_t n = 0; n < g.n_times(); ++n) {
      if (std::abs(f.modulation(i, n)) <= 8.0) f.coeff(i, n) = cplx(nd(rng), nd(rng));
    }
  }
  for (int k2 = 1; k2 <= 3; ++k2) {
    const double l0 = multiplication_lhs(wt, f, m, k2, 0);
    const double l1 = multiplication_lhs(wt, f, m, k2, -1);
    CHECK(l0 > 0.0);
    CHECK(l1 <= l0);
  }
  CHECK_THROWS_AS(multiplication_lhs(wt, f, m, 2, 1), Error);
}
