#include <cmath>
#include <random>

#include "doctest.h"
#include "dgbo/blocks.hpp"
#include "dgbo/errors.hpp"
#include "dgbo/gauge.hpp"
#include "dgbo/solver.hpp"
#include "support.hpp"

using namespace dgbo;

namespace {

SolverConfig config(std::size_t n, double length, double dt, double t_end, int stride = 1) {
  SolverConfig cfg;
  cfg.grid = SpatialGrid(n, length);
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.snapshot_stride = stride;
  return cfg;
}

double rel_l2(const SpectralField& a, const SpectralField& b) { return (a - b).l2_norm() / b.l2_norm(); }

// Spectral interpolation onto a grid with the same period.
SpectralField resample(const SpectralField& f, const SpatialGrid& g) {
  auto out = SpectralField::zeros(g, f.real_valued());
  const long half = static_cast<long>(std::min(g.size(), f.grid().size()) / 2);
  for (long m = -half + 1; m < half; ++m) out.coeff(g.index_of_mode(m)) = f.coeff(f.grid().index_of_mode(m));
  return out;
}

}  // namespace

TEST_CASE("config validation") {
  auto cfg = config(256, 64.0, 0.01, 1.0);
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.steps() == 100);
  auto bad = cfg;
  bad.alpha = 2.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.dt = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.t_end = 0.0105;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.snapshot_stride = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK(integrator_from_string("etdrk4") == Integrator::ETDRK4);
  CHECK_THROWS_AS(integrator_from_string("rk3"), Error);
}

TEST_CASE("zero datum stays zero") {
  const auto cfg = config(256, 64.0, 0.01, 0.5, 10);
  const auto traj = solve_ivp(SpectralField::zeros(cfg.grid), cfg);
  CHECK(traj.times.size() == 6);
  for (const auto& s : traj.states) CHECK(s.max_abs_coeff() == 0.0);
  const auto rep = conservation_report(traj);
  CHECK(rep.l2_drift == 0.0);
  CHECK(rep.mean_drift == 0.0);
  CHECK(rep.hamiltonian_drift == 0.0);
}

TEST_CASE("linear regime follows the free group") {
  const auto cfg = config(512, 256.0, 0.01, 1.0);
  std::vector<double> per_amp;
  for (double amp : {1e-8, 1e-12}) {
    const auto phi = smooth_datum(cfg.grid, amp);
    const double dev = rel_l2(evolve(phi, cfg), free_evolution(phi, 1.0, cfg.alpha));
    per_amp.push_back(dev / amp);
  }
  // The nonlinear correction relative to u is linear in the amplitude.
  CHECK(testing::rel_err(per_amp[0], per_amp[1]) <= 1e-2);
  // At amplitude 1e-12 the free group is reproduced to 1e-12 relative.
  CHECK(per_amp[1] * 1e-12 <= 1e-12);
}

TEST_CASE("conservation on the acceptance run") {
  const auto cfg = config(2048, 256.0, 5e-4, 1.0, 100);
  const auto traj = solve_ivp(smooth_datum(cfg.grid, 0.01), cfg);
  const auto rep = conservation_report(traj);
  MESSAGE("drifts l2 " << rep.l2_drift << " mean " << rep.mean_drift << " H " << rep.hamiltonian_drift);
  CHECK(rep.l2_drift <= 1e-8);
  CHECK(rep.mean_drift <= 1e-12);
  CHECK(rep.hamiltonian_drift <= 1e-6);
  for (const auto& d : traj.diagnostics) CHECK(d.imag_residue <= 1e-12);
  CHECK(traj.advisory_cfl <= 0.5);
}

TEST_CASE("fourth order in time") {
  for (auto integ : {Integrator::IFRK4, Integrator::ETDRK4}) {
    auto cfg = config(256, 64.0, 0.02, 1.0);
    cfg.integrator = integ;
    const auto phi = smooth_datum(cfg.grid, 2.0);
    std::vector<SpectralField> runs;
    for (int h = 0; h < 4; ++h) {
      runs.push_back(evolve(phi, cfg));
      cfg.dt *= 0.5;
    }
    const double e1 = (runs[0] - runs[1]).l2_norm();
    const double e2 = (runs[1] - runs[2]).l2_norm();
    const double e3 = (runs[2] - runs[3]).l2_norm();
    const double p1 = std::log2(e1 / e2), p2 = std::log2(e2 / e3);
    MESSAGE(std::string(to_string(integ)) << " orders " << p1 << " " << p2);
    CHECK(std::abs(p2 - 4.0) <= 0.2);
  }
}

TEST_CASE("integrators agree") {
  auto cfg = config(256, 64.0, 0.005, 1.0);
  const auto phi = smooth_datum(cfg.grid, 2.0);
  const auto a = evolve(phi, cfg);
  cfg.integrator = Integrator::ETDRK4;
  const auto b = evolve(phi, cfg);
  CHECK(rel_l2(a, b) <= 1e-6);
}

TEST_CASE("doubling N changes the acceptance solution negligibly") {
  auto cfg = config(2048, 256.0, 5e-4, 1.0);
  const auto u = evolve(smooth_datum(cfg.grid, 0.01), cfg);
  cfg.grid = SpatialGrid(4096, 256.0);
  const auto fine = evolve(smooth_datum(cfg.grid, 0.01), cfg);
  const double change = rel_l2(resample(fine, u.grid()), u);
  MESSAGE("N-doubling change " << change);
  CHECK(change <= 1e-10);
}

TEST_CASE("blow-up is reported with the last good time") {
  auto cfg = config(64, 64.0, 0.05, 5.0);
  cfg.dealias = 1.0;
  const auto phi = smooth_datum(cfg.grid, 200.0);
  try {
    (void)evolve(phi, cfg);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.kind() == ErrorKind::Divergence);
    CHECK(e.last_good_time() >= 0.0);
    CHECK(e.last_good_time() < 5.0);
  }
}

TEST_CASE("scaling symmetry") {
  const auto cfg = config(512, 64.0, 0.01, 0.5, 5);
  const auto phi = smooth_datum(cfg.grid, 0.5);
  CHECK(scaling_check(phi, 1.0, cfg).mismatch == 0.0);
  const auto r = scaling_check(phi, 0.5, cfg);
  MESSAGE("scaling mismatch " << r.mismatch);
  CHECK(r.mismatch <= 1e-8);
  CHECK(testing::rel_err(r.l2_ratio, r.l2_ratio_expected) <= 1e-12);
  CHECK_THROWS_AS(scaling_check(phi, 1.5, cfg), Error);
  CHECK_THROWS_AS(scaling_check(phi, 0.0, cfg), Error);
}

TEST_CASE("difference experiment") {
  const auto cfg = config(512, 256.0, 0.01, 1.0, 10);
  const auto phi = smooth_datum(cfg.grid, 0.01);
  try {
    (void)difference_experiment(phi, 1e3, cfg);
    FAIL("expected degenerate input");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Degenerate);
  }
  const auto tiny = smooth_datum(cfg.grid, 1e-12);
  CHECK(std::abs(difference_experiment(tiny, 0.5, cfg) - 1.0) <= 1e-10);
  const double r = difference_experiment(phi, 0.5, cfg);
  CHECK(std::isfinite(r));
  CHECK(r < 2.0);
}

TEST_CASE("H2 bound experiment") {
  const auto cfg = config(512, 256.0, 0.01, 1.0, 10);
  const std::vector<SpectralField> data{smooth_datum(cfg.grid, 1e-12), smooth_datum(cfg.grid, 0.01)};
  const auto rep = h2_bound_experiment(data, cfg, 0.01);
  CHECK(rep.samples == 2);
  CHECK(rep.passed());
  CHECK(std::abs(rep.table.rows[0][4] - 1.0) <= 1e-10);
  CHECK(rep.ratios.max < 2.0);
  CHECK_THROWS_AS(h2_bound_experiment({smooth_datum(cfg.grid, 0.1)}, cfg, 0.01), Error);
}

TEST_CASE("packet demo") {
  // Carrier 20 and c = 1e-2 reach a half-wavelength shift at t = 5 pi.
  const auto cfg = config(1024, 64.0, 0.01, 16.0, 10);
  PacketSpec spec;
  spec.carrier = 20.0;
  const double m = wave_packet(cfg.grid, spec).l2_norm();
  const auto t = nonuniform_continuity_demo({0.0, 1e-3, 1e-2}, spec, cfg);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0][1] == 0.0);
  CHECK(t.rows[0][2] == 0.0);
  CHECK(testing::rel_err(t.rows[1][1], 1e-3 * std::sqrt(64.0)) <= 1e-12);
  CHECK(testing::rel_err(t.rows[2][1], 1e-2 * std::sqrt(64.0)) <= 1e-12);
  // Output reaches the antiphase distance 2m up to the envelope.
  CHECK(t.rows[2][2] >= 1.8 * m);
  CHECK(t.rows[2][2] <= 2.0 * m + t.rows[2][1]);
}

TEST_CASE("residual of the renormalized system on a trajectory") {
  const BlockSystem bs(1.5, 40);
  std::vector<double> res;
  for (int stride : {200, 100, 50}) {
    const auto cfg = config(2048, 256.0, 5e-4, 1.0, stride);
    const auto phi = smooth_datum(cfg.grid, 0.01);
    const auto traj = solve_ivp(phi, cfg);
    const GaugeData gd(phi, bs);
    double worst = 0.0;
    for (int k = -bs.K(); k <= bs.K(); ++k) {
      worst = std::max(worst, residual_check(traj.times, traj.states, gd, bs, k));
    }
    res.push_back(worst);
  }
  MESSAGE("residuals " << res[0] << " " << res[1] << " " << res[2]);
  CHECK(res[2] <= 1e-5);
  CHECK(res[0] / res[1] >= 8.0);
  CHECK(res[1] / res[2] >= 8.0);
}
