// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#include "runner.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>

#include "dgbo/blocks.hpp"
#include "dgbo/errors.hpp"
#include "dgbo/gauge.hpp"
#include "dgbo/norms.hpp"
#include "dgbo/solver.hpp"
#include "dgbo/verifier.hpp"

#ifndef DGBO_VERSION_STRING
#define DGBO_VERSION_STRING "unknown"
#endif

namespace dgbo::run {

using json = nlohmann::ordered_json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
    out += '\n';
  }
  return out;
}

namespace {

// table_<id>.csv with characters outside [A-Za-z0-9._-] replaced by '_'.
std::string table_name(const std::string& id) {
  std::string out = "table_";
  for (char ch : id) out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' || ch == '_') ? ch : '_';
  return out + ".csv";
}

json number(double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); }

json stats_json(const RatioStats& s) {
  return {{"min", number(s.min)}, {"median", number(s.median)}, {"p99", number(s.p99)}, {"max", number(s.max)}};
}

json regression_json(const Regression& r) {
  json j = {{"parameter", r.parameter},       {"slope", number(r.slope)},
            {"intercept", number(r.intercept)}, {"stderr_slope", number(r.stderr_slope)},
            {"points", r.points}};
  if (r.has_prediction) {
    j["predicted_slope"] = number(r.predicted_slope);
  } else {
    j["no_growth"] = r.no_growth();
  }
  return j;
}

}  // namespace

json to_json(const EstimateReport& r) {
  json regs = json::array();
  for (const auto& g : r.regressions) regs.push_back(regression_json(g));
  return {{"id", r.id},
          {"samples", r.samples},
          {"skipped", r.skipped},
          {"exploratory", r.exploratory},
          {"ratios", stats_json(r.ratios)},
          {"regressions", regs},
          {"violations", r.violations},
          {"notes", r.notes},
          {"table", table_name(r.id)}};
}

namespace {

// ---- key lists ----

std::vector<KeySpec> with_common(std::vector<KeySpec> keys) {
  keys.push_back({"seed", KeyKind::Unsigned, "1", "random seed"});
  keys.push_back({"jobs", KeyKind::Integer, "1", "worker threads for sweeps (does not change results)"});
  return keys;
}

void append(std::vector<KeySpec>& to, const std::vector<KeySpec>& more) { to.insert(to.end(), more.begin(), more.end()); }

std::vector<KeySpec> solver_keys(const std::string& n, const std::string& length, const std::string& dt,
                                 const std::string& t_end, const std::string& stride) {
  return {
      {"alpha", KeyKind::Real, "1.5", "dispersion exponent, 1 < alpha < 2"},
      {"N", KeyKind::Integer, n, "grid points, a power of two"},
      {"L", KeyKind::Real, length, "period"},
      {"dt", KeyKind::Real, dt, "time step"},
      {"t_end", KeyKind::Real, t_end, "final time, an integer multiple of dt"},
      {"dealias", KeyKind::Real, "0.6666666666666666", "fraction of the half-spectrum kept in the quadratic term"},
      {"integrator", KeyKind::Text, "ifrk4", "ifrk4 or etdrk4"},
      {"snapshot_stride", KeyKind::Integer, stride, "steps between stored snapshots"},
  };
}

std::vector<KeySpec> datum_keys(const std::string& l2) {
  return {
      {"datum", KeyKind::Text, "smooth", "smooth (x exp(-x^2/8)), packet or zero"},
      {"datum_l2", KeyKind::Real, l2, "L2 norm of the smooth datum"},
      {"packet_amplitude", KeyKind::Real, "0.225", "packet amplitude"},
      {"packet_width", KeyKind::Real, "2", "packet envelope width"},
      {"packet_carrier", KeyKind::Real, "100", "packet carrier frequency"},
  };
}

std::vector<KeySpec> solve_keys() {
  auto k = solver_keys("2048", "256", "5e-4", "1", "100");
  append(k, datum_keys("0.01"));
  append(k, {
                {"dt_study", KeyKind::Flag, "false", "self-convergence study under dt halving"},
                {"dt_levels", KeyKind::Integer, "4", "runs in the dt study (at least 3)"},
                {"expected_order", KeyKind::Real, "4", "order the finest dt level must show"},
                {"order_tol", KeyKind::Real, "0.2", "allowed deviation from expected_order"},
                {"n_study", KeyKind::Flag, "false", "rerun on 2N points at the same dt"},
                {"n_tol", KeyKind::Real, "1e-10", "allowed relative L2 change under N doubling"},
            });
  return with_common(k);
}

std::vector<KeySpec> conserve_keys() {
  auto k = solver_keys("2048", "256", "5e-4", "1", "100");
  append(k, datum_keys("0.01"));
  append(k, {
                {"l2_tol", KeyKind::Real, "1e-8", "allowed relative L2 drift"},
                {"mean_tol", KeyKind::Real, "1e-12", "allowed relative mean drift"},
                {"hamiltonian_tol", KeyKind::Real, "1e-6", "allowed relative Hamiltonian drift"},
            });
  return with_common(k);
}

std::vector<KeySpec> renorm_keys() {
  return with_common({
      {"alpha", KeyKind::Real, "1.5", "dispersion exponent, 1 < alpha < 2"},
      {"N", KeyKind::Integer, "2048", "grid points, a power of two"},
      {"L", KeyKind::Real, "256", "period; 2 pi / L <= 1/8 resolves the low band"},
      {"K", KeyKind::Integer, "40", "largest block index"},
      {"eps0", KeyKind::Real, "0.01", "L2 budget of the datum"},
      {"partition_samples", KeyKind::Integer, "100001", "points for the partition-of-unity defect"},
      {"partition_tol", KeyKind::Real, "1e-12", "allowed partition-of-unity defect"},
      {"derivative_orders", KeyKind::IntList, "1,2", "orders of the cutoff derivative bounds"},
      {"spread_tol", KeyKind::Real, "0.2", "allowed spread of the derivative constants across k"},
      {"states", KeyKind::Integer, "100", "random states in the round-trip check"},
      {"low_modes", KeyKind::Integer, "20", "random states: largest low-band mode"},
      {"high_modes", KeyKind::Integer, "600", "random states: largest mode"},
      {"state_scale", KeyKind::Real, "0.05", "random states: coefficient scale"},
      {"roundtrip_tol", KeyKind::Real, "1e-10", "allowed relative round-trip error"},
      {"split_blocks", KeyKind::IntList, "-4,-2,-1,1,3,4", "blocks for the five-term split check"},
      {"split_tol", KeyKind::Real, "1e-12", "allowed relative split error"},
      {"residual", KeyKind::Flag, "true", "run the residual check on a trajectory"},
      {"dt", KeyKind::Real, "5e-4", "residual run: time step"},
      {"t_end", KeyKind::Real, "1", "residual run: final time"},
      {"datum_l2", KeyKind::Real, "0.01", "residual run: L2 norm of the smooth datum"},
      {"residual_strides", KeyKind::IntList, "200,100,50", "snapshot strides, each half the previous"},
      {"residual_tol", KeyKind::Real, "1e-5", "allowed residual at the finest stride"},
      {"residual_decay", KeyKind::Real, "8", "required residual decrease per stride halving"},
  });
}

std::vector<KeySpec> norms_keys() {
  return with_common({
      {"alpha", KeyKind::Real, "1.5", "dispersion exponent, 1 < alpha < 2"},
      {"K", KeyKind::Integer, "10", "largest block index"},
      {"N", KeyKind::Integer, "1024", "spatial points"},
      {"L", KeyKind::Real, "64", "period"},
      {"M", KeyKind::Integer, "128", "time points"},
      {"T", KeyKind::Real, "16", "time period"},
      {"sigma", KeyKind::Real, "1", "Sobolev index"},
      {"k_min", KeyKind::Integer, "1", "first block of the data sweep"},
      {"k_max", KeyKind::Integer, "9", "last block of the data sweep"},
      {"refine", KeyKind::Flag, "true", "repeat on 2N x 2M points"},
      {"spread_tol", KeyKind::Real, "4", "allowed max / median ratio across the sweep"},
      {"refine_tol", KeyKind::Real, "0.1", "allowed relative growth of the max ratio under refinement"},
  });
}

std::vector<KeySpec> estimates_keys() {
  return with_common({
      {"part", KeyKind::WordList, "resonance",
       "resonance, duality, trilinear-a, trilinear-b, trilinear-c, bilinear-6.1a, bilinear-6.1b, "
       "bilinear-6.2, bilinear-6.3, multiplication or all"},
      {"alpha", KeyKind::Real, "1.5", "dispersion exponent for all parts but resonance"},
      {"ceiling", KeyKind::Real, "1000", "ratios above this are violations"},
      {"resonance_alphas", KeyKind::RealList, "1.1,1.5,1.9", "resonance: exponents"},
      {"resonance_samples", KeyKind::Integer, "1000000", "resonance: samples per exponent"},
      {"dxi", KeyKind::Real, "0.25", "lattice spacing in xi"},
      {"dmu", KeyKind::Real, "0.5", "lattice spacing in tau - omega"},
      {"triples", KeyKind::Integer, "200", "duality: random atom triples"},
      {"duality_tol", KeyKind::Real, "1e-8", "duality: allowed relative error"},
      {"permutation_tol", KeyKind::Real, "1e-10", "duality: allowed permutation error"},
      {"trilinear_K", KeyKind::Integer, "6", "trilinear: largest block index"},
      {"instances", KeyKind::Integer, "96", "trilinear: random instances"},
      {"j_values", KeyKind::IntList, "0,1,2,3", "trilinear and bilinear: modulation shells"},
      {"j3_max", KeyKind::Integer, "10", "trilinear: largest target shell"},
      {"saturation_j", KeyKind::IntList, "1,2,3,4,5,6", "trilinear-a: shells of the saturation run"},
      {"saturation_j_big", KeyKind::Integer, "9", "trilinear-a: shell of the wide atoms"},
      {"bilinear_K", KeyKind::Integer, "22", "bilinear: largest block index"},
      {"bilinear_samples", KeyKind::Integer, "2", "bilinear: random atoms per instance and shell pair"},
      {"rho", KeyKind::Real, "-0.5", "bilinear-6.1b: weight exponent"},
      {"n_threshold", KeyKind::Real, "64", "bilinear regime: smallest |n_k|"},
      {"separation", KeyKind::Real, "4", "bilinear regime: block separation factor"},
      {"comparable", KeyKind::Real, "4", "bilinear regime: comparability factor"},
      {"lambda_factors", KeyKind::RealList, "16", "bilinear-6.3: crossover factors, one report each"},
      {"mult_K", KeyKind::Integer, "10", "multiplication: largest block index"},
      {"mult_N", KeyKind::Integer, "256", "multiplication: spatial points"},
      {"mult_L", KeyKind::Real, "64", "multiplication: period"},
      {"mult_M", KeyKind::Integer, "2048", "multiplication: time points"},
      {"mult_T", KeyKind::Real, "24", "multiplication: time period"},
      {"epsilons", KeyKind::IntList, "0,-1", "multiplication: modulation weight exponents"},
      {"factor_space", KeyKind::Text, "sinf", "multiplication: sinf or s2"},
      {"factor_order", KeyKind::Integer, "4", "multiplication: derivative order of the factor norm"},
      {"factor_time_scale", KeyKind::Real, "6", "multiplication: time scale of the factor window"},
      {"max_shift", KeyKind::Integer, "6", "multiplication: largest |k1 - k2|"},
  });
}

std::vector<KeySpec> commutators_keys() {
  return with_common({
      {"part", KeyKind::WordList, "triple,lemma", "triple, lemma or both"},
      {"alpha", KeyKind::Real, "1.5", "dispersion exponent"},
      {"triple_N", KeyKind::Integer, "64", "triple: points on the period 2 pi"},
      {"triple_modes", KeyKind::Integer, "10", "triple: bandwidth of the random w"},
      {"mode_pairs", KeyKind::IntList, "3,2,5,-4,-7,1,2,-9", "triple: (p, q) pairs of w and m' modes"},
      {"constant_tol", KeyKind::Real, "1e-12", "triple: allowed relative value for constant m'"},
      {"modes_tol", KeyKind::Real, "1e-10", "triple: allowed two-mode error"},
      {"alpha2_tol", KeyKind::Real, "1e-10", "triple: allowed error against -m''' w at alpha = 2"},
      {"K", KeyKind::Integer, "10", "lemma: largest block index"},
      {"N", KeyKind::Integer, "256", "lemma: spatial points"},
      {"L", KeyKind::Real, "32", "lemma: period"},
      {"M", KeyKind::Integer, "64", "lemma: time points"},
      {"T", KeyKind::Real, "16", "lemma: time period"},
      {"sigma1", KeyKind::Integer, "1", "lemma: derivative order in R(D), 0 or 1"},
      {"sigma2", KeyKind::Real, "0", "lemma: fractional order in R(D), 0 or in (1, 2)"},
      {"sigma", KeyKind::Real, "0", "lemma: Sobolev index"},
      {"decay_power", KeyKind::Integer, "40", "lemma: decay power of the weights"},
      {"ks", KeyKind::IntList, "1,2,3,4", "lemma: output blocks"},
      {"mu_max", KeyKind::Integer, "2", "lemma: largest |mu|"},
      {"w_bandwidth", KeyKind::Real, "20", "lemma: largest |xi| of w; blocks k + nu with |nu| <= 1 must be filled"},
      {"w_modulation", KeyKind::Real, "4", "lemma: largest |tau - omega| of w"},
      {"factor_time_scale", KeyKind::Real, "2", "lemma: time scale of the factor window"},
      {"factor_width", KeyKind::Real, "8", "lemma: spatial scale of the factors (slowly varying against the blocks)"},
  });
}

std::vector<KeySpec> illposed_keys() {
  return with_common({
      {"alpha", KeyKind::Real, "1.5", "dispersion exponent, 1 < alpha < 2"},
      {"N", KeyKind::Integer, "4096", "grid points, a power of two"},
      {"L", KeyKind::Real, "64", "period"},
      {"t_end", KeyKind::Real, "31.41592653589793", "final time"},
      {"steps", KeyKind::Integer, "3200", "time steps; dt = t_end / steps"},
      {"dealias", KeyKind::Real, "0.6666666666666666", "fraction of the half-spectrum kept in the quadratic term"},
      {"integrator", KeyKind::Text, "ifrk4", "ifrk4 or etdrk4"},
      {"snapshot_stride", KeyKind::Integer, "32", "steps between compared snapshots"},
      {"c_values", KeyKind::RealList, "0.001,0.003,0.009,0.027", "constant shifts c > 0"},
      {"packet_amplitude", KeyKind::Real, "0.225", "packet amplitude"},
      {"packet_width", KeyKind::Real, "2", "packet envelope width"},
      {"packet_carrier", KeyKind::Real, "100", "packet carrier frequency"},
      {"slope_tol", KeyKind::Real, "0.05", "allowed deviation of the input log-log slope from 1"},
      {"saturation_factor", KeyKind::Real, "50", "required min output / min input distance"},
  });
}

std::vector<KeySpec> scaling_keys() {
  auto k = solver_keys("512", "64", "0.01", "0.5", "5");
  append(k, {
                {"datum_l2", KeyKind::Real, "0.5", "L2 norm of the smooth datum"},
                {"lambda", KeyKind::Real, "0.5", "scaling factor, 1 / lambda an integer"},
                {"mismatch_tol", KeyKind::Real, "1e-8", "allowed relative mismatch"},
            });
  return with_common(k);
}

std::vector<KeySpec> difference_keys() {
  auto k = solver_keys("512", "256", "0.01", "1", "10");
  append(k, {
                {"datum_l2", KeyKind::Real, "0.01", "L2 norm of the smooth datum"},
                {"n_cut", KeyKind::Real, "0.5", "truncation frequency of the compared datum"},
            });
  return with_common(k);
}

// ---- run context ----

class Run {
 public:
  Run(const std::string& subcommand, const Config& cfg, const Options& opts)
      : subcommand_(subcommand), cfg_(cfg), opts_(opts), dir_(opts.out_dir) {}

  const Config& cfg() const { return cfg_; }
  std::uint64_t seed() const { return cfg_.unsigned_integer("seed"); }
  unsigned jobs() const { return static_cast<unsigned>(cfg_.integer("jobs")); }

  json results = json::object();
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  std::vector<std::string> artifacts;

  void prepare() {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) {
      throw IoError("cannot create output directory '" + dir_.string() + "'");
    }
  }

  void write(const std::string& name, const std::string& content, bool artifact = true) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    if (artifact) artifacts.push_back(name);
  }

  void table(const std::string& name, const Table& t) { write(name, to_csv(t)); }

  void log(const std::string& msg) const {
    if (!opts_.quiet) std::cerr << "[dgbo " << subcommand_ << "] " << msg << '\n';
  }

  void violate(const std::string& v) {
    log("violation: " + v);
    violations.push_back(v);
  }

  void warn(const std::string& w) {
    log("warning: " + w);
    warnings.push_back(w);
  }

  /// Appends the report to results[list], writes its table and collects
  /// its violations.
  void report(const EstimateReport& r, const std::string& list = "reports") {
    results[list].push_back(to_json(r));
    table(table_name(r.id), r.table);
    for (const auto& v : r.violations) violate(r.id + ": " + v);
    log(r.id + ": " + std::to_string(r.samples) + " samples, max ratio " + format_number(r.ratios.max));
  }

 private:
  std::string subcommand_;
  const Config& cfg_;
  const Options& opts_;
  std::filesystem::path dir_;
};

// ---- shared builders ----

std::size_t positive_size(const Config& c, const std::string& key) {
  const long v = c.integer(key);
  require(v > 0, ErrorKind::Config, key + " must be positive");
  return static_cast<std::size_t>(v);
}

int block_count(const Config& c, const std::string& key) {
  const long v = c.integer(key);
  require(v >= 1 && v <= 200, ErrorKind::Config, key + " must lie in [1, 200]");
  return static_cast<int>(v);
}

void require_alpha(double alpha) {
  require(std::isfinite(alpha) && alpha > 1.0 && alpha < 2.0, ErrorKind::Config,
          "alpha must lie in the open interval (1,2)");
}

SolverConfig solver_config(const Config& c) {
  SolverConfig s;
  s.alpha = c.real("alpha");
  require_alpha(s.alpha);
  s.grid = SpatialGrid(positive_size(c, "N"), c.real("L"));
  s.dt = c.real("dt");
  s.t_end = c.real("t_end");
  s.dealias = c.real("dealias");
  s.integrator = integrator_from_string(c.text("integrator"));
  s.snapshot_stride = static_cast<int>(c.integer("snapshot_stride"));
  s.validate();
  return s;
}

SpectralField make_datum(const Config& c, const SpatialGrid& g) {
  const auto& kind = c.text("datum");
  if (kind == "zero") return SpectralField::zeros(g);
  if (kind == "smooth") {
    const double l2 = c.real("datum_l2");
    require(l2 >= 0.0, ErrorKind::Config, "datum_l2 must be non-negative");
    return l2 == 0.0 ? SpectralField::zeros(g) : smooth_datum(g, l2);
  }
  if (kind == "packet") {
    return wave_packet(g, {c.real("packet_amplitude"), c.real("packet_width"), c.real("packet_carrier")});
  }
  fail(ErrorKind::Config, "datum must be smooth, packet or zero, got '" + kind + "'");
}

// Real field with Gaussian coefficients on 0 < |m| <= max_mode.
SpectralField random_real_field(const SpatialGrid& g, long max_mode, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  auto f = SpectralField::zeros(g, true);
  for (long m = 1; m <= max_mode; ++m) {
    const cplx v(nd(rng), nd(rng));
    f.coeff(g.index_of_mode(m)) = v;
    f.coeff(g.index_of_mode(-m)) = std::conj(v);
  }
  return f;
}

// Real state with exponentially decaying coefficients, a mean-zero low band
// up to low_max and high modes with |xi| > 1/2 up to high_max.
SpectralField random_state(const SpatialGrid& g, long low_max, long high_max, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  auto f = SpectralField::zeros(g, true);
  for (long m = 1; m <= high_max; ++m) {
    if (m > low_max && g.frequency(static_cast<std::size_t>(m)) <= 0.5) continue;
    const double amp = scale * std::exp(-3.0 * static_cast<double>(m) / static_cast<double>(high_max));
    const cplx v(amp * nd(rng), amp * nd(rng));
    f.coeff(g.index_of_mode(m)) = v;
    f.coeff(g.index_of_mode(-m)) = std::conj(v);
  }
  return f;
}

double max_abs(std::span<const cplx> a) {
  double m = 0.0;
  for (auto z : a) m = std::max(m, std::abs(z));
  return m;
}

double rel_max_diff(const SpectralField& a, const SpectralField& b) {
  const double s = std::max(a.max_abs_coeff(), b.max_abs_coeff());
  return s == 0.0 ? 0.0 : (a - b).max_abs_coeff() / s;
}

double rel_l2(const SpectralField& a, const SpectralField& b) {
  const double s = b.l2_norm();
  return s == 0.0 ? a.l2_norm() : (a - b).l2_norm() / s;
}

// Keeps the modes shared by both grids (same period).
SpectralField resample(const SpectralField& f, const SpatialGrid& g) {
  auto out = SpectralField::zeros(g, f.real_valued());
  const long half = static_cast<long>(std::min(g.size(), f.grid().size()) / 2);
  for (long m = -half + 1; m < half; ++m) out.coeff(g.index_of_mode(m)) = f.coeff(f.grid().index_of_mode(m));
  return out;
}

// eta_0(t / t_scale) (1 + 0.5 exp(-(x - shift)^2 / (4 width^2))), x-major.
std::vector<cplx> smooth_factor(const SpaceTimeGrid& g, double t_scale, double width, double shift) {
  require(t_scale > 0.0 && width > 0.0, ErrorKind::Config, "factor scales must be positive");
  std::vector<cplx> m(g.size());
  for (std::size_t i = 0; i < g.spatial().size(); ++i) {
    const double x = (g.spatial().x(i) - shift) / width;
    for (std::size_t n = 0; n < g.n_times(); ++n) {
      m[i * g.n_times() + n] = WindowSystem::eta0(g.t(n) / t_scale) * (1.0 + 0.5 * std::exp(-x * x / 4.0));
    }
  }
  return m;
}

json diagnostics_json(const Diagnostics& d) {
  return {{"l2", number(d.l2)},   {"mean", number(d.mean)},       {"hamiltonian", number(d.hamiltonian)},
          {"h2", number(d.h2)},   {"max_abs", number(d.max_abs)}, {"imag_residue", number(d.imag_residue)}};
}

void check_tolerance(Run& r, const std::string& what, double value, double tol) {
  if (!(value <= tol)) r.violate(what + " " + format_number(value) + " exceeds " + format_number(tol));
}

// ---- solve ----

void dt_study(Run& r, const SpectralField& phi, SolverConfig sc) {
  const auto& c = r.cfg();
  const long levels = c.integer("dt_levels");
  require(levels >= 3 && levels <= 12, ErrorKind::Config, "dt_levels must lie in [3, 12]");
  require(phi.max_abs_coeff() > 0.0, ErrorKind::Degenerate, "the dt study needs a nonzero datum");
  std::vector<SpectralField> runs;
  std::vector<double> dts;
  for (long l = 0; l < levels; ++l) {
    r.log("dt study: dt = " + format_number(sc.dt));
    dts.push_back(sc.dt);
    runs.push_back(evolve(phi, sc));
    sc.dt *= 0.5;
  }
  std::vector<double> changes, orders;
  for (std::size_t l = 0; l + 1 < runs.size(); ++l) changes.push_back(rel_l2(runs[l], runs[l + 1]));
  for (std::size_t l = 1; l < changes.size(); ++l) orders.push_back(std::log2(changes[l - 1] / changes[l]));
  Table t{{"dt", "change", "order"}, {}};
  for (std::size_t l = 0; l < changes.size(); ++l) {
    t.add({dts[l], changes[l], l == 0 ? std::numeric_limits<double>::quiet_NaN() : orders[l - 1]});
  }
  r.table("convergence_dt.csv", t);
  const double observed = orders.back();
  json o = json::array();
  for (double p : orders) o.push_back(number(p));
  r.results["dt_study"] = {{"dt", dts}, {"change", changes}, {"order", o}, {"observed_order", number(observed)}};
  const double expected = c.real("expected_order"), tol = c.real("order_tol");
  if (!(std::abs(observed - expected) <= tol)) {
    r.violate("observed order " + format_number(observed) + " outside " + format_number(expected) + " +- " +
              format_number(tol));
  }
}

void n_study(Run& r, const SolverConfig& sc, const SpectralField& u) {
  auto fine_cfg = sc;
  fine_cfg.grid = SpatialGrid(2 * sc.grid.size(), sc.grid.length());
  r.log("N study: N = " + std::to_string(fine_cfg.grid.size()));
  const auto fine = evolve(make_datum(r.cfg(), fine_cfg.grid), fine_cfg);
  const double change = rel_l2(resample(fine, sc.grid), u);
  r.results["n_study"] = {{"N", sc.grid.size()}, {"N_fine", fine_cfg.grid.size()}, {"change", number(change)}};
  check_tolerance(r, "N-doubling change", change, r.cfg().real("n_tol"));
}

void cmd_solve(Run& r) {
  const auto& c = r.cfg();
  const auto sc = solver_config(c);
  const auto phi = make_datum(c, sc.grid);
  r.log("integrating " + std::to_string(sc.steps()) + " steps on N = " + std::to_string(sc.grid.size()));
  const auto traj = solve_ivp(phi, sc);
  Table t{{"time", "l2", "mean", "hamiltonian", "h2", "max_abs"}, {}};
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& d = traj.diagnostics[i];
    t.add({traj.times[i], d.l2, d.mean, d.hamiltonian, d.h2, d.max_abs});
  }
  r.table("trajectory.csv", t);
  const auto& u = traj.states.back();
  const auto samples = u.real_samples();
  std::string state = "# x u\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    state += format_number(sc.grid.x(i)) + ' ' + format_number(samples[i]) + '\n';
  }
  r.write("final_state.dat", state);
  const auto cr = conservation_report(traj);
  r.results["steps"] = sc.steps();
  r.results["snapshots"] = traj.times.size();
  r.results["advisory_cfl"] = number(traj.advisory_cfl);
  r.results["drifts"] = {{"l2", number(cr.l2_drift)},
                         {"mean", number(cr.mean_drift)},
                         {"hamiltonian", number(cr.hamiltonian_drift)}};
  r.results["final"] = diagnostics_json(traj.diagnostics.back());
  if (traj.advisory_cfl > 0.5) r.warn("advisory CFL number " + format_number(traj.advisory_cfl) + " above 0.5");
  if (c.flag("dt_study")) dt_study(r, phi, sc);
  if (c.flag("n_study")) n_study(r, sc, u);
}

// ---- conserve ----

void cmd_conserve(Run& r) {
  const auto& c = r.cfg();
  const auto sc = solver_config(c);
  const auto phi = make_datum(c, sc.grid);
  r.log("integrating " + std::to_string(sc.steps()) + " steps on N = " + std::to_string(sc.grid.size()));
  const auto traj = solve_ivp(phi, sc);
  const auto cr = conservation_report(traj);
  Table t{{"time", "l2", "mean", "hamiltonian", "imag_residue"}, {}};
  double imag = 0.0;
  for (std::size_t i = 0; i < cr.times.size(); ++i) {
    const double res = traj.diagnostics[i].imag_residue;
    imag = std::max(imag, res);
    t.add({cr.times[i], cr.l2[i], cr.mean[i], cr.hamiltonian[i], res});
  }
  r.table("conservation.csv", t);
  r.results["steps"] = sc.steps();
  r.results["snapshots"] = cr.times.size();
  r.results["advisory_cfl"] = number(traj.advisory_cfl);
  r.results["max_imag_residue"] = number(imag);
  r.results["drifts"] = {{"l2", number(cr.l2_drift)},
                         {"mean", number(cr.mean_drift)},
                         {"hamiltonian", number(cr.hamiltonian_drift)}};
  check_tolerance(r, "relative L2 drift", cr.l2_drift, c.real("l2_tol"));
  check_tolerance(r, "relative mean drift", cr.mean_drift, c.real("mean_tol"));
  check_tolerance(r, "relative Hamiltonian drift", cr.hamiltonian_drift, c.real("hamiltonian_tol"));
  if (traj.advisory_cfl > 0.5) r.warn("advisory CFL number " + format_number(traj.advisory_cfl) + " above 0.5");
}

// ---- renorm ----

void cmd_renorm(Run& r) {
  const auto& c = r.cfg();
  const double alpha = c.real("alpha");
  require_alpha(alpha);
  const BlockSystem bs(alpha, block_count(c, "K"));
  const SpatialGrid g(positive_size(c, "N"), c.real("L"));
  g.require_low_band_resolution();
  const double eps0 = c.real("eps0");
  require(eps0 > 0.0, ErrorKind::Config, "eps0 must be positive");
  const long low = c.integer("low_modes"), high = c.integer("high_modes");
  require(low >= 1 && high > low && high < static_cast<long>(g.size() / 2), ErrorKind::Config,
          "need 1 <= low_modes < high_modes < N/2");
  for (long k : c.integers("split_blocks")) {
    require(k != 0 && std::abs(k) <= bs.K(), ErrorKind::Range, "split_blocks must be nonzero with |k| <= K");
  }

  r.log("partition of unity");
  const double defect = partition_of_unity_defect(bs, positive_size(c, "partition_samples"));
  r.results["partition_defect"] = number(defect);
  check_tolerance(r, "partition-of-unity defect", defect, c.real("partition_tol"));

  Table deriv{{"order", "k", "constant"}, {}};
  for (long order : c.integers("derivative_orders")) {
    require(order >= 1 && order <= 4, ErrorKind::Config, "derivative_orders must lie in [1, 4]");
    const auto db = chi_derivative_bound(bs, static_cast<int>(order));
    for (std::size_t i = 0; i < db.k.size(); ++i) deriv.add({static_cast<double>(order), double(db.k[i]), db.constant[i]});
    r.results["derivative_bounds"].push_back(
        {{"order", order}, {"max_constant", number(db.max_constant)}, {"tail_spread", number(db.tail_spread)}});
    if (!std::isfinite(db.max_constant)) r.violate("derivative constant of order " + std::to_string(order) + " not finite");
    check_tolerance(r, "derivative constant spread (order " + std::to_string(order) + ")", db.tail_spread,
                    c.real("spread_tol"));
  }
  r.table("derivative_bounds.csv", deriv);

  r.log("round trip on " + std::to_string(c.integer("states")) + " states");
  std::mt19937_64 rng(r.seed());
  const double scale = c.real("state_scale");
  Table trip{{"state", "roundtrip", "fixed_point"}, {}};
  double worst = 0.0, worst_fp = 0.0;
  std::size_t over_budget = 0;
  const std::size_t states = positive_size(c, "states");
  for (std::size_t s = 0; s < states; ++s) {
    const auto u = random_state(g, low, high, scale, rng);
    const GaugeData gd(u, bs, eps0);
    if (!gd.within_budget()) ++over_budget;
    const auto rb = renormalize(u, gd, bs);
    const double e = rel_max_diff(reconstruct(rb, gd, bs), u);
    const double fp = fixed_point_defect(rb, gd, bs);
    worst = std::max(worst, e);
    worst_fp = std::max(worst_fp, fp);
    trip.add({static_cast<double>(s), e, fp});
  }
  r.table("roundtrip.csv", trip);
  r.results["roundtrip"] = {{"states", states}, {"max_error", number(worst)}, {"max_fixed_point_defect", number(worst_fp)}};
  if (over_budget > 0) r.warn(std::to_string(over_budget) + " random states exceed the eps0 budget");
  check_tolerance(r, "round-trip error", worst, c.real("roundtrip_tol"));
  check_tolerance(r, "fixed-point defect", worst_fp, c.real("roundtrip_tol"));

  const auto u = random_state(g, low, high, scale, rng);
  const GaugeData gd(u, bs, eps0);
  const auto rb = renormalize(u, gd, bs);
  Table split{{"k", "error"}, {}};
  double worst_split = 0.0;
  for (long k : c.integers("split_blocks")) {
    const auto total = rhs_Rk(static_cast<int>(k), rb, gd, bs);
    const auto parts = rhs_Rk_split(static_cast<int>(k), rb, gd, bs);
    auto sum = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) sum += parts[i];
    const double e = rel_max_diff(sum, total);
    worst_split = std::max(worst_split, e);
    split.add({static_cast<double>(k), e});
  }
  r.table("split.csv", split);
  r.results["split_max_error"] = number(worst_split);
  check_tolerance(r, "five-term split error", worst_split, c.real("split_tol"));

  if (!c.flag("residual")) return;
  const auto strides = c.integers("residual_strides");
  Table res{{"stride", "snapshot_spacing", "residual", "decay"}, {}};
  std::vector<double> values;
  for (long stride : strides) {
    SolverConfig sc;
    sc.alpha = alpha;
    sc.grid = g;
    sc.dt = c.real("dt");
    sc.t_end = c.real("t_end");
    sc.snapshot_stride = static_cast<int>(stride);
    sc.validate();
    r.log("residual run, stride " + std::to_string(stride));
    const auto phi = smooth_datum(g, c.real("datum_l2"));
    const auto traj = solve_ivp(phi, sc);
    const GaugeData gphi(phi, bs, eps0);
    double w = 0.0;
    for (int k = -bs.K(); k <= bs.K(); ++k) w = std::max(w, residual_check(traj.times, traj.states, gphi, bs, k));
    const double decay = values.empty() ? std::numeric_limits<double>::quiet_NaN() : values.back() / w;
    values.push_back(w);
    res.add({static_cast<double>(stride), sc.dt * static_cast<double>(stride), w, decay});
  }
  r.table("residual.csv", res);
  json dec = json::array();
  for (std::size_t i = 1; i < values.size(); ++i) dec.push_back(number(values[i - 1] / values[i]));
  r.results["residual"] = {{"strides", strides}, {"max_residual", values}, {"decay", dec}};
  check_tolerance(r, "residual at the finest stride", values.back(), c.real("residual_tol"));
  const double need = c.real("residual_decay");
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i - 1] / values[i];
    if (!(d >= need)) {
      r.violate("residual decay " + format_number(d) + " below " + format_number(need) + " at stride " +
                std::to_string(strides[i]));
    }
  }
}

// ---- norms ----

void cmd_norms(Run& r) {
  const auto& c = r.cfg();
  const double alpha = c.real("alpha");
  require_alpha(alpha);
  const WeightTable wt(BlockSystem(alpha, block_count(c, "K")));
  const long k_min = c.integer("k_min"), k_max = c.integer("k_max");
  require(k_min >= 1 && k_min <= k_max && k_max <= wt.blocks().K(), ErrorKind::Range,
          "need 1 <= k_min <= k_max <= K");
  const std::size_t N = positive_size(c, "N"), M = positive_size(c, "M");
  auto sweep = [&](std::size_t n, std::size_t m) {
    r.log("linear estimates on " + std::to_string(n) + " x " + std::to_string(m));
    const SpaceTimeGrid g(SpatialGrid(n, c.real("L")), m, c.real("T"));
    std::vector<SpectralField> data;
    for (long k = k_min; k <= k_max; ++k) {
      auto phi = SpectralField::zeros(g.spatial(), false);
      for (std::size_t i = 0; i < n; ++i) phi.coeff(i) = wt.blocks().chi(static_cast<int>(k), g.spatial().frequency(i));
      data.push_back(phi);
    }
    return linear_estimate_check(data, c.real("sigma"), g, wt);
  };
  std::vector<LinearEstimateReport> levels{sweep(N, M)};
  if (c.flag("refine")) levels.push_back(sweep(2 * N, 2 * M));

  Table t{{"level", "k", "free_wave", "duhamel", "embedding"}, {}};
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto fw = levels[l].free_wave.table.column("ratio");
    const auto du = levels[l].duhamel.table.column("ratio");
    const auto em = levels[l].embedding.table.column("ratio");
    for (std::size_t i = 0; i < fw.size(); ++i) {
      t.add({static_cast<double>(l), static_cast<double>(k_min) + static_cast<double>(i), fw[i], du[i], em[i]});
    }
  }
  r.table("linear.csv", t);

  const double spread_tol = c.real("spread_tol"), refine_tol = c.real("refine_tol");
  auto pick = [](const LinearEstimateReport& l, int which) -> const EstimateReport& {
    return which == 0 ? l.free_wave : which == 1 ? l.duhamel : l.embedding;
  };
  for (int which = 0; which < 3; ++which) {
    const auto& coarse = pick(levels[0], which);
    json entry = {{"id", coarse.id}, {"samples", coarse.samples}, {"coarse", stats_json(coarse.ratios)}};
    for (const auto& v : coarse.violations) r.violate(coarse.id + ": " + v);
    const double spread = coarse.ratios.max / coarse.ratios.median;
    entry["spread"] = number(spread);
    check_tolerance(r, coarse.id + " max/median ratio", spread, spread_tol);
    if (levels.size() > 1) {
      const auto& fine = pick(levels[1], which);
      for (const auto& v : fine.violations) r.violate(coarse.id + " (refined): " + v);
      const double growth = fine.ratios.max / coarse.ratios.max - 1.0;
      entry["fine"] = stats_json(fine.ratios);
      entry["refinement_growth"] = number(growth);
      check_tolerance(r, coarse.id + " growth under refinement", growth, refine_tol);
    }
    r.results["estimates"].push_back(entry);
  }
}

// ---- verify-estimates ----

const std::vector<std::string> kEstimateParts{"resonance",     "duality",       "trilinear-a",  "trilinear-b",
                                              "trilinear-c",   "bilinear-6.1a", "bilinear-6.1b", "bilinear-6.2",
                                              "bilinear-6.3",  "multiplication"};

std::vector<std::string> expand_parts(const std::vector<std::string>& given, const std::vector<std::string>& known) {
  std::vector<std::string> out;
  for (const auto& p : given) {
    if (p == "all") {
      out = known;
      return out;
    }
    require(std::find(known.begin(), known.end(), p) != known.end(), ErrorKind::Config, "unknown part '" + p + "'");
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

std::vector<int> to_ints(const std::vector<long>& v) { return {v.begin(), v.end()}; }

Lattice lattice(const Config& c) {
  Lattice lat{c.real("dxi"), c.real("dmu")};
  require(lat.dxi > 0.0 && lat.dmu > 0.0, ErrorKind::Config, "dxi and dmu must be positive");
  return lat;
}

void estimates_resonance(Run& r) {
  const auto& c = r.cfg();
  const std::size_t samples = positive_size(c, "resonance_samples");
  for (double a : c.reals("resonance_alphas")) {
    require_alpha(a);
    r.log("resonance, alpha " + format_number(a));
    auto rep = resonance_bound_check(a, samples, r.seed());
    rep.id += "-alpha" + format_number(a);
    r.report(rep);
  }
}

void estimates_duality(Run& r, double alpha) {
  const auto& c = r.cfg();
  const BlockSystem bs(alpha, block_count(c, "trilinear_K"));
  r.log("duality on " + std::to_string(c.integer("triples")) + " triples");
  const auto d = trilinear_duality_check(bs, positive_size(c, "triples"), lattice(c), r.seed());
  r.results["duality"] = {{"triples", d.triples},
                          {"redrawn", d.redrawn},
                          {"duality_error", number(d.duality_error)},
                          {"swap_error", number(d.swap_error)},
                          {"reflect_error", number(d.reflect_error)}};
  check_tolerance(r, "duality error", d.duality_error, c.real("duality_tol"));
  check_tolerance(r, "swap permutation error", d.swap_error, c.real("permutation_tol"));
  check_tolerance(r, "reflection permutation error", d.reflect_error, c.real("permutation_tol"));
}

void estimates_trilinear(Run& r, double alpha, TrilinearPart part) {
  const auto& c = r.cfg();
  const BlockSystem bs(alpha, block_count(c, "trilinear_K"));
  TrilinearSweep sweep;
  sweep.j_values = to_ints(c.integers("j_values"));
  sweep.j3_max = static_cast<int>(c.integer("j3_max"));
  sweep.instances = positive_size(c, "instances");
  sweep.lattice = lattice(c);
  sweep.seed = r.seed();
  sweep.ceiling = c.real("ceiling");
  sweep.saturation_j = to_ints(c.integers("saturation_j"));
  sweep.saturation_j_big = static_cast<int>(c.integer("saturation_j_big"));
  sweep.jobs = r.jobs();
  r.log(std::string("trilinear ") + to_string(part));
  r.report(check_trilinear(part, bs, sweep));
}

void estimates_bilinear(Run& r, double alpha, BilinearLemma lemma) {
  const auto& c = r.cfg();
  const WeightTable wt(BlockSystem(alpha, block_count(c, "bilinear_K")));
  BilinearSweep sweep;
  sweep.j_values = to_ints(c.integers("j_values"));
  sweep.samples = static_cast<int>(positive_size(c, "bilinear_samples"));
  sweep.rho = c.real("rho");
  sweep.lattice = lattice(c);
  sweep.regime.n_threshold = c.real("n_threshold");
  sweep.regime.separation = c.real("separation");
  sweep.regime.comparable = c.real("comparable");
  sweep.seed = r.seed();
  sweep.ceiling = c.real("ceiling");
  sweep.jobs = r.jobs();
  const auto factors = lemma == BilinearLemma::L63 ? c.reals("lambda_factors") : std::vector<double>{0.0};
  for (double f : factors) {
    if (lemma == BilinearLemma::L63) {
      require(f > 0.0, ErrorKind::Config, "lambda_factors must be positive");
      sweep.regime.lambda_factor = f;
    }
    sweep.instances = default_bilinear_instances(lemma, wt.blocks(), sweep.regime);
    require(!sweep.instances.empty(), ErrorKind::Regime,
            std::string("no instance of ") + to_string(lemma) + " satisfies the regime for bilinear_K = " +
                std::to_string(wt.blocks().K()));
    r.log(std::string("bilinear ") + to_string(lemma) + " on " + std::to_string(sweep.instances.size()) +
          " instances");
    auto rep = check_bilinear(lemma, wt, sweep);
    if (lemma == BilinearLemma::L63) rep.id += "-lambda" + format_number(f);
    r.report(rep);
  }
}

void estimates_multiplication(Run& r, double alpha) {
  const auto& c = r.cfg();
  const WeightTable wt(BlockSystem(alpha, block_count(c, "mult_K")));
  const SpaceTimeGrid g(SpatialGrid(positive_size(c, "mult_N"), c.real("mult_L")), positive_size(c, "mult_M"),
                        c.real("mult_T"));
  const auto m = smooth_factor(g, c.real("factor_time_scale"), 1.0, 0.0);
  MultiplicationSweep sweep;
  sweep.max_shift = static_cast<int>(c.integer("max_shift"));
  const auto& space = c.text("factor_space");
  require(space == "sinf" || space == "s2", ErrorKind::Config, "factor_space must be sinf or s2");
  sweep.space = space == "sinf" ? FactorSpace::SInf : FactorSpace::S2;
  sweep.s_order = static_cast<int>(c.integer("factor_order"));
  sweep.seed = r.seed();
  for (long eps : c.integers("epsilons")) {
    require(eps == 0 || eps == -1, ErrorKind::Config, "epsilons must be 0 or -1");
    sweep.epsilon = static_cast<int>(eps);
    r.log("multiplication, epsilon " + std::to_string(eps));
    auto rep = check_multiplication(wt, g, m, sweep);
    rep.id += "-eps" + std::to_string(eps);
    r.report(rep);
  }
}

void cmd_estimates(Run& r) {
  const auto& c = r.cfg();
  const double alpha = c.real("alpha");
  require_alpha(alpha);
  require(c.real("ceiling") > 0.0, ErrorKind::Config, "ceiling must be positive");
  const auto parts = expand_parts(c.words("part"), kEstimateParts);
  r.results["parts"] = parts;
  r.results["reports"] = json::array();
  for (const auto& p : parts) {
    if (p == "resonance") estimates_resonance(r);
    else if (p == "duality") estimates_duality(r, alpha);
    else if (p == "trilinear-a") estimates_trilinear(r, alpha, TrilinearPart::A);
    else if (p == "trilinear-b") estimates_trilinear(r, alpha, TrilinearPart::B);
    else if (p == "trilinear-c") estimates_trilinear(r, alpha, TrilinearPart::C);
    else if (p == "multiplication") estimates_multiplication(r, alpha);
    else estimates_bilinear(r, alpha, bilinear_lemma_from_string(p.substr(std::string("bilinear-").size())));
  }
}

// ---- verify-commutators ----

void commutators_triple(Run& r, double alpha) {
  const auto& c = r.cfg();
  const SpatialGrid g(positive_size(c, "triple_N"), kTwoPi);
  const long modes = c.integer("triple_modes");
  require(modes >= 1 && modes < static_cast<long>(g.size() / 4), ErrorKind::Config,
          "triple_modes must lie in [1, triple_N / 4)");
  std::mt19937_64 rng(r.seed());
  const auto w = random_real_field(g, modes, rng);
  const double scale = max_abs(dispersive_operator(w, alpha).coeffs());

  auto constant = SpectralField::zeros(g, true);
  constant.coeff(0) = 2.0;
  const double const_err = max_abs(triple_commutator(constant, w, alpha).coeffs()) / scale;

  const auto pairs = c.integers("mode_pairs");
  require(!pairs.empty() && pairs.size() % 2 == 0, ErrorKind::Config, "mode_pairs needs an even number of entries");
  const long limit = static_cast<long>(g.size() / 4);
  auto sym = [&](double xi) { return cplx(0.0, xi) * std::pow(std::abs(xi), alpha); };
  Table t{{"p", "q", "re", "im", "expected_re", "expected_im", "error"}, {}};
  double modes_err = 0.0;
  for (std::size_t i = 0; i < pairs.size(); i += 2) {
    const long p = pairs[i], q = pairs[i + 1];
    require(p != 0 && std::abs(p) < limit && std::abs(q) < limit, ErrorKind::Config,
            "mode_pairs entries must satisfy 0 < |p| < triple_N / 4 and |q| < triple_N / 4");
    auto mp = SpectralField::zeros(g, false);
    auto ww = SpectralField::zeros(g, false);
    mp.coeff(g.index_of_mode(q)) = 1.0;
    ww.coeff(g.index_of_mode(p)) = 1.0;
    const double P = static_cast<double>(p), Q = static_cast<double>(q);
    const cplx iq(0.0, Q);
    const cplx expect = sym(P + Q) - sym(P) - (alpha + 1.0) * iq * std::pow(std::abs(P), alpha) +
                        0.5 * alpha * (alpha + 1.0) * iq * iq * std::pow(std::abs(P), alpha - 2.0) * cplx(0.0, P);
    const cplx got = triple_commutator(mp, ww, alpha).coeff(g.index_of_mode(p + q));
    const double err = std::abs(got - expect) / std::max(1.0, std::abs(expect));
    modes_err = std::max(modes_err, err);
    t.add({P, Q, got.real(), got.imag(), expect.real(), expect.imag(), err});
  }
  r.table("triple_modes.csv", t);

  const auto mp = random_real_field(g, std::min(modes, 6L), rng);
  auto expect = multiply(derivative(mp, 3), w);
  expect *= -1.0;
  const double a2_err =
      (triple_commutator(mp, w, 2.0) - expect).max_abs_coeff() / std::max(expect.max_abs_coeff(), 1e-300);

  r.results["triple"] = {{"constant_error", number(const_err)},
                         {"two_mode_error", number(modes_err)},
                         {"alpha2_error", number(a2_err)}};
  check_tolerance(r, "constant-m' commutator", const_err, c.real("constant_tol"));
  check_tolerance(r, "two-mode closed-form error", modes_err, c.real("modes_tol"));
  check_tolerance(r, "alpha = 2 error", a2_err, c.real("alpha2_tol"));
}

void commutators_lemma(Run& r, double alpha) {
  const auto& c = r.cfg();
  const WeightTable wt(BlockSystem(alpha, block_count(c, "K")));
  const SpaceTimeGrid g(SpatialGrid(positive_size(c, "N"), c.real("L")), positive_size(c, "M"), c.real("T"));
  CommutatorSpec spec;
  spec.sigma1 = static_cast<int>(c.integer("sigma1"));
  spec.sigma2 = c.real("sigma2");
  spec.sigma = c.real("sigma");
  spec.decay_power = static_cast<int>(c.integer("decay_power"));
  std::mt19937_64 rng(r.seed());
  std::normal_distribution<double> nd;
  auto w = SpaceTimeSpectral::zeros(g, TimeFrame::Modulation, alpha);
  const double band = c.real("w_bandwidth"), mod = c.real("w_modulation");
  for (std::size_t i = 0; i < g.spatial().size(); ++i) {
    if (std::abs(w.xi(i)) > band) continue;
    for (std::size_t n = 0; n < g.n_times(); ++n) {
      if (std::abs(g.tau(n)) <= mod) w.coeff(i, n) = cplx(nd(rng), nd(rng));
    }
  }
  const double ts = c.real("factor_time_scale");
  const double width = c.real("factor_width");
  const auto m = smooth_factor(g, ts, width, 0.0);
  const auto m_prime = smooth_factor(g, ts, width, width);
  const long mu_max = c.integer("mu_max");
  require(mu_max >= 0, ErrorKind::Config, "mu_max must be non-negative");
  r.log("commutator lemma");
  const auto rep = check_commutator(wt, spec, to_ints(c.integers("ks")), static_cast<int>(mu_max), m, m_prime, w);
  r.report(rep);
}

void cmd_commutators(Run& r) {
  const auto& c = r.cfg();
  const double alpha = c.real("alpha");
  require_alpha(alpha);
  const auto parts = expand_parts(c.words("part"), {"triple", "lemma"});
  r.results["parts"] = parts;
  for (const auto& p : parts) {
    if (p == "triple") commutators_triple(r, alpha);
    else commutators_lemma(r, alpha);
  }
}

// ---- demo-illposed, scaling, difference ----

void cmd_illposed(Run& r) {
  const auto& c = r.cfg();
  SolverConfig sc;
  sc.alpha = c.real("alpha");
  require_alpha(sc.alpha);
  sc.grid = SpatialGrid(positive_size(c, "N"), c.real("L"));
  sc.t_end = c.real("t_end");
  sc.dt = sc.t_end / static_cast<double>(positive_size(c, "steps"));
  sc.dealias = c.real("dealias");
  sc.integrator = integrator_from_string(c.text("integrator"));
  sc.snapshot_stride = static_cast<int>(c.integer("snapshot_stride"));
  sc.validate();
  const auto cs = c.reals("c_values");
  require(cs.size() >= 2, ErrorKind::InsufficientData, "c_values needs at least two entries");
  for (double v : cs) require(v > 0.0, ErrorKind::Config, "c_values must be positive");
  const PacketSpec packet{c.real("packet_amplitude"), c.real("packet_width"), c.real("packet_carrier")};
  r.log("packet runs for " + std::to_string(cs.size()) + " shifts");
  const auto t = nonuniform_continuity_demo(cs, packet, sc);
  r.table("illposed.csv", t);
  const auto input = t.column("input_distance");
  const auto output = t.column("output_distance");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    lx.push_back(std::log(cs[i]));
    ly.push_back(std::log(input[i]));
  }
  auto fit = linear_fit(lx, ly, "log c");
  fit.has_prediction = true;
  fit.predicted_slope = 1.0;
  const double min_in = *std::min_element(input.begin(), input.end());
  const double min_out = *std::min_element(output.begin(), output.end());
  const double saturation = min_out / min_in;
  r.results["dt"] = number(sc.dt);
  r.results["packet_l2"] = number(wave_packet(sc.grid, packet).l2_norm());
  r.results["input_slope"] = regression_json(fit);
  r.results["min_input_distance"] = number(min_in);
  r.results["min_output_distance"] = number(min_out);
  r.results["saturation_factor"] = number(saturation);
  const double tol = c.real("slope_tol");
  if (!(std::abs(fit.slope - 1.0) <= tol)) {
    r.violate("input distance slope " + format_number(fit.slope) + " outside 1 +- " + format_number(tol));
  }
  const double need = c.real("saturation_factor");
  if (!(saturation >= need)) {
    r.violate("output saturation factor " + format_number(saturation) + " below " + format_number(need));
  }
}

void cmd_scaling(Run& r) {
  const auto& c = r.cfg();
  const auto sc = solver_config(c);
  const auto phi = smooth_datum(sc.grid, c.real("datum_l2"));
  r.log("scaling check, lambda " + format_number(c.real("lambda")));
  const auto s = scaling_check(phi, c.real("lambda"), sc);
  r.results["mismatch"] = number(s.mismatch);
  r.results["l2_ratio"] = number(s.l2_ratio);
  r.results["l2_ratio_expected"] = number(s.l2_ratio_expected);
  check_tolerance(r, "scaling mismatch", s.mismatch, c.real("mismatch_tol"));
}

void cmd_difference(Run& r) {
  const auto& c = r.cfg();
  const auto sc = solver_config(c);
  const auto phi = smooth_datum(sc.grid, c.real("datum_l2"));
  r.log("difference experiment, n_cut " + format_number(c.real("n_cut")));
  r.results["ratio"] = number(difference_experiment(phi, c.real("n_cut"), sc));
}

struct Entry {
  std::vector<KeySpec> (*keys)();
  void (*body)(Run&);
};

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> r{
      {"solve", {solve_keys, cmd_solve}},
      {"conserve", {conserve_keys, cmd_conserve}},
      {"renorm", {renorm_keys, cmd_renorm}},
      {"norms", {norms_keys, cmd_norms}},
      {"verify-estimates", {estimates_keys, cmd_estimates}},
      {"verify-commutators", {commutators_keys, cmd_commutators}},
      {"demo-illposed", {illposed_keys, cmd_illposed}},
      {"scaling", {scaling_keys, cmd_scaling}},
      {"difference", {difference_keys, cmd_difference}},
  };
  return r;
}

const Entry& entry(const std::string& subcommand) {
  const auto it = registry().find(subcommand);
  if (it == registry().end()) fail(ErrorKind::Config, "unknown subcommand '" + subcommand + "'");
  return it->second;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"solve",   "conserve",           "renorm",
                                              "norms",   "verify-estimates",   "verify-commutators",
                                              "demo-illposed", "scaling",    "difference"};
  return names;
}

std::vector<KeySpec> keys(const std::string& subcommand) { return entry(subcommand).keys(); }

Outcome execute(const std::string& subcommand, const std::string& config_text, const Options& opts) {
  const auto& e = entry(subcommand);
  Config cfg(e.keys(), config_text);
  if (opts.seed) cfg.set("seed", std::to_string(*opts.seed));
  if (opts.jobs > 0) cfg.set("jobs", std::to_string(opts.jobs));
  require(cfg.integer("jobs") >= 1 && cfg.integer("jobs") <= 256, ErrorKind::Config, "jobs must lie in [1, 256]");
  (void)cfg.unsigned_integer("seed");

  Run run(subcommand, cfg, opts);
  run.prepare();
  auto config = cfg.effective();
  config.erase("jobs");
  const auto start = std::chrono::steady_clock::now();
  auto metadata = [&](const std::string& status, const std::string& error) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json m = {{"schema_version", kSchemaVersion},
              {"tool", "dgbo"},
              {"version", DGBO_VERSION_STRING},
              {"subcommand", subcommand},
              {"seed", cfg.unsigned_integer("seed")},
              {"jobs", cfg.integer("jobs")},
              {"config", config},
              {"status", status},
              {"wall_time_seconds", wall},
              {"artifacts", run.artifacts}};
    if (!error.empty()) m["error"] = error;
    run.write("metadata.json", m.dump(2) + "\n", false);
  };

  try {
    e.body(run);
  } catch (const std::exception& ex) {
    try {
      metadata("error", ex.what());
    } catch (const IoError&) {
    }
    throw;
  }
  const json report = {{"schema_version", kSchemaVersion},
                       {"subcommand", subcommand},
                       {"seed", cfg.unsigned_integer("seed")},
                       {"config", config},
                       {"passed", run.violations.empty()},
                       {"violations", run.violations},
                       {"warnings", run.warnings},
                       {"results", run.results}};
  run.write("report.json", report.dump(2) + "\n");
  metadata(run.violations.empty() ? "ok" : "violations", "");
  run.log(run.violations.empty() ? "done" : std::to_string(run.violations.size()) + " violation(s)");
  return {run.violations, run.artifacts};
}

}  // namespace dgbo::run
