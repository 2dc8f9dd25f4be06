// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#include "dgbo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dgbo/errors.hpp"

namespace dgbo {
namespace {

constexpr double kBlowupFactor = 1e6;
constexpr int kContourPoints = 32;

// Stepper for c' = i omega c + N(c) on the coefficient array.
class Stepper {
 public:
  explicit Stepper(const SolverConfig& cfg)
      : cfg_(cfg), n_(cfg.grid.size()), h_(cfg.dt) {
    cutoff_ = static_cast<long>(std::floor(cfg.dealias * static_cast<double>(n_ / 2)));
    xi_.resize(n_);
    half_.resize(n_);
    full_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      xi_[i] = cfg.grid.frequency(i);
      const double w = dispersion_symbol(xi_[i], cfg.alpha);
      half_[i] = std::polar(1.0, 0.5 * h_ * w);
      full_[i] = std::polar(1.0, h_ * w);
    }
    if (cfg.integrator == Integrator::ETDRK4) build_etd();
    buf_.resize(n_);
  }

  // out = -d_x trunc(trunc(c)^2 / 2).
  void nonlinear(const std::vector<cplx>& c, std::vector<cplx>& out) {
    for (std::size_t i = 0; i < n_; ++i) buf_[i] = kept(i) ? c[i] : cplx(0.0);
    fft_backward(buf_);
    for (auto& z : buf_) z = 0.5 * z * z;
    fft_forward(buf_);
    const double inv = 1.0 / static_cast<double>(n_);
    out.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      out[i] = (kept(i) && !cfg_.grid.is_nyquist(i)) ? cplx(0.0, -xi_[i]) * inv * buf_[i] : cplx(0.0);
    }
  }

  void step(std::vector<cplx>& u) {
    if (cfg_.integrator == Integrator::IFRK4) {
      step_ifrk4(u);
    } else {
      step_etdrk4(u);
    }
    symmetrize(u);
  }

 private:
  bool kept(std::size_t i) const { return std::labs(cfg_.grid.mode(i)) <= cutoff_; }

  void step_ifrk4(std::vector<cplx>& u) {
    nonlinear(u, k1_);
    tmp_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = half_[i] * (u[i] + 0.5 * h_ * k1_[i]);
    nonlinear(tmp_, k2_);
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = half_[i] * u[i] + 0.5 * h_ * k2_[i];
    nonlinear(tmp_, k3_);
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = full_[i] * u[i] + h_ * half_[i] * k3_[i];
    nonlinear(tmp_, k4_);
    for (std::size_t i = 0; i < n_; ++i) {
      u[i] = full_[i] * u[i] +
             h_ / 6.0 * (full_[i] * k1_[i] + 2.0 * half_[i] * (k2_[i] + k3_[i]) + k4_[i]);
    }
  }

  void step_etdrk4(std::vector<cplx>& u) {
    nonlinear(u, k1_);
    a_.resize(n_);
    b_.resize(n_);
    tmp_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) a_[i] = half_[i] * u[i] + q_[i] * k1_[i];
    nonlinear(a_, k2_);
    for (std::size_t i = 0; i < n_; ++i) b_[i] = half_[i] * u[i] + q_[i] * k2_[i];
    nonlinear(b_, k3_);
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = half_[i] * a_[i] + q_[i] * (2.0 * k3_[i] - k1_[i]);
    nonlinear(tmp_, k4_);
    for (std::size_t i = 0; i < n_; ++i) {
      u[i] = full_[i] * u[i] + f1_[i] * k1_[i] + 2.0 * f2_[i] * (k2_[i] + k3_[i]) + f3_[i] * k4_[i];
    }
  }

  // Contour-integral evaluation of the phi-functions (unit circle around
  // each z = i omega h), which avoids cancellation near z = 0.
  void build_etd() {
    q_.resize(n_);
    f1_.resize(n_);
    f2_.resize(n_);
    f3_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const cplx lh(0.0, h_ * dispersion_symbol(xi_[i], cfg_.alpha));
      cplx q = 0.0, f1 = 0.0, f2 = 0.0, f3 = 0.0;
      for (int j = 0; j < kContourPoints; ++j) {
        const cplx z = lh + std::polar(1.0, kPi * (j + 0.5) / kContourPoints);
        const cplx ez = std::exp(z), ez2 = std::exp(0.5 * z);
        const cplx z3 = z * z * z;
        q += (ez2 - 1.0) / z;
        f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
        f2 += (2.0 + z + ez * (z - 2.0)) / z3;
        f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
      }
      // Upper half circle plus conjugate-symmetric lower half: for real
      // lh the mean is the real part; in general average both halves.
      cplx q2 = 0.0, g1 = 0.0, g2 = 0.0, g3 = 0.0;
      for (int j = 0; j < kContourPoints; ++j) {
        const cplx z = lh + std::polar(1.0, -kPi * (j + 0.5) / kContourPoints);
        const cplx ez = std::exp(z), ez2 = std::exp(0.5 * z);
        const cplx z3 = z * z * z;
        q2 += (ez2 - 1.0) / z;
        g1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
        g2 += (2.0 + z + ez * (z - 2.0)) / z3;
        g3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
      }
      const double m = 1.0 / (2.0 * kContourPoints);
      q_[i] = h_ * m * (q + q2);
      f1_[i] = h_ * m * (f1 + g1);
      f2_[i] = h_ * m * (f2 + g2);
      f3_[i] = h_ * m * (f3 + g3);
    }
  }

  void symmetrize(std::vector<cplx>& u) const {
    u[0] = u[0].real();
    u[n_ / 2] = u[n_ / 2].real();
    for (std::size_t i = 1; i < n_ / 2; ++i) {
      const cplx avg = 0.5 * (u[i] + std::conj(u[n_ - i]));
      u[i] = avg;
      u[n_ - i] = std::conj(avg);
    }
  }

  const SolverConfig& cfg_;
  std::size_t n_;
  double h_;
  long cutoff_ = 0;
  std::vector<double> xi_;
  std::vector<cplx> half_, full_;
  std::vector<cplx> q_, f1_, f2_, f3_;
  std::vector<cplx> k1_, k2_, k3_, k4_, tmp_, a_, b_, buf_;
};

double max_abs_samples(const std::vector<cplx>& c) {
  std::vector<cplx> s(c);
  fft_backward(s);
  double m = 0.0;
  for (const auto& z : s) m = std::max(m, std::abs(z));
  return m;
}

bool all_finite(const std::vector<cplx>& c) {
  return std::all_of(c.begin(), c.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double max_frequency(const SpatialGrid& g) { return g.frequency_spacing() * static_cast<double>(g.size() / 2); }

double l2_of_difference(const SpectralField& a, const SpectralField& b) { return (a - b).l2_norm(); }

template <typename Visit>
void integrate(const SpectralField& phi, const SolverConfig& cfg, Visit&& visit) {
  cfg.validate();
  require(phi.grid() == cfg.grid, ErrorKind::InputShape, "datum grid differs from the solver grid");
  Stepper stepper(cfg);
  std::vector<cplx> u(phi.coeffs().begin(), phi.coeffs().end());
  const std::size_t steps = cfg.steps();
  const double initial_peak = max_abs_samples(u);
  double t = 0.0;
  visit(std::size_t{0}, 0.0, u);
  for (std::size_t s = 1; s <= steps; ++s) {
    stepper.step(u);
    const double peak = max_abs_samples(u);
    if (!all_finite(u) || (initial_peak > 0.0 && peak > kBlowupFactor * initial_peak)) {
      std::ostringstream msg;
      msg << "solution blew up after t = " << t << " (sup norm " << peak << ", initial " << initial_peak
          << ")";
      throw DivergenceError(msg.str(), t);
    }
    t = static_cast<double>(s) * cfg.dt;
    visit(s, t, u);
  }
}

}  // namespace

const char* to_string(Integrator integrator) {
  return integrator == Integrator::IFRK4 ? "ifrk4" : "etdrk4";
}

Integrator integrator_from_string(const std::string& name) {
  if (name == "ifrk4") return Integrator::IFRK4;
  if (name == "etdrk4") return Integrator::ETDRK4;
  fail(ErrorKind::Config, "integrator must be ifrk4 or etdrk4, got '" + name + "'");
}

void SolverConfig::validate() const {
  require(std::isfinite(alpha) && alpha > 1.0 && alpha < 2.0, ErrorKind::Config,
          "alpha must lie in the open interval (1,2)");
  require(std::isfinite(dt) && dt > 0.0, ErrorKind::Config, "dt must be positive");
  require(std::isfinite(t_end) && t_end >= 0.0, ErrorKind::Config, "t_end must be >= 0");
  require(dealias > 0.0 && dealias <= 1.0, ErrorKind::Config, "dealias fraction must lie in (0,1]");
  require(snapshot_stride >= 1, ErrorKind::Config, "snapshot_stride must be >= 1");
  const double n = t_end / dt;
  require(std::abs(n - std::round(n)) <= 1e-9 * std::max(1.0, n), ErrorKind::Config,
          "t_end must be an integer multiple of dt");
}

std::size_t SolverConfig::steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

Diagnostics diagnose(const SpectralField& u, double alpha) {
  const auto& g = u.grid();
  Diagnostics d;
  d.l2 = u.l2_norm();
  d.mean = g.length() * u.coeff(0).real();
  double quad = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double xi = std::abs(g.frequency(i));
    if (xi > 0.0) quad += std::pow(xi, alpha) * std::norm(u.coeff(i));
  }
  const auto s = u.samples();
  double cubic = 0.0, peak = 0.0, imag = 0.0;
  for (const auto& z : s) {
    cubic += z.real() * z.real() * z.real();
    peak = std::max(peak, std::abs(z));
    imag = std::max(imag, std::abs(z.imag()));
  }
  d.hamiltonian = 0.5 * g.length() * quad + g.spacing() * cubic / 6.0;
  d.h2 = sobolev_norm(u, 2.0);
  d.max_abs = peak;
  d.imag_residue = peak > 0.0 ? imag / peak : 0.0;
  return d;
}

Trajectory solve_ivp(const SpectralField& phi, const SolverConfig& cfg) {
  Trajectory traj;
  const double xi_max = max_frequency(cfg.grid);
  integrate(phi, cfg, [&](std::size_t s, double t, const std::vector<cplx>& u) {
    if (s % static_cast<std::size_t>(cfg.snapshot_stride) != 0 && s != cfg.steps()) return;
    SpectralField f(cfg.grid, u, true);
    traj.diagnostics.push_back(diagnose(f, cfg.alpha));
    traj.advisory_cfl = std::max(traj.advisory_cfl, cfg.dt * xi_max * traj.diagnostics.back().max_abs);
    traj.times.push_back(t);
    traj.states.push_back(std::move(f));
  });
  return traj;
}

SpectralField evolve(const SpectralField& phi, const SolverConfig& cfg) {
  std::vector<cplx> last;
  integrate(phi, cfg, [&](std::size_t s, double, const std::vector<cplx>& u) {
    if (s == cfg.steps()) last = u;
  });
  return SpectralField(cfg.grid, std::move(last), true);
}

ConservationReport conservation_report(const Trajectory& traj) {
  ConservationReport r;
  if (traj.states.empty()) return r;
  const auto& g = traj.states.front().grid();
  const auto& d0 = traj.diagnostics.front();
  // Scales for the relative drifts.
  const double l2_scale = d0.l2;
  const double mean_scale = std::sqrt(g.length()) * d0.l2;
  // H(0) split into its quadratic and cubic parts gives a scale free of
  // cancellation.
  double cubic = 0.0;
  for (double v : traj.states.front().real_samples()) cubic += v * v * v;
  cubic *= g.spacing() / 6.0;
  const double h_scale = std::abs(d0.hamiltonian - cubic) + std::abs(cubic);
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    const auto& d = traj.diagnostics[n];
    r.times.push_back(traj.times[n]);
    r.l2.push_back(d.l2);
    r.mean.push_back(d.mean);
    r.hamiltonian.push_back(d.hamiltonian);
    if (l2_scale > 0.0) r.l2_drift = std::max(r.l2_drift, std::abs(d.l2 - d0.l2) / l2_scale);
    if (mean_scale > 0.0) r.mean_drift = std::max(r.mean_drift, std::abs(d.mean - d0.mean) / mean_scale);
    if (h_scale > 0.0) {
      r.hamiltonian_drift = std::max(r.hamiltonian_drift, std::abs(d.hamiltonian - d0.hamiltonian) / h_scale);
    }
  }
  return r;
}

EstimateReport h2_bound_experiment(const std::vector<SpectralField>& data, const SolverConfig& cfg,
                                   double eps0) {
  EstimateReport rep;
  rep.id = "h2-bound";
  rep.table.columns = {"index", "l2", "h2_initial", "h2_sup", "ratio"};
  std::vector<double> ratios;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& phi = data[i];
    const double l2 = phi.l2_norm();
    require(l2 <= eps0 * (1.0 + 1e-12), ErrorKind::Config,
            "datum " + std::to_string(i) + " has L2 norm " + std::to_string(l2) + " above eps0");
    const double h0 = sobolev_norm(phi, 2.0);
    if (h0 == 0.0) {
      ++rep.skipped;
      continue;
    }
    const auto traj = solve_ivp(phi, cfg);
    double sup = 0.0;
    for (const auto& d : traj.diagnostics) sup = std::max(sup, d.h2);
    const double ratio = sup / h0;
    ratios.push_back(ratio);
    rep.table.add({static_cast<double>(i), l2, h0, sup, ratio});
    if (!std::isfinite(ratio)) rep.violations.push_back("non-finite ratio for datum " + std::to_string(i));
  }
  rep.samples = ratios.size();
  rep.ratios = ratio_stats(ratios);
  return rep;
}

double difference_experiment(const SpectralField& phi, double n_cut, const SolverConfig& cfg) {
  const auto phi_n = truncate(phi, n_cut);
  const double denom = l2_of_difference(phi, phi_n);
  if (!(denom > 1e-14 * phi.l2_norm()) || denom == 0.0) {
    fail(ErrorKind::Degenerate, "phi has no content above the truncation frequency " + std::to_string(n_cut));
  }
  const auto a = solve_ivp(phi, cfg);
  const auto b = solve_ivp(phi_n, cfg);
  double sup = 0.0;
  for (std::size_t n = 0; n < a.states.size(); ++n) sup = std::max(sup, l2_of_difference(a.states[n], b.states[n]));
  return sup / denom;
}

SpectralField rescale_datum(const SpectralField& phi, double lambda, double alpha) {
  require(lambda > 0.0 && lambda <= 1.0, ErrorKind::Config, "lambda must lie in (0,1]");
  SpatialGrid g(phi.grid().size(), phi.grid().length() / lambda);
  std::vector<cplx> c(phi.coeffs().begin(), phi.coeffs().end());
  const double s = std::pow(lambda, alpha);
  for (auto& z : c) z *= s;
  return SpectralField(g, std::move(c), phi.real_valued());
}

ScalingResult scaling_check(const SpectralField& phi, double lambda, const SolverConfig& cfg) {
  require(std::isfinite(lambda) && lambda > 0.0 && lambda <= 1.0, ErrorKind::Config,
          "lambda must lie in (0,1]");
  ScalingResult r;
  const auto phi_l = rescale_datum(phi, lambda, cfg.alpha);
  r.l2_ratio = phi_l.l2_norm() / phi.l2_norm();
  r.l2_ratio_expected = std::pow(lambda, cfg.alpha - 0.5);
  const double time_scale = std::pow(lambda, cfg.alpha + 1.0);
  SolverConfig scaled = cfg;
  scaled.grid = phi_l.grid();
  scaled.dt = cfg.dt / time_scale;
  scaled.t_end = cfg.t_end / time_scale;
  const auto a = solve_ivp(phi, cfg);
  const auto b = solve_ivp(phi_l, scaled);
  const double amp = std::pow(lambda, cfg.alpha);
  for (std::size_t n = 0; n < b.states.size(); ++n) {
    std::vector<cplx> expect(a.states[n].coeffs().begin(), a.states[n].coeffs().end());
    for (auto& z : expect) z *= amp;
    SpectralField e(scaled.grid, std::move(expect), true);
    const double norm = b.states[n].l2_norm();
    if (norm > 0.0) r.mismatch = std::max(r.mismatch, l2_of_difference(b.states[n], e) / norm);
  }
  return r;
}

SpectralField smooth_datum(const SpatialGrid& grid, double l2_norm) {
  std::vector<double> s(grid.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = grid.x(i);
    s[i] = x * std::exp(-x * x / 8.0);
  }
  auto f = to_spectral(s, grid);
  const double norm = f.l2_norm();
  if (norm > 0.0) f *= l2_norm / norm;
  return f;
}

SpectralField wave_packet(const SpatialGrid& grid, const PacketSpec& spec) {
  std::vector<double> s(grid.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = grid.x(i);
    s[i] = spec.amplitude * std::exp(-0.5 * x * x / (spec.width * spec.width)) * std::cos(spec.carrier * x);
  }
  return to_spectral(s, grid);
}

Table nonuniform_continuity_demo(const std::vector<double>& c_values, const PacketSpec& packet,
                                 const SolverConfig& cfg) {
  Table t;
  t.columns = {"c", "input_distance", "output_distance", "ratio"};
  const auto u0 = wave_packet(cfg.grid, packet);
  const auto base = solve_ivp(u0, cfg);
  for (double c : c_values) {
    auto uc = u0;
    uc.coeff(0) += c;
    const auto run = solve_ivp(uc, cfg);
    const double input = l2_of_difference(uc, u0);
    double output = 0.0;
    for (std::size_t n = 0; n < run.states.size(); ++n) {
      output = std::max(output, l2_of_difference(run.states[n], base.states[n]));
    }
    t.add({c, input, output, input > 0.0 ? output / input : 0.0});
  }
  return t;
}

}  // namespace dgbo
