// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <new>
#include <string>
#include <vector>

#include "dgbo/blocks.hpp"
#include "dgbo/dgbo.h"
#include "dgbo/errors.hpp"
#include "dgbo/lattice.hpp"
#include "dgbo/solver.hpp"
#include "dgbo/verifier.hpp"
#include "runner.hpp"

struct dgbo_field {
  dgbo::SpectralField f;
};

struct dgbo_trajectory {
  dgbo::Trajectory t;
  dgbo::ConservationReport c;
};

struct dgbo_blocks {
  dgbo::BlockSystem bs;
};

struct dgbo_report {
  dgbo::EstimateReport r;
  std::string json;
};

namespace {

thread_local std::string last_error;

dgbo_status from_kind(dgbo::ErrorKind k) {
  using dgbo::ErrorKind;
  switch (k) {
    case ErrorKind::Config: return DGBO_ERR_CONFIG;
    case ErrorKind::InputShape: return DGBO_ERR_INPUT_SHAPE;
    case ErrorKind::Coverage: return DGBO_ERR_COVERAGE;
    case ErrorKind::Support: return DGBO_ERR_SUPPORT;
    case ErrorKind::Range: return DGBO_ERR_RANGE;
    case ErrorKind::NonPeriodicPsi: return DGBO_ERR_NONPERIODIC_PSI;
    case ErrorKind::Divergence: return DGBO_ERR_DIVERGENCE;
    case ErrorKind::Degenerate: return DGBO_ERR_DEGENERATE;
    case ErrorKind::InsufficientData: return DGBO_ERR_INSUFFICIENT_DATA;
    case ErrorKind::Regime: return DGBO_ERR_REGIME;
  }
  return DGBO_ERR_INTERNAL;
}

dgbo_status failure(dgbo_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
dgbo_status guard(F&& body) noexcept {
  try {
    return body();
  } catch (const dgbo::DivergenceError& e) {
    return failure(DGBO_ERR_DIVERGENCE,
                   std::string(e.what()) + " (last good time " + dgbo::run::format_number(e.last_good_time()) + ")");
  } catch (const dgbo::Error& e) {
    return failure(from_kind(e.kind()), e.what());
  } catch (const dgbo::run::IoError& e) {
    return failure(DGBO_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return failure(DGBO_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return failure(DGBO_ERR_INTERNAL, e.what());
  } catch (...) {
    return failure(DGBO_ERR_INTERNAL, "unknown error");
  }
}

#define DGBO_REQUIRE_ARG(p)                                                   \
  do {                                                                        \
    if ((p) == nullptr) return failure(DGBO_ERR_NULL_ARGUMENT, #p " is NULL"); \
  } while (0)

}  // namespace

extern "C" {

const char* dgbo_version(void) { return DGBO_VERSION_STRING; }

const char* dgbo_status_name(dgbo_status status) {
  switch (status) {
    case DGBO_OK: return "ok";
    case DGBO_ERR_CONFIG: return "config";
    case DGBO_ERR_INPUT_SHAPE: return "input-shape";
    case DGBO_ERR_COVERAGE: return "coverage";
    case DGBO_ERR_SUPPORT: return "support";
    case DGBO_ERR_RANGE: return "range";
    case DGBO_ERR_NONPERIODIC_PSI: return "nonperiodic-psi";
    case DGBO_ERR_DIVERGENCE: return "divergence";
    case DGBO_ERR_DEGENERATE: return "degenerate";
    case DGBO_ERR_INSUFFICIENT_DATA: return "insufficient-data";
    case DGBO_ERR_REGIME: return "regime";
    case DGBO_ERR_VIOLATION: return "violation";
    case DGBO_ERR_IO: return "io";
    case DGBO_ERR_NULL_ARGUMENT: return "null-argument";
    case DGBO_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* dgbo_last_error(void) { return last_error.c_str(); }

int dgbo_exit_code(dgbo_status status) {
  switch (status) {
    case DGBO_OK: return 0;
    case DGBO_ERR_CONFIG:
    case DGBO_ERR_INPUT_SHAPE:
    case DGBO_ERR_COVERAGE:
    case DGBO_ERR_SUPPORT:
    case DGBO_ERR_RANGE:
    case DGBO_ERR_NONPERIODIC_PSI:
    case DGBO_ERR_DEGENERATE:
    case DGBO_ERR_INSUFFICIENT_DATA:
    case DGBO_ERR_REGIME: return 2;
    case DGBO_ERR_DIVERGENCE: return 3;
    case DGBO_ERR_VIOLATION: return 4;
    default: return 1;
  }
}

// ---- fields ----

dgbo_status dgbo_field_from_samples(const double* samples, size_t n, double length, dgbo_field** out) {
  DGBO_REQUIRE_ARG(samples);
  DGBO_REQUIRE_ARG(out);
  return guard([&] {
    const dgbo::SpatialGrid g(n, length);
    *out = new dgbo_field{dgbo::to_spectral(std::span<const double>(samples, n), g)};
    return DGBO_OK;
  });
}

dgbo_status dgbo_field_smooth(size_t n, double length, double l2_norm, dgbo_field** out) {
  DGBO_REQUIRE_ARG(out);
  return guard([&] {
    const dgbo::SpatialGrid g(n, length);
    dgbo::require(std::isfinite(l2_norm) && l2_norm >= 0.0, dgbo::ErrorKind::Config,
                  "l2_norm must be finite and non-negative");
    *out = new dgbo_field{l2_norm == 0.0 ? dgbo::SpectralField::zeros(g) : dgbo::smooth_datum(g, l2_norm)};
    return DGBO_OK;
  });
}

dgbo_status dgbo_field_packet(size_t n, double length, double amplitude, double width, double carrier,
                              dgbo_field** out) {
  DGBO_REQUIRE_ARG(out);
  return guard([&] {
    const dgbo::SpatialGrid g(n, length);
    *out = new dgbo_field{dgbo::wave_packet(g, {amplitude, width, carrier})};
    return DGBO_OK;
  });
}

size_t dgbo_field_size(const dgbo_field* f) { return f ? f->f.size() : 0; }

dgbo_status dgbo_field_samples(const dgbo_field* f, double* out, size_t n) {
  DGBO_REQUIRE_ARG(f);
  DGBO_REQUIRE_ARG(out);
  return guard([&] {
    dgbo::require(n == f->f.size(), dgbo::ErrorKind::InputShape,
                  "buffer holds " + std::to_string(n) + " values, the field " + std::to_string(f->f.size()));
    const auto s = f->f.real_samples();
    std::copy(s.begin(), s.end(), out);
    return DGBO_OK;
  });
}

dgbo_status dgbo_field_l2_norm(const dgbo_field* f, double* out) {
  DGBO_REQUIRE_ARG(f);
  DGBO_REQUIRE_ARG(out);
  return guard([&] {
    *out = f->f.l2_norm();
    return DGBO_OK;
  });
}

dgbo_status dgbo_field_sobolev_norm(const dgbo_field* f, double sigma, double* out) {
  DGBO_REQUIRE_ARG(f);
  DGBO_REQUIRE_ARG(out);
  return guard([&] {
    *out = dgbo::sobolev_norm(f->f, sigma);
    return DGBO_OK;
  });
}

void dgbo_field_free(dgbo_field* f) { delete f; }

// ---- solver ----

void dgbo_solver_config_init(dgbo_solver_config* cfg) {
  if (!cfg) return;
  cfg->alpha = 1.5;
  cfg->n = 2048;
  cfg->length = 256.0;
  cfg->dt = 5e-4;
  cfg->t_end = 1.0;
  cfg->dealias = 2.0 / 3.0;
  cfg->integrator = DGBO_IFRK4;
  cfg->snapshot_stride = 1;
}

dgbo_status dgbo_solve(const dgbo_field* phi, const dgbo_solver_config* cfg, dgbo_trajectory** out) {
  DGBO_REQUIRE_ARG(phi);
  DGBO_REQUIRE_ARG(cfg);
  DGBO_REQUIRE_ARG(out);
  return guard([&] {
    dgbo::SolverConfig sc;
    sc.alpha = cfg->alpha;
    sc.grid = dgbo::SpatialGrid(cfg->n, cfg->length);
    sc.dt = cfg->dt;
    sc.t_end = cfg->t_end;
    sc.dealias = cfg->dealias;
    dgbo::require(cfg->integrator == DGBO_IFRK4 || cfg->integrator == DGBO_ETDRK4, dgbo::ErrorKind::Config,
                  "unknown integrator");
    sc.integrator = cfg->integrator == DGBO_IFRK4 ? dgbo::Integrator::IFRK4 : dgbo::Integrator::ETDRK4;
    sc.snapshot_stride = cfg->snapshot_stride;
    sc.validate();
    dgbo::require(phi->f.grid() == sc.grid, dgbo::ErrorKind::InputShape, "datum grid differs from the config grid");
    auto traj = dgbo::solve_ivp(phi->f, sc);
    auto report = dgbo::conservation_report(traj);
    *out = new dgbo_trajectory{std::move(traj), std::move(report)};
    return DGBO_OK;
  });
}

size_t dgbo_trajectory_length(const dgbo_trajectory* traj) { return traj ? traj->t.times.size() : 0; }

dgbo_status dgbo_trajectory_time(const dgbo_trajectory* traj, size_t index, double* out) {
  DGBO_REQUIRE_ARG(traj);
  DGBO_REQUIRE_ARG(out);
  if (index >= traj->t.times.size()) return failure(DGBO_ERR_RANGE, "snapshot index out of range");
  *out = traj->t.times[index];
  return DGBO_OK;
}

dgbo_status dgbo_trajectory_state(const dgbo_trajectory* traj, size_t index, dgbo_field** out) {
  DGBO_REQUIRE_ARG(traj);
  DGBO_REQUIRE_ARG(out);
  if (index >= traj->t.states.size()) return failure(DGBO_ERR_RANGE, "snapshot index out of range");
  return guard([&] {
    *out = new dgbo_field{traj->t.states[index]};
    return DGBO_OK;
  });
}

dgbo_status dgbo_trajectory_drifts(const dgbo_trajectory* traj, dgbo_drifts* out) {
  DGBO_REQUIRE_ARG(traj);
  DGBO_REQUIRE_ARG(out);
  out->l2 = traj->c.l2_drift;
  out->mean = traj->c.mean_drift;
  out->hamiltonian = traj->c.hamiltonian_drift;
  return DGBO_OK;
}

void dgbo_trajectory_free(dgbo_trajectory* traj) { delete traj; }

// ---- blocks ----

dgbo_status dgbo_blocks_create(double alpha, int K, dgbo_blocks** out) {
  DGBO_REQUIRE_ARG(out);
  return guard([&] {
    *out = new dgbo_blocks{dgbo::BlockSystem(alpha, K)};
    return DGBO_OK;
  });
}

dgbo_status dgbo_blocks_center(const dgbo_blocks* bs, int k, double* out) {
  DGBO_REQUIRE_ARG(bs);
  DGBO_REQUIRE_ARG(out);
  return guard([&] {
    *out = bs->bs.n(k);
    return DGBO_OK;
  });
}

dgbo_status dgbo_blocks_chi(const dgbo_blocks* bs, int k, double xi, double* out) {
  DGBO_REQUIRE_ARG(bs);
  DGBO_REQUIRE_ARG(out);
  return guard([&] {
    *out = bs->bs.chi(k, xi);
    return DGBO_OK;
  });
}

dgbo_status dgbo_blocks_partition_defect(const dgbo_blocks* bs, size_t samples, double* out) {
  DGBO_REQUIRE_ARG(bs);
  DGBO_REQUIRE_ARG(out);
  return guard([&] {
    *out = dgbo::partition_of_unity_defect(bs->bs, samples);
    return DGBO_OK;
  });
}

void dgbo_blocks_free(dgbo_blocks* bs) { delete bs; }

// ---- verifier ----

dgbo_status dgbo_resonance(double xi1, double xi2, double alpha, double* out) {
  DGBO_REQUIRE_ARG(out);
  return guard([&] {
    *out = dgbo::resonance(xi1, xi2, alpha);
    return DGBO_OK;
  });
}

dgbo_status dgbo_check_resonance(double alpha, size_t samples, uint64_t seed, dgbo_report** out) {
  DGBO_REQUIRE_ARG(out);
  return guard([&] {
    auto r = dgbo::resonance_bound_check(alpha, samples, seed);
    auto text = dgbo::run::to_json(r).dump();
    *out = new dgbo_report{std::move(r), std::move(text)};
    return DGBO_OK;
  });
}

dgbo_status dgbo_triple_commutator_modes(size_t n, long p, long q, double alpha, double* re, double* im) {
  DGBO_REQUIRE_ARG(re);
  DGBO_REQUIRE_ARG(im);
  return guard([&] {
    const dgbo::SpatialGrid g(n, dgbo::kTwoPi);
    const long limit = static_cast<long>(n / 4);
    dgbo::require(std::labs(p) < limit && std::labs(q) < limit, dgbo::ErrorKind::Config,
                  "modes must satisfy |p|, |q| < N/4");
    auto mp = dgbo::SpectralField::zeros(g, false);
    auto w = dgbo::SpectralField::zeros(g, false);
    mp.coeff(g.index_of_mode(q)) = 1.0;
    w.coeff(g.index_of_mode(p)) = 1.0;
    const auto c = dgbo::triple_commutator(mp, w, alpha).coeff(g.index_of_mode(p + q));
    *re = c.real();
    *im = c.imag();
    return DGBO_OK;
  });
}

int dgbo_report_passed(const dgbo_report* r) { return r && r->r.passed() ? 1 : 0; }

size_t dgbo_report_violation_count(const dgbo_report* r) { return r ? r->r.violations.size() : 0; }

dgbo_status dgbo_report_max_ratio(const dgbo_report* r, double* out) {
  DGBO_REQUIRE_ARG(r);
  DGBO_REQUIRE_ARG(out);
  *out = r->r.ratios.max;
  return DGBO_OK;
}

const char* dgbo_report_json(const dgbo_report* r) { return r ? r->json.c_str() : nullptr; }

void dgbo_report_free(dgbo_report* r) { delete r; }

// ---- runner ----

void dgbo_run_options_init(dgbo_run_options* opts) {
  if (!opts) return;
  opts->out_dir = "dgbo-out";
  opts->seed = 1;
  opts->seed_set = 0;
  opts->jobs = 0;
  opts->quiet = 0;
}

const char* const* dgbo_subcommands(void) {
  static const std::vector<const char*> names = [] {
    std::vector<const char*> v;
    for (const auto& s : dgbo::run::subcommands()) v.push_back(s.c_str());
    v.push_back(nullptr);
    return v;
  }();
  return names.data();
}

dgbo_status dgbo_run(const char* subcommand, const char* config_text, const dgbo_run_options* opts) {
  DGBO_REQUIRE_ARG(subcommand);
  DGBO_REQUIRE_ARG(config_text);
  DGBO_REQUIRE_ARG(opts);
  DGBO_REQUIRE_ARG(opts->out_dir);
  return guard([&] {
    dgbo::run::Options o;
    o.out_dir = opts->out_dir;
    if (opts->seed_set) o.seed = opts->seed;
    o.jobs = opts->jobs;
    o.quiet = opts->quiet != 0;
    const auto outcome = dgbo::run::execute(subcommand, config_text, o);
    if (outcome.violations.empty()) return DGBO_OK;
    std::string msg = std::to_string(outcome.violations.size()) + " violation(s); first: " + outcome.violations.front();
    return failure(DGBO_ERR_VIOLATION, msg);
  });
}

const char* dgbo_default_config(const char* subcommand) {
  thread_local std::string text;
  if (!subcommand) {
    failure(DGBO_ERR_NULL_ARGUMENT, "subcommand is NULL");
    return nullptr;
  }
  const auto s = guard([&] {
    text = dgbo::run::default_text(dgbo::run::keys(subcommand));
    return DGBO_OK;
  });
  return s == DGBO_OK ? text.c_str() : nullptr;
}

}  // extern "C"
