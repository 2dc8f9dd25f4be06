/* Copyright 2026 The dgbo Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the dgbo library: periodic pseudo-spectral solver for
 * u_t + D^alpha u_x + (u^2/2)_x = 0, frequency blocks, gauge renormalization,
 * Bourgain-type norms and the estimate verifier.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns a dgbo_status; on failure dgbo_last_error()
 * holds a message for the calling thread until its next failing call.
 */
#ifndef DGBO_DGBO_H
#define DGBO_DGBO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(DGBO_BUILDING_LIBRARY)
#define DGBO_API __declspec(dllexport)
#else
#define DGBO_API __declspec(dllimport)
#endif
#else
#define DGBO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dgbo_status {
  DGBO_OK = 0,
  DGBO_ERR_CONFIG = 1,            /* parameter outside its admissible range */
  DGBO_ERR_INPUT_SHAPE = 2,       /* buffer sizes disagree with the grid */
  DGBO_ERR_COVERAGE = 3,          /* active frequencies outside the block system */
  DGBO_ERR_SUPPORT = 4,           /* space-time support condition violated */
  DGBO_ERR_RANGE = 5,             /* block index outside the constructed range */
  DGBO_ERR_NONPERIODIC_PSI = 6,   /* low-frequency part has nonzero mean */
  DGBO_ERR_DIVERGENCE = 7,        /* solver blow-up */
  DGBO_ERR_DEGENERATE = 8,        /* zero denominator in a ratio experiment */
  DGBO_ERR_INSUFFICIENT_DATA = 9, /* too few snapshots or points */
  DGBO_ERR_REGIME = 10,           /* instance outside the estimate hypotheses */
  DGBO_ERR_VIOLATION = 11,        /* run completed with estimate violations */
  DGBO_ERR_IO = 12,               /* artifact directory or file not writable */
  DGBO_ERR_NULL_ARGUMENT = 13,
  DGBO_ERR_INTERNAL = 14
} dgbo_status;

DGBO_API const char* dgbo_version(void);
DGBO_API const char* dgbo_status_name(dgbo_status status);
DGBO_API const char* dgbo_last_error(void);

/* Process exit code for a status: 0 ok, 2 validation, 3 divergence,
 * 4 estimate violation, 1 anything else. */
DGBO_API int dgbo_exit_code(dgbo_status status);

/* ---- Fields on the periodic grid of N points and period L ---- */

typedef struct dgbo_field dgbo_field;

/* Real samples u(x_i), x_i = -L/2 + i L/N. */
DGBO_API dgbo_status dgbo_field_from_samples(const double* samples, size_t n, double length, dgbo_field** out);
/* Odd datum x exp(-x^2/8) scaled to the given L2 norm. */
DGBO_API dgbo_status dgbo_field_smooth(size_t n, double length, double l2_norm, dgbo_field** out);
/* amplitude exp(-x^2 / (2 width^2)) cos(carrier x). */
DGBO_API dgbo_status dgbo_field_packet(size_t n, double length, double amplitude, double width, double carrier,
                                       dgbo_field** out);
DGBO_API size_t dgbo_field_size(const dgbo_field* f);
DGBO_API dgbo_status dgbo_field_samples(const dgbo_field* f, double* out, size_t n);
DGBO_API dgbo_status dgbo_field_l2_norm(const dgbo_field* f, double* out);
DGBO_API dgbo_status dgbo_field_sobolev_norm(const dgbo_field* f, double sigma, double* out);
DGBO_API void dgbo_field_free(dgbo_field* f);

/* ---- Solver ---- */

typedef enum dgbo_integrator { DGBO_IFRK4 = 0, DGBO_ETDRK4 = 1 } dgbo_integrator;

typedef struct dgbo_solver_config {
  double alpha;
  size_t n;
  double length;
  double dt;
  double t_end;
  double dealias;
  dgbo_integrator integrator;
  int snapshot_stride;
} dgbo_solver_config;

/* alpha 1.5, N 2048, L 256, dt 5e-4, t_end 1, dealias 2/3, IFRK4, stride 1. */
DGBO_API void dgbo_solver_config_init(dgbo_solver_config* cfg);

typedef struct dgbo_trajectory dgbo_trajectory;

typedef struct dgbo_drifts {
  double l2;
  double mean;
  double hamiltonian;
} dgbo_drifts;

/* phi must live on the grid of cfg. */
DGBO_API dgbo_status dgbo_solve(const dgbo_field* phi, const dgbo_solver_config* cfg, dgbo_trajectory** out);
DGBO_API size_t dgbo_trajectory_length(const dgbo_trajectory* traj);
DGBO_API dgbo_status dgbo_trajectory_time(const dgbo_trajectory* traj, size_t index, double* out);
DGBO_API dgbo_status dgbo_trajectory_state(const dgbo_trajectory* traj, size_t index, dgbo_field** out);
DGBO_API dgbo_status dgbo_trajectory_drifts(const dgbo_trajectory* traj, dgbo_drifts* out);
DGBO_API void dgbo_trajectory_free(dgbo_trajectory* traj);

/* ---- Frequency blocks ---- */

typedef struct dgbo_blocks dgbo_blocks;

DGBO_API dgbo_status dgbo_blocks_create(double alpha, int K, dgbo_blocks** out);
DGBO_API dgbo_status dgbo_blocks_center(const dgbo_blocks* bs, int k, double* out);
DGBO_API dgbo_status dgbo_blocks_chi(const dgbo_blocks* bs, int k, double xi, double* out);
DGBO_API dgbo_status dgbo_blocks_partition_defect(const dgbo_blocks* bs, size_t samples, double* out);
DGBO_API void dgbo_blocks_free(dgbo_blocks* bs);

/* ---- Estimate verifier ---- */

typedef struct dgbo_report dgbo_report;

DGBO_API dgbo_status dgbo_resonance(double xi1, double xi2, double alpha, double* out);
DGBO_API dgbo_status dgbo_check_resonance(double alpha, size_t samples, uint64_t seed, dgbo_report** out);
/* Commutator of the two-mode pair m' = e^{iqx}, w = e^{ipx} on N points,
 * period 2 pi: coefficient at mode p + q (real and imaginary parts). */
DGBO_API dgbo_status dgbo_triple_commutator_modes(size_t n, long p, long q, double alpha, double* re, double* im);
DGBO_API int dgbo_report_passed(const dgbo_report* r);
DGBO_API size_t dgbo_report_violation_count(const dgbo_report* r);
DGBO_API dgbo_status dgbo_report_max_ratio(const dgbo_report* r, double* out);
/* JSON serialization; the string is owned by the report. */
DGBO_API const char* dgbo_report_json(const dgbo_report* r);
DGBO_API void dgbo_report_free(dgbo_report* r);

/* ---- Experiment runner ---- */

typedef struct dgbo_run_options {
  const char* out_dir; /* created if missing */
  uint64_t seed;
  int seed_set;        /* nonzero: seed overrides the config value */
  unsigned jobs;       /* 0: keep the config value */
  int quiet;           /* nonzero: no progress lines on stderr */
} dgbo_run_options;

DGBO_API void dgbo_run_options_init(dgbo_run_options* opts);

/* Names of the subcommands accepted by dgbo_run, NULL-terminated. */
DGBO_API const char* const* dgbo_subcommands(void);

/* Runs a subcommand with a key = value configuration (one key per line,
 * '#' starts a comment, unknown keys rejected) and writes metadata.json,
 * report.json and the subcommand's tables into out_dir. Returns
 * DGBO_ERR_VIOLATION when the run completed but reported violations. */
DGBO_API dgbo_status dgbo_run(const char* subcommand, const char* config_text, const dgbo_run_options* opts);

/* Configuration keys of a subcommand with defaults, as key = value text;
 * the string is valid until the next call from the same thread. */
DGBO_API const char* dgbo_default_config(const char* subcommand);

#ifdef __cplusplus
}
#endif

#endif /* DGBO_DGBO_H */
