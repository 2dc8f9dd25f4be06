// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "dgbo/report.hpp"
#include "dgbo/spectral_field.hpp"

namespace dgbo {

enum class Integrator { IFRK4, ETDRK4 };

const char* to_string(Integrator integrator);
Integrator integrator_from_string(const std::string& name);

struct SolverConfig {
  double alpha = 1.5;
  SpatialGrid grid{4096, 256.0};
  double dt = 1e-3;
  double t_end = 1.0;
  /// Fraction of the half-spectrum kept in the quadratic term (2/3 rule).
  double dealias = 2.0 / 3.0;
  Integrator integrator = Integrator::IFRK4;
  int snapshot_stride = 1;

  /// Throws a config error naming the offending field.
  void validate() const;
  std::size_t steps() const;
};

struct Diagnostics {
  double l2 = 0.0;
  double mean = 0.0;
  double hamiltonian = 0.0;
  double h2 = 0.0;
  double max_abs = 0.0;
  double imag_residue = 0.0;
};

Diagnostics diagnose(const SpectralField& u, double alpha);

struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;
  std::vector<Diagnostics> diagnostics;
  /// max dt * max|xi| * max|u| over the run; <= 0.5 is the advisory bound.
  double advisory_cfl = 0.0;
};

/// Integrates u_t + D^alpha u_x + (u^2/2)_x = 0 from u(0) = phi. The
/// linear part is propagated exactly by e^{i t omega(xi)}.
Trajectory solve_ivp(const SpectralField& phi, const SolverConfig& cfg);

/// Final state only (no snapshot storage).
SpectralField evolve(const SpectralField& phi, const SolverConfig& cfg);

struct ConservationReport {
  std::vector<double> times;
  std::vector<double> l2;
  std::vector<double> mean;
  std::vector<double> hamiltonian;
  double l2_drift = 0.0;
  double mean_drift = 0.0;
  double hamiltonian_drift = 0.0;
};

/// Relative drifts: max_t |q(t) - q(0)| / scale with scale ||u_0||_{L2}
/// for the L2 norm, sqrt(L) ||u_0||_{L2} for the mean, and the sum of the
/// magnitudes of the two Hamiltonian parts at t = 0 for H. All drifts are
/// zero for the zero solution.
ConservationReport conservation_report(const Trajectory& traj);

/// For each datum: sup_{t <= t_end} ||u(t)||_{H^2} / ||phi||_{H^2}.
EstimateReport h2_bound_experiment(const std::vector<SpectralField>& data, const SolverConfig& cfg,
                                   double eps0);

/// sup_t ||u - u^N||_{L2} / ||phi - phi^N||_{L2}, phi^N the sharp
/// truncation to |xi| <= n_cut.
double difference_experiment(const SpectralField& phi, double n_cut, const SolverConfig& cfg);

struct ScalingResult {
  double mismatch = 0.0;        // max over matched snapshots, relative
  double l2_ratio = 0.0;        // ||phi_lambda|| / ||phi||
  double l2_ratio_expected = 0.0;  // lambda^{alpha - 1/2}
};

/// Compares the run from phi_lambda(x) = lambda^alpha phi(lambda x) on the
/// torus of length L / lambda with the rescaled run from phi.
ScalingResult scaling_check(const SpectralField& phi, double lambda, const SolverConfig& cfg);

/// Rescales a datum on length L into the datum on length L / lambda.
SpectralField rescale_datum(const SpectralField& phi, double lambda, double alpha);

/// Odd smooth datum x e^{-x^2/8} scaled to the given L2 norm; its low
/// band has zero mean, so it is admissible for the gauge.
SpectralField smooth_datum(const SpatialGrid& grid, double l2_norm);

struct PacketSpec {
  double amplitude = 0.225;
  double width = 2.0;
  double carrier = 100.0;
};

SpectralField wave_packet(const SpatialGrid& grid, const PacketSpec& spec);

/// Rows (c, input distance, output distance, ratio): the runs from
/// u_0 = packet and u_c = c + packet are compared in L2.
Table nonuniform_continuity_demo(const std::vector<double>& c_values, const PacketSpec& packet,
                                 const SolverConfig& cfg);

}  // namespace dgbo
