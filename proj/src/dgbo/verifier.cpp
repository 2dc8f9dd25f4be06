// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#include "dgbo/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "dgbo/errors.hpp"

namespace dgbo {
namespace {

std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// Runs fn(0..n-1) on up to `jobs` threads; rethrows the exception of the
// lowest failing index so the outcome does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Fits y against x when there are three points and x takes at least two
// distinct values; two points carry no error estimate.
void add_fit(EstimateReport& rep, const std::vector<double>& x, const std::vector<double>& y,
             const std::string& name) {
  if (x.size() < 3) return;
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) return;
  rep.regressions.push_back(linear_fit(x, y, name));
}

// Statistics over the finite ratios; non-finite ratios and ratios above the
// ceiling become violations.
void finish(EstimateReport& rep, const std::vector<double>& ratios, double ceiling) {
  std::vector<double> finite;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double r = ratios[i];
    if (!std::isfinite(r)) {
      rep.violations.push_back("row " + std::to_string(i) + ": non-finite ratio");
    } else {
      if (r > ceiling) {
        std::ostringstream msg;
        msg << "row " << i << ": ratio " << r << " above ceiling " << ceiling;
        rep.violations.push_back(msg.str());
      }
      finite.push_back(r);
    }
  }
  rep.samples = ratios.size();
  rep.ratios = ratio_stats(finite);
}

// Log-ratio regressions must show no growth.
void check_growth(EstimateReport& rep) {
  for (const auto& r : rep.regressions) {
    if (r.has_prediction) continue;
    if (!r.no_growth()) {
      std::ostringstream msg;
      msg << "log-ratio grows with " << r.parameter << ": slope " << r.slope << " > 0.05 + 2*" << r.stderr_slope;
      rep.violations.push_back(msg.str());
    }
  }
}

double log2p(double n) { return std::log2(1.0 + std::abs(n)); }

std::string sweep_note(std::uint64_t seed, const Lattice& lat) {
  std::ostringstream s;
  s << "seed " << seed << ", lattice dxi " << lat.dxi << " dmu " << lat.dmu;
  return s.str();
}

}  // namespace

EstimateReport resonance_bound_check(double alpha, std::size_t samples, std::uint64_t seed) {
  require(alpha > 1.0 && alpha < 2.0, ErrorKind::Config, "alpha must lie in (1, 2)");
  require(samples > 0, ErrorKind::Config, "need at least one sample");
  EstimateReport rep;
  rep.id = "om20";
  auto rng = instance_rng(seed, 0);
  std::uniform_real_distribution<double> expo(-20.0, 20.0), gap(1.0, 40.0);
  std::bernoulli_distribution coin;
  const double lo = 1.0 / 16.0, hi = 16.0;
  std::vector<double> ratios;
  ratios.reserve(samples);
  std::size_t bad = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    double xi1 = std::exp2(expo(rng)) * (coin(rng) ? 1.0 : -1.0);
    double xi2;
    if (s % 2 == 0) {
      xi2 = std::exp2(expo(rng)) * (coin(rng) ? 1.0 : -1.0);
    } else {
      xi2 = -xi1 * (1.0 - std::exp2(-gap(rng)));
    }
    if (std::min({std::abs(xi1), std::abs(xi2), std::abs(xi1 + xi2)}) == 0.0) {
      ++rep.skipped;
      continue;
    }
    const double r = resonance_ratio(xi1, xi2, alpha);
    ratios.push_back(r);
    if (!(r >= lo && r <= hi)) {
      if (bad < 10) {
        std::ostringstream msg;
        msg << "ratio " << r << " at xi1=" << xi1 << ", xi2=" << xi2;
        rep.violations.push_back(msg.str());
      }
      ++bad;
    }
  }
  if (bad > 10) rep.violations.push_back(std::to_string(bad - 10) + " further violations");
  rep.samples = ratios.size();
  rep.ratios = ratio_stats(ratios);
  rep.table.columns = {"alpha", "samples", "min", "median", "max"};
  rep.table.add({alpha, static_cast<double>(rep.samples), rep.ratios.min, rep.ratios.median, rep.ratios.max});
  rep.notes.push_back("band [2^-4, 2^4], seed " + std::to_string(seed));
  return rep;
}

DualityReport trilinear_duality_check(const BlockSystem& bs, std::size_t triples, const Lattice& lat,
                                      std::uint64_t seed) {
  DualityReport rep;
  const double alpha = bs.alpha();
  std::uint64_t draw = 0;
  while (rep.triples < triples) {
    auto rng = instance_rng(seed, draw++);
    std::uniform_int_distribution<int> kd(-2, 3), jd(0, 2);
    const int k1 = kd(rng), k2 = kd(rng), j1 = jd(rng), j2 = jd(rng);
    const auto f1 = random_atom(bs, lat, AtomSupport::V, k1, j1, rng);
    const auto f2 = random_atom(bs, lat, AtomSupport::V, k2, j2, rng);
    const auto conv = convolve(f1.field, f2.field, alpha);
    // Targets hit by the convolution, in a random order.
    std::vector<std::pair<int, int>> targets;
    for (int k3 = -2; k3 <= 3; ++k3) {
      for (int j3 = 0; j3 <= 7; ++j3) targets.push_back({k3, j3});
    }
    std::shuffle(targets.begin(), targets.end(), rng);
    Atom F;
    for (auto [k3, j3] : targets) {
      F = restrict_to_v(bs, conv, k3, j3);
      if (F.l2 > 0.0) break;
    }
    if (!(F.l2 > 0.0)) {
      ++rep.redrawn;
      continue;
    }
    // h = conj(F) / ||F|| attains the supremum in the duality formula.
    auto h = F.field;
    for (auto& c : h.columns) {
      for (auto& v : c.values) v = std::conj(v) / F.l2;
    }
    const cplx J = j_functional(f1.field, f2.field, h, alpha);
    rep.duality_error = std::max(rep.duality_error, std::abs(std::abs(J) - F.l2) / F.l2);
    const double a = std::abs(J);
    const double swap = std::abs(j_functional(f2.field, f1.field, h, alpha));
    const double refl = std::abs(j_functional(reflect(f1.field), h, f2.field, alpha));
    rep.swap_error = std::max(rep.swap_error, std::abs(a - swap) / a);
    rep.reflect_error = std::max(rep.reflect_error, std::abs(a - refl) / a);
    ++rep.triples;
  }
  return rep;
}

const char* to_string(TrilinearPart p) {
  switch (p) {
    case TrilinearPart::A: return "om31";
    case TrilinearPart::B: return "om32";
    case TrilinearPart::C: return "om3";
  }
  return "?";
}

EstimateReport check_trilinear(TrilinearPart part, const BlockSystem& bs, const TrilinearSweep& sweep) {
  require(!sweep.k_triples.empty() && !sweep.j_values.empty(), ErrorKind::Config, "empty trilinear sweep");
  EstimateReport rep;
  rep.id = to_string(part);
  const double alpha = bs.alpha();
  struct Row {
    bool used = false;
    std::string skip;
    std::vector<double> values;
  };
  std::vector<Row> rows(sweep.instances);
  parallel_for(sweep.instances, sweep.jobs, [&](std::size_t idx) {
    auto rng = instance_rng(sweep.seed, idx);
    std::uniform_int_distribution<std::size_t> kd(0, sweep.k_triples.size() - 1), jd(0, sweep.j_values.size() - 1);
    const auto k = sweep.k_triples[kd(rng)];
    std::array<int, 3> j{sweep.j_values[jd(rng)], sweep.j_values[jd(rng)], 0};
    std::array<Atom, 3> f;
    for (int i = 0; i < 2; ++i) f[i] = random_atom(bs, sweep.lattice, AtomSupport::UJ, k[i], j[i], rng);
    Row& row = rows[idx];
    // h is the normalized conjugate of f1 * f2 on its dominant shell of
    // U_k3 x J_j3: by duality the largest |J| over unit h for this f1, f2.
    const auto conv = convolve(f[0].field, f[1].field, alpha);
    for (int j3 = 0; j3 <= sweep.j3_max; ++j3) {
      auto r = restrict_to_v(bs, conv, k[2], j3);
      if (r.l2 > f[2].l2) f[2] = std::move(r);
    }
    if (!(f[2].l2 > 0.0)) {
      row.skip = "f1 * f2 misses U_k3 x J_j3 for every j3";
      return;
    }
    j[2] = f[2].j;
    for (auto& c : f[2].field.columns) {
      for (auto& v : c.values) v = std::conj(v) / f[2].l2;
    }
    f[2].l2 = 1.0;
    const double lhs = std::abs(j_functional(f[0].field, f[1].field, f[2].field, alpha));
    if (lhs == 0.0) {
      row.skip = "J vanishes identically";
      return;
    }
    const double prod = f[0].l2 * f[1].l2 * f[2].l2;
    const int jmin = std::min({j[0], j[1], j[2]}), jmax = std::max({j[0], j[1], j[2]});
    const int jmed = j[0] + j[1] + j[2] - jmin - jmax;
    double umin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) umin = std::min(umin, u_cell(bs, k[i]).measure());
    double rhs = 0.0;
    switch (part) {
      case TrilinearPart::A:
        rhs = std::sqrt(umin) * std::exp2(0.5 * jmin) * prod;
        break;
      case TrilinearPart::B: {
        const int perms[3][3] = {{0, 1, 2}, {0, 2, 1}, {1, 2, 0}};
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : perms) {
          const double d = d_alpha(bs, k[p[0]], k[p[1]], k[p[2]]);
          if (!(d > 0.0) || !std::isfinite(d)) continue;
          best = std::min(best, std::exp2(0.5 * (j[0] + j[1] + j[2])) / std::sqrt(std::exp2(j[p[2]]) * d));
        }
        if (!std::isfinite(best)) {
          row.skip = "d_alpha vanishes in every permutation";
          return;
        }
        rhs = best * prod;
        break;
      }
      case TrilinearPart::C:
        rhs = std::exp2(0.5 * jmin + 0.25 * jmed) * prod;
        break;
    }
    row.used = true;
    row.values = {static_cast<double>(idx), double(k[0]), double(k[1]), double(k[2]), double(j[0]), double(j[1]),
                  double(j[2]), std::log2(umin), lhs, rhs, lhs / rhs};
  });
  rep.table.columns = {"instance", "k1", "k2", "k3", "j1", "j2", "j3", "log2_min_U", "lhs", "rhs", "ratio"};
  std::vector<double> ratios, lr, x_j1, x_j2, x_j3, x_u;
  std::map<std::string, std::size_t> skips;
  for (auto& r : rows) {
    if (!r.used) {
      ++rep.skipped;
      ++skips[r.skip];
      continue;
    }
    rep.table.add(r.values);
    ratios.push_back(r.values[10]);
    lr.push_back(std::log2(r.values[10]));
    x_j1.push_back(r.values[4]);
    x_j2.push_back(r.values[5]);
    x_j3.push_back(r.values[6]);
    x_u.push_back(r.values[7]);
  }
  for (const auto& [why, n] : skips) rep.notes.push_back(std::to_string(n) + " instances skipped: " + why);
  finish(rep, ratios, sweep.ceiling);
  add_fit(rep, x_j1, lr, "j1");
  add_fit(rep, x_j2, lr, "j2");
  add_fit(rep, x_j3, lr, "j3");
  add_fit(rep, x_u, lr, "log2_min_U");
  check_growth(rep);
  if (part == TrilinearPart::A && !sweep.saturation_j.empty()) {
    const auto& k0 = sweep.k_triples.back();
    auto sat = trilinear_saturation(bs, {k0[0], k0[1], k0[2]}, sweep.saturation_j, sweep.saturation_j_big,
                                    sweep.lattice);
    if (std::abs(sat.slope - sat.predicted_slope) > 0.1) {
      std::ostringstream msg;
      msg << "saturation slope " << sat.slope << " differs from 1/2 by more than 0.1";
      rep.violations.push_back(msg.str());
    }
    rep.regressions.push_back(sat);
  }
  rep.notes.push_back(sweep_note(sweep.seed, sweep.lattice));
  return rep;
}

Regression trilinear_saturation(const BlockSystem& bs, const std::array<int, 3>& k, const std::vector<int>& j_values,
                                int j_big, const Lattice& lat) {
  require(j_values.size() >= 2, ErrorKind::Config, "saturation needs at least two j values");
  const int jtop = *std::max_element(j_values.begin(), j_values.end());
  require(j_big > jtop + 1, ErrorKind::Config, "saturation needs j_big above every swept j");
  const double alpha = bs.alpha();
  // Largest |Omega| over the columns involved.
  const auto c1 = support_columns(bs, lat, AtomSupport::UJ, k[0]);
  const auto c2 = support_columns(bs, lat, AtomSupport::UJ, k[1]);
  double om = 0.0;
  for (long a : c1) {
    for (long b : c2) om = std::max(om, std::abs(resonance(a * lat.dxi, b * lat.dxi, alpha)));
  }
  const auto big = WindowSystem::J(j_big);
  const double margin = std::exp2(jtop + 1) + om + 2.0 * lat.dmu;
  require(big.lo + margin < big.hi - margin, ErrorKind::Config, "j_big too small for the resonance range");
  auto one = [](double, double) { return cplx(1.0); };
  const auto f2 = make_atom(bs, lat, AtomSupport::UJ, k[1], j_big, [&](double, double mu) {
    return cplx(mu >= big.lo + margin && mu <= big.hi - margin ? 1.0 : 0.0);
  });
  const auto f3 = make_atom(bs, lat, AtomSupport::UJ, k[2], j_big, one);
  std::vector<double> x, y;
  for (int j : j_values) {
    const auto f1 = make_atom(bs, lat, AtomSupport::UJ, k[0], j, one);
    const double J = std::abs(j_functional(f1.field, f2.field, f3.field, alpha));
    require(J > 0.0, ErrorKind::Degenerate, "saturation geometry gives J = 0");
    x.push_back(j);
    y.push_back(std::log2(J / (f1.l2 * f2.l2 * f3.l2)));
  }
  auto r = linear_fit(x, y, "saturation_min_j");
  r.predicted_slope = 0.5;
  r.has_prediction = true;
  return r;
}

const char* to_string(BilinearLemma l) {
  switch (l) {
    case BilinearLemma::L61a: return "hj1";
    case BilinearLemma::L61b: return "hj1.2";
    case BilinearLemma::L62: return "hw1";
    case BilinearLemma::L63: return "hb1";
  }
  return "?";
}

BilinearLemma bilinear_lemma_from_string(const std::string& s) {
  if (s == "6.1a" || s == "hj1") return BilinearLemma::L61a;
  if (s == "6.1b" || s == "hj1.2") return BilinearLemma::L61b;
  if (s == "6.2" || s == "hw1") return BilinearLemma::L62;
  if (s == "6.3" || s == "hb1") return BilinearLemma::L63;
  fail(ErrorKind::Config, "unknown bilinear lemma '" + s + "' (expected 6.1a, 6.1b, 6.2 or 6.3)");
}

void validate_bilinear(BilinearLemma lemma, const BlockSystem& bs, const BilinearInstance& in,
                       const BilinearRegime& regime) {
  auto n = [&](int k) { return std::abs(bs.n(k)); };
  auto reject = [&](const std::string& why) {
    std::ostringstream msg;
    msg << to_string(lemma) << " instance (k1=" << in.k1 << ", k2=" << in.k2 << ", k=" << in.k << "): " << why;
    fail(ErrorKind::Regime, msg.str());
  };
  for (int k : {in.k1, in.k2, in.k}) {
    if (std::abs(k) > bs.K()) reject("block index " + std::to_string(k) + " outside the block system");
    if (bs.interval_I(std::abs(k)).hi > bs.covered_limit())
      reject("block " + std::to_string(k) + " extends beyond the covered range");
  }
  switch (lemma) {
    case BilinearLemma::L61a:
      if (in.k == 0 || in.k1 == 0 || in.k2 == 0) reject("needs k, k1, k2 != 0");
      if (n(in.k) < regime.n_threshold) reject("needs |n_k| >= n_threshold");
      if (n(in.k1) > n(in.k) / regime.separation) reject("needs |n_k1| <= |n_k| / separation");
      break;
    case BilinearLemma::L61b:
      if (in.k == 0 || in.k2 == 0) reject("needs k, k2 != 0");
      if (in.k1 != 0) reject("the f_0 slot needs k1 = 0");
      if (in.k_prime > 2) reject("needs k' <= 2");
      if (n(in.k) < regime.n_threshold) reject("needs |n_k| >= n_threshold");
      break;
    case BilinearLemma::L62:
      if (in.k == 0 || in.k1 == 0 || in.k2 == 0) reject("needs k, k1, k2 != 0");
      if (std::min(n(in.k1), n(in.k2)) < regime.separation * (1.0 + n(in.k)))
        reject("needs min(|n_k1|, |n_k2|) >= separation (1 + |n_k|)");
      break;
    case BilinearLemma::L63:
      if (in.k == 0) reject("needs k != 0");
      for (int k : {in.k1, in.k2}) {
        const double r = (1.0 + n(k)) / (1.0 + n(in.k));
        if (r < 1.0 / regime.comparable || r > regime.comparable)
          reject("needs (1 + |n_ki|) / (1 + |n_k|) within the comparable band");
      }
      break;
  }
}

std::vector<BilinearInstance> default_bilinear_instances(BilinearLemma lemma, const BlockSystem& bs,
                                                         const BilinearRegime& regime) {
  const int K = bs.K();
  std::vector<BilinearInstance> cand;
  switch (lemma) {
    case BilinearLemma::L61a:
      for (int k = K / 2; k <= K; ++k) {
        for (int k1 = 1; k1 <= 5; ++k1) cand.push_back({k1, bs.dominant_block(bs.n(k) - bs.n(k1)), k, 0});
      }
      break;
    case BilinearLemma::L61b:
      for (int k = K / 2; k <= K; ++k) {
        for (int kp = -2; kp <= 1; ++kp) cand.push_back({0, k, k, kp});
      }
      break;
    case BilinearLemma::L62:
      for (int m = K / 2; m < K; ++m) cand.push_back({m + 1, -m, bs.dominant_block(bs.n(m + 1) - bs.n(m)), 0});
      break;
    case BilinearLemma::L63:
      for (int k = K / 2; k <= K; ++k) {
        const int h = bs.dominant_block(0.5 * bs.n(k));
        cand.push_back({h, h, k, 0});
        if (h > 1) cand.push_back({h + 1, h - 1, k, 0});
        if (bs.covers(2.0 * bs.n(k)) && 2.0 * bs.n(k) <= bs.n(K)) cand.push_back({bs.dominant_block(2.0 * bs.n(k)), -k, k, 0});
      }
      break;
  }
  std::vector<BilinearInstance> out;
  for (const auto& in : cand) {
    try {
      validate_bilinear(lemma, bs, in, regime);
      out.push_back(in);
    } catch (const Error&) {
    }
  }
  return out;
}

double bilinear_lambda(const BlockSystem& bs, int k1, int k2, int k, double lambda_factor) {
  const double a1 = std::abs(bs.n(k1)), a2 = std::abs(bs.n(k2)), a = std::abs(bs.n(k));
  const double A = std::min({std::abs(a1 - a2), std::abs(a - a1), std::abs(a - a2)});
  return A <= lambda_factor * std::sqrt(1.0 + a) ? 1.0 : 1.0 / std::sqrt(A);
}

EstimateReport check_bilinear(BilinearLemma lemma, const WeightTable& wt, const BilinearSweep& sweep) {
  const auto& bs = wt.blocks();
  for (const auto& in : sweep.instances) validate_bilinear(lemma, bs, in, sweep.regime);
  require(sweep.samples >= 1 && !sweep.j_values.empty(), ErrorKind::Config, "empty bilinear sweep");
  EstimateReport rep;
  rep.id = to_string(lemma);
  const double alpha = bs.alpha(), delta = wt.delta();
  const std::size_t total = sweep.instances.size() * static_cast<std::size_t>(sweep.samples);
  std::vector<std::vector<double>> rows(total);
  parallel_for(total, sweep.jobs, [&](std::size_t idx) {
    const auto& in = sweep.instances[idx / static_cast<std::size_t>(sweep.samples)];
    auto rng = instance_rng(sweep.seed, idx);
    std::uniform_int_distribution<std::size_t> jd(0, sweep.j_values.size() - 1);
    const int j1 = sweep.j_values[jd(rng)], j2 = sweep.j_values[jd(rng)];
    const bool low = lemma == BilinearLemma::L61b;
    const auto f1 = low ? random_atom(bs, sweep.lattice, AtomSupport::D0, 0, j1, rng, in.k_prime)
                        : random_atom(bs, sweep.lattice, AtomSupport::D, in.k1, j1, rng);
    const auto f2 = random_atom(bs, sweep.lattice, AtomSupport::D, in.k2, j2, rng);
    const auto conv = convolve(f1.field, f2.field, alpha);
    const auto g = weighted(conv, [&](double xi, double mu) { return bs.chi(in.k, xi) / cplx(mu, 1.0); });
    const double zk = lattice_z_norm(g, in.k, wt);
    const double nk = 1.0 + std::abs(bs.n(in.k));
    const double z2 = lattice_z_norm(f2.field, in.k2, wt);
    double lhs = 0.0, rhs = 0.0;
    switch (lemma) {
      case BilinearLemma::L61a:
        lhs = nk * zk;
        rhs = std::pow(1.0 + std::abs(bs.n(in.k1)), -0.5) * std::pow(nk, -delta) * lattice_z_norm(f1.field, in.k1, wt) * z2;
        break;
      case BilinearLemma::L61b:
        lhs = std::pow(nk, 0.5 - sweep.rho + delta) * zk;
        rhs = std::pow(nk, -delta) * lattice_x0_norm(f1.field, sweep.rho, wt) * z2;
        break;
      case BilinearLemma::L62:
        lhs = nk * zk;
        rhs = std::pow(nk, -0.5) * std::pow(1.0 + std::abs(bs.n(in.k1)) + std::abs(bs.n(in.k2)), -delta) *
              lattice_z_norm(f1.field, in.k1, wt) * z2;
        break;
      case BilinearLemma::L63: {
        const double z1 = in.k1 == 0 ? lattice_x0_norm(f1.field, -0.5 + delta, wt) : lattice_z_norm(f1.field, in.k1, wt);
        lhs = nk * zk;
        rhs = bilinear_lambda(bs, in.k1, in.k2, in.k, sweep.regime.lambda_factor) * std::pow(nk, -delta) * z1 * z2;
        break;
      }
    }
    if (lhs == 0.0) return;
    rows[idx] = {static_cast<double>(idx), double(in.k1), double(in.k2), double(in.k), double(in.k_prime),
                 double(j1), double(j2), lhs, rhs, lhs / rhs};
  });
  rep.table.columns = {"instance", "k1", "k2", "k", "k_prime", "j1", "j2", "lhs", "rhs", "ratio"};
  std::vector<double> ratios, lr, x1, x2, xk;
  for (const auto& r : rows) {
    if (r.empty()) {
      ++rep.skipped;
      continue;
    }
    rep.table.add(r);
    ratios.push_back(r[9]);
    lr.push_back(std::log2(r[9]));
    x1.push_back(lemma == BilinearLemma::L61b ? r[4] : log2p(bs.n(static_cast<int>(r[1]))));
    x2.push_back(log2p(bs.n(static_cast<int>(r[2]))));
    xk.push_back(log2p(bs.n(static_cast<int>(r[3]))));
  }
  if (rep.skipped > 0) rep.notes.push_back(std::to_string(rep.skipped) + " samples skipped: product misses chi_k");
  finish(rep, ratios, sweep.ceiling);
  add_fit(rep, x1, lr, lemma == BilinearLemma::L61b ? "k_prime" : "log2(1+|n_k1|)");
  add_fit(rep, x2, lr, "log2(1+|n_k2|)");
  add_fit(rep, xk, lr, "log2(1+|n_k|)");
  check_growth(rep);
  std::ostringstream regime;
  regime << "regime surrogates: n_threshold " << sweep.regime.n_threshold << ", separation " << sweep.regime.separation
         << ", comparable " << sweep.regime.comparable << ", lambda_factor " << sweep.regime.lambda_factor;
  rep.notes.push_back(regime.str());
  rep.notes.push_back(sweep_note(sweep.seed, sweep.lattice));
  return rep;
}

int max_factor_order(const SpaceTimeGrid& grid) {
  const double top = std::max({grid.spatial().frequency_spacing() * static_cast<double>(grid.spatial().size() / 2),
                               grid.tau_nyquist(), 2.0});
  return std::max(1, static_cast<int>(std::floor(12.0 / std::log10(top))));
}

SNorm s_norm(std::span<const cplx> m, const SpaceTimeGrid& grid, FactorSpace which, int order) {
  require(m.size() == grid.size(), ErrorKind::InputShape, "factor samples do not match the grid");
  require(order >= 0, ErrorKind::Config, "derivative order must be >= 0");
  SNorm out;
  const double limit = which == FactorSpace::SInf ? 10.0 : 4.0;
  const std::size_t M = grid.n_times(), N = grid.spatial().size();
  double peak = 0.0, outside = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t n = 0; n < M; ++n) {
      const double a = std::abs(m[i * M + n]);
      peak = std::max(peak, a);
      if (std::abs(grid.t(n)) > limit) outside = std::max(outside, a);
    }
  }
  if (peak == 0.0) return out;
  if (outside > 1e-12 * peak) {
    std::ostringstream msg;
    msg << "factor is not supported in |t| <= " << limit << " (relative size " << outside / peak << " outside)";
    fail(ErrorKind::Support, msg.str());
  }
  out.order = order;
  const int cap = max_factor_order(grid);
  if (order > cap) {
    out.order = cap;
    out.warnings.push_back("derivative order " + std::to_string(order) + " capped at " + std::to_string(cap) +
                           " for this grid");
  }
  const auto f = spacetime_to_spectral(m, grid);
  const double scale = grid.spatial().length() * grid.t_length();
  auto derived = [&](int s1, int s2) {
    SpaceTimeSpectral d = f;
    for (std::size_t i = 0; i < N; ++i) {
      const cplx px = std::pow(cplx(0.0, f.xi(i)), s2);
      for (std::size_t n = 0; n < M; ++n) {
        const bool nyq = (s2 % 2 == 1 && grid.spatial().is_nyquist(i)) || (s1 % 2 == 1 && n == M / 2);
        d.coeff(i, n) = nyq ? 0.0 : d.coeff(i, n) * px * std::pow(cplx(0.0, grid.tau(n)), s1);
      }
    }
    return d;
  };
  auto l2 = [&](const SpaceTimeSpectral& d) {
    double s = 0.0;
    for (const auto& c : d.coeffs()) s += std::norm(c);
    return std::sqrt(scale * s);
  };
  for (int s1 = 0; s1 <= out.order; ++s1) {
    for (int s2 = 0; s2 <= out.order; ++s2) {
      if (which == FactorSpace::SInf && s2 == 0) {
        double sup = 0.0;
        for (const auto& v : spacetime_samples(derived(s1, 0))) sup = std::max(sup, std::abs(v));
        out.value += sup;
      } else {
        out.value += l2(derived(s1, s2));
      }
    }
  }
  return out;
}

double multiplication_lhs(const WeightTable& wt, const SpaceTimeSpectral& f, std::span<const cplx> m, int k2,
                          int epsilon) {
  require(epsilon == 0 || epsilon == -1, ErrorKind::Config, "epsilon must be 0 or -1");
  auto g = project(wt.blocks(), multiply_by_factor(f, m), k2);
  if (epsilon == -1) g = apply_modulation_weight(g, [](double lam) { return 1.0 / cplx(lam, 1.0); });
  return z_norm(g, k2, wt);
}

EstimateReport check_multiplication(const WeightTable& wt, const SpaceTimeGrid& grid, std::span<const cplx> m,
                                    const MultiplicationSweep& sweep) {
  require(sweep.epsilon == 0 || sweep.epsilon == -1, ErrorKind::Config, "epsilon must be 0 or -1");
  require(sweep.max_shift >= 1, ErrorKind::Config, "max_shift must be >= 1");
  const auto& bs = wt.blocks();
  const double alpha = bs.alpha();
  EstimateReport rep;
  rep.id = sweep.space == FactorSpace::SInf ? "ar4" : "ar4.1";
  const auto sn = s_norm(m, grid, sweep.space, sweep.s_order);
  for (const auto& w : sn.warnings) rep.notes.push_back(w);
  require(sn.value > 0.0, ErrorKind::Degenerate, "factor m vanishes");
  rep.table.columns = {"k1", "k2", "j", "lhs", "rhs", "ratio"};
  std::vector<double> ratios;
  std::uint64_t idx = 0;
  for (int k1 : sweep.k1_values) {
    require(k1 != 0 && std::abs(k1) <= bs.K(), ErrorKind::Range, "k1 must be a nonzero block index");
    const Interval I = bs.interval_I(k1);
    for (int j : sweep.j_values) {
      if (std::ldexp(1.0, j) * std::exp2(sweep.high_gap) < std::pow(std::abs(bs.n(k1)), alpha)) {
        rep.notes.push_back("j=" + std::to_string(j) + " outside M^high for k1=" + std::to_string(k1));
        continue;
      }
      auto rng = instance_rng(sweep.seed, idx++);
      std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
      auto f = SpaceTimeSpectral::zeros(grid, TimeFrame::Modulation, alpha);
      bool any = false;
      for (std::size_t i = 0; i < grid.spatial().size(); ++i) {
        if (!I.contains(f.xi(i))) continue;
        for (std::size_t n = 0; n < grid.n_times(); ++n) {
          if (!in_modulation_shell(j, f.modulation(i, n))) continue;
          f.coeff(i, n) = cplx(nd(rng), nd(rng));
          any = true;
        }
      }
      if (!any) {
        ++rep.skipped;
        continue;
      }
      auto fe = f;
      if (sweep.epsilon == -1) fe = apply_modulation_weight(f, [](double lam) { return 1.0 / cplx(lam, 1.0); });
      const double rhs = std::log(2.0 + std::abs(bs.n(k1))) * sn.value * z_norm(fe, k1, wt);
      const auto prod = multiply_by_factor(f, m);
      for (int k2 = k1 - sweep.max_shift; k2 <= k1 + sweep.max_shift; ++k2) {
        if (k2 == 0 || std::abs(k2) > bs.K()) continue;
        auto g = project(bs, prod, k2);
        if (sweep.epsilon == -1) g = apply_modulation_weight(g, [](double lam) { return 1.0 / cplx(lam, 1.0); });
        const double lhs = z_norm(g, k2, wt);
        rep.table.add({double(k1), double(k2), double(j), lhs, rhs, lhs / rhs});
        ratios.push_back(lhs / rhs);
      }
    }
  }
  finish(rep, ratios, std::numeric_limits<double>::infinity());
  // Decay in |k1 - k2|: fit over rows above the floor.
  std::vector<double> x, y;
  std::map<int, double> max_by_shift;
  for (const auto& r : rep.table.rows) {
    const int shift = std::abs(static_cast<int>(r[0]) - static_cast<int>(r[1]));
    max_by_shift[shift] = std::max(max_by_shift[shift], r[5]);
    if (r[3] > sweep.floor * r[4]) {
      x.push_back(std::log(1.0 + shift));
      y.push_back(std::log(r[5]));
    }
  }
  add_fit(rep, x, y, "log(1+|k1-k2|)");
  if (!rep.regressions.empty()) {
    auto& fit = rep.regressions.back();
    fit.predicted_slope = -2.0;
    fit.has_prediction = true;
    if (fit.slope > -2.0) {
      std::ostringstream msg;
      msg << "decay slope " << fit.slope << " in |k1-k2| is above -2";
      rep.violations.push_back(msg.str());
    }
  }
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& [shift, mx] : max_by_shift) {
    if (mx > prev * (1.0 + 1e-9) && mx > sweep.floor) {
      rep.notes.push_back("max ratio not monotone at |k1-k2|=" + std::to_string(shift));
    }
    prev = mx;
  }
  rep.notes.push_back("S-norm order " + std::to_string(sn.order) + ", seed " + std::to_string(sweep.seed));
  return rep;
}

namespace {

// Product on a doubled grid, truncated back to the modes of `a`.
SpectralField exact_product(const SpectralField& a, const SpectralField& b) {
  const auto& g = a.grid();
  require(g == b.grid(), ErrorKind::InputShape, "factors live on different grids");
  const SpatialGrid big(2 * g.size(), g.length());
  auto pad = [&](const SpectralField& f) {
    auto out = SpectralField::zeros(big, f.real_valued());
    for (std::size_t i = 0; i < g.size(); ++i) out.coeff(big.index_of_mode(g.mode(i))) = f.coeff(i);
    return out;
  };
  const auto p = multiply(pad(a), pad(b));
  auto out = SpectralField::zeros(g, a.real_valued() && b.real_valued());
  for (std::size_t i = 0; i < g.size(); ++i) out.coeff(i) = p.coeff(big.index_of_mode(g.mode(i)));
  return out;
}

}  // namespace

SpectralField triple_commutator(const SpectralField& m_prime, const SpectralField& w, double alpha) {
  require(alpha > 1.0 && alpha <= 2.0, ErrorKind::Config, "alpha must lie in (1, 2]");
  const auto t1 = dispersive_operator(exact_product(m_prime, w), alpha);
  const auto t2 = exact_product(m_prime, dispersive_operator(w, alpha));
  const auto t3 = exact_product(derivative(m_prime, 1), fractional_derivative(w, alpha));
  const auto lower = apply_symbol(
      w, [&](double xi) { return xi == 0.0 ? cplx(0.0) : cplx(0.0, xi) * std::pow(std::abs(xi), alpha - 2.0); },
      SymbolParity::Odd);
  const auto t4 = exact_product(derivative(m_prime, 2), lower);
  return t1 - t2 - cplx(alpha + 1.0) * t3 + cplx(0.5 * alpha * (alpha + 1.0)) * t4;
}

SpaceTimeSpectral commutator_field(const WeightTable& wt, int k, const CommutatorSpec& spec,
                                   std::span<const cplx> m, std::span<const cplx> m_prime,
                                   const SpaceTimeSpectral& w) {
  require(spec.sigma1 == 0 || spec.sigma1 == 1, ErrorKind::Regime, "R(D) needs sigma1 in {0, 1}");
  require(spec.sigma2 == 0.0 || (spec.sigma2 > 1.0 && spec.sigma2 < 2.0), ErrorKind::Regime,
          "R(D) needs sigma2 = 0 or 1 < sigma2 < 2");
  require(m.size() == w.grid().size() && m_prime.size() == w.grid().size(), ErrorKind::InputShape,
          "factor samples do not match the grid");
  const auto& bs = wt.blocks();
  auto R = [&](double xi) {
    const cplx d = spec.sigma1 == 1 ? cplx(0.0, xi) : cplx(1.0);
    return spec.sigma2 == 0.0 ? d : d * std::pow(std::abs(xi), spec.sigma2);
  };
  std::vector<cplx> mm(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) mm[i] = m[i] * m_prime[i];
  const auto a = multiply_by_factor(project(bs, apply_xi_symbol(multiply_by_factor(w, m_prime), R), k), m);
  const auto b = project(bs, apply_xi_symbol(multiply_by_factor(w, mm), R), k);
  return a - b;
}

double block_norm(const SpaceTimeSpectral& u, int k, const WeightTable& wt, bool dual) {
  auto g = project(wt.blocks(), u, k);
  if (dual) g = apply_modulation_weight(g, [](double lam) { return 1.0 / cplx(lam, 1.0); });
  return k != 0 ? z_norm(g, k, wt) : x0_norm(g, 0.0, wt, X0Variant::Modulation);
}

EstimateReport check_commutator(const WeightTable& wt, const CommutatorSpec& spec, const std::vector<int>& ks,
                                int mu_max, std::span<const cplx> m, std::span<const cplx> m_prime,
                                const SpaceTimeSpectral& w) {
  require(mu_max >= 0, ErrorKind::Config, "mu_max must be >= 0");
  require(spec.sigma >= 0.0 && spec.sigma <= 2.0, ErrorKind::Config, "sigma must lie in [0, 2]");
  const auto& bs = wt.blocks();
  const int K = bs.K();
  EstimateReport rep;
  rep.id = "comm-a/comm-b";
  // ||P_{k'} w|| for every block, F and N type.
  std::vector<double> wf(static_cast<std::size_t>(2 * K + 1)), wn(wf.size());
  for (int k = -K; k <= K; ++k) {
    wf[static_cast<std::size_t>(k + K)] = block_norm(w, k, wt, false);
    wn[static_cast<std::size_t>(k + K)] = block_norm(w, k, wt, true);
  }
  const double p = spec.decay_power;
  const double e = 2.0 * spec.sigma + 2.0 * spec.sigma1 + 2.0 * spec.sigma2 - 1.0;
  rep.table.columns = {"k", "mu", "lhs_f", "rhs_f", "ratio_f", "lhs_n", "rhs_n", "ratio_n"};
  std::vector<double> ratios;
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> trend;  // per mu
  for (int k : ks) {
    require(std::abs(k) <= K, ErrorKind::Range, "block index " + std::to_string(k) + " outside range");
    double rhs_f = 0.0, rhs_n = 0.0;
    for (int kn = -K; kn <= K; ++kn) {
      const double nn = std::abs(bs.n(kn));
      const double weight = std::pow(1.0 + std::abs(kn - k), -p) * std::pow(1.0 + nn, e) *
                            std::pow(std::log(2.0 + nn), 2.0);
      rhs_f += weight * std::pow(wf[static_cast<std::size_t>(kn + K)], 2.0);
      rhs_n += weight * std::pow(wn[static_cast<std::size_t>(kn + K)], 2.0);
    }
    const auto C = commutator_field(wt, k, spec, m, m_prime, w);
    for (int mu = -mu_max; mu <= mu_max; ++mu) {
      const int km = k + mu;
      if (std::abs(km) > K) continue;
      const double pre = std::pow(1.0 + std::abs(mu), p) * std::pow(1.0 + std::abs(bs.n(km)), 2.0 * spec.sigma);
      const double lf = pre * std::pow(block_norm(C, km, wt, false), 2.0);
      const double ln = pre * std::pow(block_norm(C, km, wt, true), 2.0);
      const double rf = rhs_f > 0.0 ? lf / rhs_f : (lf == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      const double rn = rhs_n > 0.0 ? ln / rhs_n : (ln == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      rep.table.add({double(k), double(mu), lf, rhs_f, rf, ln, rhs_n, rn});
      ratios.push_back(rf);
      ratios.push_back(rn);
      // Rows at roundoff level carry no trend.
      if (rf > 1e-12) {
        trend[mu].first.push_back(log2p(bs.n(k)));
        trend[mu].second.push_back(std::log2(rf));
      }
    }
  }
  finish(rep, ratios, std::numeric_limits<double>::infinity());
  for (const auto& [mu, xy] : trend) add_fit(rep, xy.first, xy.second, "log2(1+|n_k|) at mu=" + std::to_string(mu));
  check_growth(rep);
  return rep;
}

}  // namespace dgbo
