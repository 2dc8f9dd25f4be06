// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#include "dgbo/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "dgbo/errors.hpp"

namespace dgbo {
namespace {

constexpr int kMaxShell = 62;

// Centred quadratic B-spline weights for the cells floor(x) - 1 .. floor(x) + 2.
struct Taps {
  long base = 0;
  double w[4] = {0.0, 0.0, 0.0, 0.0};
};

double bspline2(double x) {
  const double a = std::abs(x);
  if (a <= 0.5) return 0.75 - a * a;
  if (a < 1.5) return 0.5 * (1.5 - a) * (1.5 - a);
  return 0.0;
}

Taps taps_for(double shift) {
  Taps t;
  const double fl = std::floor(shift);
  const double r = shift - fl;
  t.base = static_cast<long>(fl) - 1;
  for (int s = 0; s < 4; ++s) t.w[s] = bspline2(static_cast<double>(s - 1) - r);
  return t;
}

std::pair<int, int> shell_range(double nu) {
  const double a = std::abs(nu);
  if (a < 1.25) return {0, 0};
  const int c = static_cast<int>(std::floor(std::log2(a)));
  return {std::max(0, c - 1), std::min(kMaxShell, c + 2)};
}

void require_same_lattice(const LatticeField& a, const LatticeField& b) {
  require(a.lattice == b.lattice, ErrorKind::Config, "lattice fields live on different lattices");
}

// Segments of f with the given xi index.
std::pair<std::vector<LatticeColumn>::const_iterator, std::vector<LatticeColumn>::const_iterator>
segments(const LatticeField& f, long xi_index) {
  return std::equal_range(f.columns.begin(), f.columns.end(), LatticeColumn{xi_index, 0, {}},
                          [](const LatticeColumn& a, const LatticeColumn& b) { return a.xi_index < b.xi_index; });
}

void sort_columns(std::vector<LatticeColumn>& cols) {
  std::sort(cols.begin(), cols.end(), [](const LatticeColumn& a, const LatticeColumn& b) {
    return a.xi_index != b.xi_index ? a.xi_index < b.xi_index : a.first < b.first;
  });
}

// Drops leading and trailing zeros; false if nothing is left.
bool trim(LatticeColumn& c) {
  std::size_t lo = 0, hi = c.values.size();
  while (lo < hi && c.values[lo] == 0.0) ++lo;
  while (hi > lo && c.values[hi - 1] == 0.0) --hi;
  if (lo == hi) return false;
  c.values = std::vector<cplx>(c.values.begin() + static_cast<std::ptrdiff_t>(lo),
                               c.values.begin() + static_cast<std::ptrdiff_t>(hi));
  c.first += static_cast<long>(lo);
  return true;
}

bool in_descriptor(const BlockSystem& bs, AtomSupport s, int k, int k_prime, double xi) {
  switch (s) {
    case AtomSupport::D:
      return bs.interval_I(k).contains(xi);
    case AtomSupport::D0:
      return xi != 0.0 && bs.interval_I(0).contains(xi) && WindowSystem::J_tilde(k_prime).contains(std::abs(xi));
    case AtomSupport::V:
    case AtomSupport::UJ:
      return u_cell(bs, k).contains(xi);
  }
  return false;
}

}  // namespace

double resonance(double xi1, double xi2, double alpha) {
  const double a = xi1, b = xi2, c = -(xi1 + xi2);
  if (a == 0.0 || b == 0.0 || c == 0.0) return 0.0;
  // Two of a, b, c share a sign; with p <= q their moduli,
  // Omega = sign * ((p + q)^{alpha+1} - p^{alpha+1} - q^{alpha+1}).
  double p, q, sign;
  if ((a > 0.0) == (b > 0.0)) {
    p = std::abs(a), q = std::abs(b), sign = a > 0.0 ? 1.0 : -1.0;
  } else if ((a > 0.0) == (c > 0.0)) {
    p = std::abs(a), q = std::abs(c), sign = a > 0.0 ? 1.0 : -1.0;
  } else {
    p = std::abs(b), q = std::abs(c), sign = b > 0.0 ? 1.0 : -1.0;
  }
  if (p > q) std::swap(p, q);
  const double r = p / q;
  const double e = alpha + 1.0;
  return sign * std::pow(q, e) * (std::expm1(e * std::log1p(r)) - std::pow(r, e));
}

double resonance_ratio(double xi1, double xi2, double alpha) {
  const double s = xi1 + xi2;
  const double p0 = std::min({std::abs(xi1), std::abs(xi2), std::abs(s)});
  if (p0 == 0.0) return 0.0;
  // With p <= q the same-sign pair, the min is p and the max p + q.
  const double big = std::max({std::abs(xi1), std::abs(xi2), std::abs(s)});
  const double q = big - p0;
  const double r = p0 / q;
  const double e = alpha + 1.0;
  return (std::expm1(e * std::log1p(r)) - std::pow(r, e)) / (r * std::pow(1.0 + r, alpha));
}

double LatticeField::l2_norm() const {
  double s = 0.0;
  for (const auto& c : columns) {
    for (const auto& v : c.values) s += std::norm(v);
  }
  return std::sqrt(lattice.cell_measure() * s);
}

const LatticeColumn* LatticeField::column(long xi_index) const {
  const auto [lo, hi] = segments(*this, xi_index);
  return lo == hi ? nullptr : &*lo;
}

const char* to_string(AtomSupport s) {
  switch (s) {
    case AtomSupport::D: return "D";
    case AtomSupport::D0: return "D0";
    case AtomSupport::V: return "V";
    case AtomSupport::UJ: return "UxJ";
  }
  return "?";
}

std::vector<long> support_columns(const BlockSystem& bs, const Lattice& lat, AtomSupport s, int k,
                                  int k_prime) {
  require(lat.dxi > 0.0 && lat.dmu > 0.0, ErrorKind::Config, "lattice spacings must be positive");
  require(s != AtomSupport::D || k != 0, ErrorKind::Range, "D_k^j needs k != 0; use D0 for k = 0");
  require(s != AtomSupport::D0 || k_prime <= 2, ErrorKind::Range, "D_{0,k'}^j needs k' <= 2");
  const double reach = std::max(std::abs(bs.n(bs.K() + 1)), 8.0);
  const long imax = static_cast<long>(std::ceil(reach / lat.dxi)) + 1;
  std::vector<long> out;
  for (long i = -imax; i <= imax; ++i) {
    const double xi = static_cast<double>(i) * lat.dxi;
    if (!in_descriptor(bs, s, k, k_prime, xi)) continue;
    if (!bs.covers(xi)) {
      std::ostringstream msg;
      msg << "atom column xi=" << xi << " lies beyond the covered range " << bs.covered_limit();
      fail(ErrorKind::Coverage, msg.str());
    }
    out.push_back(i);
  }
  return out;
}

bool in_modulation_shell(int j, double mu) {
  const auto iv = WindowSystem::J(j);
  const double a = std::abs(mu);
  return a >= iv.lo - 1e-12 && a <= iv.hi + 1e-12;
}

Atom make_atom(const BlockSystem& bs, const Lattice& lat, AtomSupport s, int k, int j,
               const std::function<cplx(double, double)>& value, int k_prime) {
  require(j >= 0, ErrorKind::Range, "modulation index j must be >= 0");
  Atom at;
  at.k = k;
  at.j = j;
  at.k_prime = k_prime;
  at.support = s;
  at.field.lattice = lat;
  const auto iv = WindowSystem::J(j);
  const long top = static_cast<long>(std::floor(iv.hi / lat.dmu + 1e-9));
  const long bottom = j == 0 ? -top : static_cast<long>(std::ceil(iv.lo / lat.dmu - 1e-9));
  // Two segments for j >= 1, one through mu = 0 for j = 0.
  std::vector<std::pair<long, long>> ranges;
  if (j == 0) {
    ranges.push_back({-top, top});
  } else {
    ranges.push_back({-top, -bottom});
    ranges.push_back({bottom, top});
  }
  for (long i : support_columns(bs, lat, s, k, k_prime)) {
    const double xi = static_cast<double>(i) * lat.dxi;
    for (auto [lo, hi] : ranges) {
      if (hi < lo) continue;
      LatticeColumn c{i, lo, std::vector<cplx>(static_cast<std::size_t>(hi - lo + 1))};
      for (long a = lo; a <= hi; ++a) c.values[static_cast<std::size_t>(a - lo)] = value(xi, static_cast<double>(a) * lat.dmu);
      if (trim(c)) at.field.columns.push_back(std::move(c));
    }
  }
  at.l2 = at.field.l2_norm();
  return at;
}

Atom random_atom(const BlockSystem& bs, const Lattice& lat, AtomSupport s, int k, int j,
                 std::mt19937_64& rng, int k_prime) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  return make_atom(bs, lat, s, k, j, [&](double, double) { return cplx(nd(rng), nd(rng)); }, k_prime);
}

void validate_atom(const BlockSystem& bs, const Atom& a) {
  const auto& lat = a.field.lattice;
  for (const auto& c : a.field.columns) {
    const double xi = static_cast<double>(c.xi_index) * lat.dxi;
    const bool col_ok = in_descriptor(bs, a.support, a.k, a.k_prime, xi);
    for (std::size_t n = 0; n < c.values.size(); ++n) {
      if (c.values[n] == 0.0) continue;
      const double mu = static_cast<double>(c.first + static_cast<long>(n)) * lat.dmu;
      if (!col_ok || !in_modulation_shell(a.j, mu)) {
        std::ostringstream msg;
        msg << "atom value at (xi=" << xi << ", mu=" << mu << ") lies off " << to_string(a.support) << "_"
            << a.k << "^" << a.j;
        fail(ErrorKind::Support, msg.str());
      }
    }
  }
  const double l2 = a.field.l2_norm();
  require(std::abs(l2 - a.l2) <= 1e-12 * std::max(1.0, l2), ErrorKind::Config,
          "cached atom norm disagrees with recomputation");
}

LatticeField reflect(const LatticeField& f) {
  LatticeField out;
  out.lattice = f.lattice;
  out.columns.reserve(f.columns.size());
  for (const auto& c : f.columns) {
    LatticeColumn r{-c.xi_index, -c.last(), std::vector<cplx>(c.values.rbegin(), c.values.rend())};
    out.columns.push_back(std::move(r));
  }
  sort_columns(out.columns);
  return out;
}

Atom reflect(const Atom& a) {
  Atom out = a;
  out.field = reflect(a.field);
  return out;
}

Atom scaled(const Atom& a, cplx s) {
  Atom out = a;
  for (auto& c : out.field.columns) {
    for (auto& v : c.values) v *= s;
  }
  out.l2 = out.field.l2_norm();
  return out;
}

cplx j_functional(const LatticeField& f, const LatticeField& g, const LatticeField& h, double alpha) {
  require_same_lattice(f, g);
  require_same_lattice(f, h);
  const auto& lat = f.lattice;
  cplx total = 0.0;
  std::vector<cplx> H;
  for (const auto& cf : f.columns) {
    const double xi1 = static_cast<double>(cf.xi_index) * lat.dxi;
    for (const auto& cg : g.columns) {
      const auto [hlo, hhi] = segments(h, cf.xi_index + cg.xi_index);
      if (hlo == hhi) continue;
      const double xi2 = static_cast<double>(cg.xi_index) * lat.dxi;
      const Taps t = taps_for(resonance(xi1, xi2, alpha) / lat.dmu);
      // H(m) = sum_c h_c B(c - m - Omega/dmu) for m = a + b.
      const long m0 = cf.first + cg.first, m1 = cf.last() + cg.last();
      H.assign(static_cast<std::size_t>(m1 - m0 + 1), 0.0);
      bool any = false;
      for (auto it = hlo; it != hhi; ++it) {
        const long c_lo = std::max(it->first, m0 + t.base);
        const long c_hi = std::min(it->last(), m1 + t.base + 3);
        for (long c = c_lo; c <= c_hi; ++c) {
          const cplx hv = it->values[static_cast<std::size_t>(c - it->first)];
          if (hv == 0.0) continue;
          for (int s = 0; s < 4; ++s) {
            const long m = c - t.base - s;
            if (m < m0 || m > m1 || t.w[s] == 0.0) continue;
            H[static_cast<std::size_t>(m - m0)] += t.w[s] * hv;
            any = true;
          }
        }
      }
      if (!any) continue;
      cplx acc = 0.0;
      for (std::size_t a = 0; a < cf.values.size(); ++a) {
        const cplx fa = cf.values[a];
        if (fa == 0.0) continue;
        cplx inner = 0.0;
        const cplx* hp = H.data() + a;
        for (std::size_t b = 0; b < cg.values.size(); ++b) inner += cg.values[b] * hp[b];
        acc += fa * inner;
      }
      total += acc;
    }
  }
  const double w = lat.cell_measure();
  return w * w * total;
}

LatticeField convolve(const LatticeField& f1, const LatticeField& f2, double alpha) {
  require_same_lattice(f1, f2);
  const auto& lat = f1.lattice;
  std::map<long, std::vector<LatticeColumn>> pieces;
  std::vector<cplx> G;
  for (const auto& c1 : f1.columns) {
    const double xi1 = static_cast<double>(c1.xi_index) * lat.dxi;
    for (const auto& c2 : f2.columns) {
      const double xi2 = static_cast<double>(c2.xi_index) * lat.dxi;
      const Taps t = taps_for(resonance(xi1, xi2, alpha) / lat.dmu);
      const long m0 = c1.first + c2.first;
      G.assign(c1.values.size() + c2.values.size() - 1, 0.0);
      for (std::size_t a = 0; a < c1.values.size(); ++a) {
        const cplx fa = c1.values[a];
        if (fa == 0.0) continue;
        for (std::size_t b = 0; b < c2.values.size(); ++b) G[a + b] += fa * c2.values[b];
      }
      LatticeColumn piece{c1.xi_index + c2.xi_index, m0 + t.base, std::vector<cplx>(G.size() + 3, 0.0)};
      for (std::size_t m = 0; m < G.size(); ++m) {
        if (G[m] == 0.0) continue;
        for (int s = 0; s < 4; ++s) piece.values[m + static_cast<std::size_t>(s)] += t.w[s] * G[m];
      }
      pieces[piece.xi_index].push_back(std::move(piece));
    }
  }
  LatticeField out;
  out.lattice = lat;
  const double w = lat.cell_measure();
  for (auto& [xi, list] : pieces) {
    std::sort(list.begin(), list.end(), [](const LatticeColumn& a, const LatticeColumn& b) { return a.first < b.first; });
    // Merge overlapping pieces into disjoint segments.
    std::size_t p = 0;
    while (p < list.size()) {
      long lo = list[p].first, hi = list[p].last();
      std::size_t q = p + 1;
      while (q < list.size() && list[q].first <= hi + 1) hi = std::max(hi, list[q++].last());
      LatticeColumn seg{xi, lo, std::vector<cplx>(static_cast<std::size_t>(hi - lo + 1), 0.0)};
      for (std::size_t r = p; r < q; ++r) {
        for (std::size_t n = 0; n < list[r].values.size(); ++n) {
          seg.values[static_cast<std::size_t>(list[r].first - lo) + n] += w * list[r].values[n];
        }
      }
      if (trim(seg)) out.columns.push_back(std::move(seg));
      p = q;
    }
  }
  sort_columns(out.columns);
  return out;
}

Atom restrict_to_v(const BlockSystem& bs, const LatticeField& f, int k, int j) {
  Atom at;
  at.k = k;
  at.j = j;
  at.support = AtomSupport::V;
  at.field.lattice = f.lattice;
  const auto cell = u_cell(bs, k);
  for (const auto& c : f.columns) {
    if (!cell.contains(static_cast<double>(c.xi_index) * f.lattice.dxi)) continue;
    LatticeColumn r = c;
    for (std::size_t n = 0; n < r.values.size(); ++n) {
      const double mu = static_cast<double>(r.first + static_cast<long>(n)) * f.lattice.dmu;
      if (!in_modulation_shell(j, mu)) r.values[n] = 0.0;
    }
    if (trim(r)) at.field.columns.push_back(std::move(r));
  }
  at.l2 = at.field.l2_norm();
  return at;
}

double restricted_convolution_norm(const BlockSystem& bs, const LatticeField& f1, const LatticeField& f2,
                                   int k3, int j3, double alpha) {
  return restrict_to_v(bs, convolve(f1, f2, alpha), k3, j3).l2;
}

LatticeField weighted(const LatticeField& f, const std::function<cplx(double, double)>& w) {
  LatticeField out = f;
  for (auto& c : out.columns) {
    const double xi = static_cast<double>(c.xi_index) * f.lattice.dxi;
    for (std::size_t n = 0; n < c.values.size(); ++n) {
      c.values[n] *= w(xi, static_cast<double>(c.first + static_cast<long>(n)) * f.lattice.dmu);
    }
  }
  return out;
}

double lattice_z_norm(const LatticeField& f, int k, const WeightTable& wt) {
  require(k != 0, ErrorKind::Range, "lattice_z_norm needs k != 0");
  std::vector<double> bucket(kMaxShell + 1, 0.0);
  for (const auto& c : f.columns) {
    for (std::size_t n = 0; n < c.values.size(); ++n) {
      const double a = std::norm(c.values[n]);
      if (a == 0.0) continue;
      const double mu = static_cast<double>(c.first + static_cast<long>(n)) * f.lattice.dmu;
      const auto [lo, hi] = shell_range(mu);
      for (int j = lo; j <= hi; ++j) {
        const double e = WindowSystem::eta(j, mu);
        if (e != 0.0) bucket[static_cast<std::size_t>(j)] += e * e * a;
      }
    }
  }
  double s = 0.0;
  for (int j = 0; j <= kMaxShell; ++j) {
    const double b = bucket[static_cast<std::size_t>(j)];
    if (b > 0.0) s += wt.z_weight(k, j) * std::sqrt(f.lattice.cell_measure() * b);
  }
  return s;
}

double lattice_x0_norm(const LatticeField& f, double rho, const WeightTable& wt) {
  require(rho >= -1.0 && rho <= 1.0, ErrorKind::Config, "rho must lie in [-1, 1]");
  const int lowest = WindowSystem::lowest_shell(f.lattice.dxi);
  std::map<std::pair<int, int>, double> bucket;
  for (const auto& c : f.columns) {
    const double xi = static_cast<double>(c.xi_index) * f.lattice.dxi;
    std::vector<std::pair<int, double>> xw;
    if (xi == 0.0) {
      xw.push_back({lowest, 1.0});
    } else {
      const int e = static_cast<int>(std::floor(std::log2(std::abs(xi))));
      for (int kp = std::max(lowest, e - 1); kp <= std::min(2, e + 2); ++kp) {
        const double v = WindowSystem::eta_tilde(kp, xi);
        if (v != 0.0) xw.push_back({kp, v});
      }
    }
    for (std::size_t n = 0; n < c.values.size(); ++n) {
      const double a = std::norm(c.values[n]);
      if (a == 0.0) continue;
      const double mu = static_cast<double>(c.first + static_cast<long>(n)) * f.lattice.dmu;
      const auto [lo, hi] = shell_range(mu);
      for (int j = lo; j <= hi; ++j) {
        const double e = WindowSystem::eta(j, mu);
        if (e == 0.0) continue;
        for (auto [kp, v] : xw) bucket[{j, kp}] += e * e * v * v * a;
      }
    }
  }
  double s = 0.0;
  for (const auto& [key, b] : bucket) {
    s += wt.low_weight(key.first) * std::pow(2.0, rho * key.second) * std::sqrt(f.lattice.cell_measure() * b);
  }
  return s;
}

}  // namespace dgbo
