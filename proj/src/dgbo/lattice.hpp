// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <random>
#include <vector>

#include "dgbo/blocks.hpp"
#include "dgbo/fft.hpp"
#include "dgbo/norms.hpp"

namespace dgbo {

/// Omega(xi1, xi2) = -omega(xi1 + xi2) + omega(xi1) + omega(xi2), evaluated
/// without cancellation when one argument is small.
double resonance(double xi1, double xi2, double alpha);

/// |Omega| / (min(|xi1|, |xi2|, |xi1 + xi2|) max(|xi1|, |xi2|, |xi1 + xi2|)^alpha);
/// zero on the degenerate set.
double resonance_ratio(double xi1, double xi2, double alpha);

/// Cells of the (xi, mu) lattice are [i dxi +- dxi/2] x [a dmu +- dmu/2].
/// Functions are constant in mu on each cell and sampled in xi, so
/// integrals over xi become dxi-weighted sums.
struct Lattice {
  double dxi = 0.25;
  double dmu = 0.5;

  double cell_measure() const noexcept { return dxi * dmu; }
  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.dxi == b.dxi && a.dmu == b.dmu;
  }
};

/// Values of one xi-column on the contiguous mu-range first, first + 1, ...
struct LatticeColumn {
  long xi_index = 0;
  long first = 0;
  std::vector<cplx> values;

  long last() const noexcept { return first + static_cast<long>(values.size()) - 1; }
};

/// Sparse function on the lattice, columns sorted by xi_index. The second
/// coordinate is mu = tau - omega(xi).
struct LatticeField {
  Lattice lattice;
  std::vector<LatticeColumn> columns;

  double l2_norm() const;
  const LatticeColumn* column(long xi_index) const;
  bool empty() const noexcept { return columns.empty(); }
};

/// D: xi in I_k, mu in J_j. D0: xi in I_0 and |xi| in J~_{k'}. V and UJ:
/// xi in U_k, mu in J_j (the same set in mu coordinates; V marks a factor
/// of a convolution, UJ an argument of J).
enum class AtomSupport { D, D0, V, UJ };

const char* to_string(AtomSupport s);

/// A lattice function supported on the cells whose centres lie in its
/// descriptor set.
struct Atom {
  int k = 0;
  int j = 0;
  int k_prime = 0;
  AtomSupport support = AtomSupport::UJ;
  LatticeField field;
  double l2 = 0.0;
};

/// xi lattice indices of the descriptor set.
std::vector<long> support_columns(const BlockSystem& bs, const Lattice& lat, AtomSupport s, int k,
                                  int k_prime = 0);

/// Whether mu (a cell centre) lies in J_j.
bool in_modulation_shell(int j, double mu);

/// Fills every cell of the descriptor set with value(xi, mu).
Atom make_atom(const BlockSystem& bs, const Lattice& lat, AtomSupport s, int k, int j,
               const std::function<cplx(double, double)>& value, int k_prime = 0);

/// I.i.d. standard complex Gaussian values on the descriptor set.
Atom random_atom(const BlockSystem& bs, const Lattice& lat, AtomSupport s, int k, int j,
                 std::mt19937_64& rng, int k_prime = 0);

/// Throws a support error if a value sits off the descriptor set, or a
/// config error if the cached l2 disagrees with recomputation beyond 1e-12.
void validate_atom(const BlockSystem& bs, const Atom& a);

/// f~(xi, mu) = f(-xi, -mu).
LatticeField reflect(const LatticeField& f);
Atom reflect(const Atom& a);
Atom scaled(const Atom& a, cplx s);

/// J(f, g, h): the mu-integrals are exact for the cellwise constant
/// representation; they reduce to weights B(c - a - b - Omega/dmu) with B
/// the centred quadratic B-spline.
cplx j_functional(const LatticeField& f, const LatticeField& g, const LatticeField& h, double alpha);

/// f1 * f2 in (xi, tau), written in mu coordinates of the sum and
/// projected onto the cellwise constant functions.
LatticeField convolve(const LatticeField& f1, const LatticeField& f2, double alpha);

/// Restriction of a lattice field to the cells of U_k x J_j.
Atom restrict_to_v(const BlockSystem& bs, const LatticeField& f, int k, int j);

/// ||1_{V_k3^j3} (f1 * f2)||.
double restricted_convolution_norm(const BlockSystem& bs, const LatticeField& f1,
                                   const LatticeField& f2, int k3, int j3, double alpha);

/// Multiplies each cell by w(xi, mu).
LatticeField weighted(const LatticeField& f, const std::function<cplx(double, double)>& w);

/// Z_k norm with the smooth eta_j windows, k != 0.
double lattice_z_norm(const LatticeField& f, int k, const WeightTable& wt);
/// X_0^rho norm; the xi = 0 column belongs to the lowest resolved shell.
double lattice_x0_norm(const LatticeField& f, double rho, const WeightTable& wt);

}  // namespace dgbo
