// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace dgbo {

enum class ErrorKind {
  Config,            // parameter outside its admissible range
  InputShape,        // buffer sizes disagree with the grid
  Coverage,          // active frequencies outside the block system
  Support,           // space-time support condition of a norm violated
  Range,             // block index outside the constructed range
  NonPeriodicPsi,    // phi_low has nonzero mean
  Divergence,        // solver blow-up
  Degenerate,        // zero denominator in a ratio experiment
  InsufficientData,  // too few snapshots
  Regime,            // estimate instance outside the lemma hypotheses
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double last_good_time)
      : Error(ErrorKind::Divergence, what), last_good_time_(last_good_time) {}
  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace dgbo
