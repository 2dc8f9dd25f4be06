// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#include "dgbo/errors.hpp"

namespace dgbo {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::InputShape: return "input-shape";
    case ErrorKind::Coverage: return "coverage";
    case ErrorKind::Support: return "support";
    case ErrorKind::Range: return "range";
    case ErrorKind::NonPeriodicPsi: return "non-periodic-antiderivative";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Degenerate: return "degenerate-input";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Regime: return "regime";
  }
  return "unknown";
}

}  // namespace dgbo
