// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"
#include "dgbo/report.hpp"
#include "json.hpp"

namespace dgbo::run {

inline constexpr int kSchemaVersion = 1;

/// Artifact directory or file could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string out_dir = "dgbo-out";
  std::optional<std::uint64_t> seed;
  unsigned jobs = 0;  // 0 keeps the config value
  bool quiet = false;
};

struct Outcome {
  std::vector<std::string> violations;
  std::vector<std::string> artifacts;
};

const std::vector<std::string>& subcommands();

/// Key list of a subcommand; config error for an unknown name.
std::vector<KeySpec> keys(const std::string& subcommand);

/// Parses and validates the config, runs the pipeline and writes
/// metadata.json, report.json and the tables into opts.out_dir. Errors
/// propagate after metadata.json has recorded them.
Outcome execute(const std::string& subcommand, const std::string& config_text, const Options& opts);

/// Shortest round-trip decimal form; "nan", "inf" and "-inf" otherwise.
std::string format_number(double v);

/// Header line, then one line per row.
std::string to_csv(const Table& t);

nlohmann::ordered_json to_json(const EstimateReport& r);

}  // namespace dgbo::run
