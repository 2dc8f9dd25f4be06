// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace dgbo::run {

enum class KeyKind { Real, Integer, Unsigned, Text, WordList, RealList, IntList, Flag };

struct KeySpec {
  std::string name;
  KeyKind kind;
  std::string fallback;  // default, written in config syntax
  std::string help;
};

/// Parsed key = value configuration checked against a key list. Values are
/// validated for type at parse time; range checks belong to the callers.
class Config {
 public:
  Config(const std::vector<KeySpec>& keys, const std::string& text);

  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  std::uint64_t unsigned_integer(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  std::vector<std::string> words(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<long> integers(const std::string& key) const;
  bool flag(const std::string& key) const;

  void set(const std::string& key, const std::string& value);

  /// Every key with its effective typed value, in key-list order.
  nlohmann::ordered_json effective() const;

 private:
  const KeySpec& spec(const std::string& key) const;

  std::vector<KeySpec> keys_;
  std::map<std::string, std::string> values_;
};

/// Default configuration text for a key list.
std::string default_text(const std::vector<KeySpec>& keys);

}  // namespace dgbo::run
