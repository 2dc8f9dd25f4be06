// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#include "config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "dgbo/errors.hpp"

namespace dgbo::run {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_integer(const std::string& s, long& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtol(s.c_str(), &end, 10);
  return errno == 0 && end == s.c_str() + s.size();
}

bool parse_unsigned(const std::string& s, std::uint64_t& out) {
  if (s.empty() || s[0] == '-' || s[0] == '+') return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtoull(s.c_str(), &end, 10);
  return errno == 0 && end == s.c_str() + s.size();
}

bool parse_flag(const std::string& s, bool& out) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0" || s == "no" || s == "off") {
    out = false;
    return true;
  }
  return false;
}

const char* kind_name(KeyKind k) {
  switch (k) {
    case KeyKind::Real: return "a real number";
    case KeyKind::Integer: return "an integer";
    case KeyKind::Unsigned: return "a non-negative integer";
    case KeyKind::Text: return "a word";
    case KeyKind::WordList: return "a comma-separated list of words";
    case KeyKind::RealList: return "a comma-separated list of real numbers";
    case KeyKind::IntList: return "a comma-separated list of integers";
    case KeyKind::Flag: return "true or false";
  }
  return "?";
}

bool well_typed(KeyKind kind, const std::string& v) {
  double d;
  long l;
  std::uint64_t u;
  bool b;
  switch (kind) {
    case KeyKind::Real: return parse_real(v, d);
    case KeyKind::Integer: return parse_integer(v, l);
    case KeyKind::Unsigned: return parse_unsigned(v, u);
    case KeyKind::Text: return !v.empty() && v.find_first_of(" \t") == std::string::npos;
    case KeyKind::WordList: {
      const auto items = split_list(v);
      return !items.empty() && std::all_of(items.begin(), items.end(), [](const auto& s) {
        return s.find_first_of(" \t") == std::string::npos;
      });
    }
    case KeyKind::RealList: {
      const auto items = split_list(v);
      return !items.empty() && std::all_of(items.begin(), items.end(), [&](const auto& s) { return parse_real(s, d); });
    }
    case KeyKind::IntList: {
      const auto items = split_list(v);
      return !items.empty() &&
             std::all_of(items.begin(), items.end(), [&](const auto& s) { return parse_integer(s, l); });
    }
    case KeyKind::Flag: return parse_flag(v, b);
  }
  return false;
}

}  // namespace

Config::Config(const std::vector<KeySpec>& keys, const std::string& text) : keys_(keys) {
  for (const auto& k : keys_) values_[k.name] = k.fallback;
  std::map<std::string, int> seen;
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(number) + ": ";
    require(eq != std::string::npos, ErrorKind::Config, where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require(std::any_of(keys_.begin(), keys_.end(), [&](const KeySpec& s) { return s.name == key; }),
            ErrorKind::Config, where + "unknown key '" + key + "'");
    if (const auto it = seen.find(key); it != seen.end()) {
      fail(ErrorKind::Config, where + "key '" + key + "' already set on line " + std::to_string(it->second));
    }
    seen[key] = number;
    set(key, value);
  }
}

const KeySpec& Config::spec(const std::string& key) const {
  for (const auto& k : keys_) {
    if (k.name == key) return k;
  }
  fail(ErrorKind::Config, "unknown key '" + key + "'");
}

void Config::set(const std::string& key, const std::string& value) {
  const auto& s = spec(key);
  require(well_typed(s.kind, value), ErrorKind::Config,
          "key '" + key + "' expects " + kind_name(s.kind) + ", got '" + value + "'");
  values_[key] = value;
}

double Config::real(const std::string& key) const {
  double d = 0.0;
  parse_real(values_.at(spec(key).name), d);
  return d;
}

long Config::integer(const std::string& key) const {
  long l = 0;
  parse_integer(values_.at(spec(key).name), l);
  return l;
}

std::uint64_t Config::unsigned_integer(const std::string& key) const {
  std::uint64_t u = 0;
  require(parse_unsigned(values_.at(spec(key).name), u), ErrorKind::Config,
          "key '" + key + "' expects a non-negative integer");
  return u;
}

const std::string& Config::text(const std::string& key) const { return values_.at(spec(key).name); }

std::vector<std::string> Config::words(const std::string& key) const {
  return split_list(values_.at(spec(key).name));
}

std::vector<double> Config::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : split_list(values_.at(spec(key).name))) {
    double d = 0.0;
    parse_real(s, d);
    out.push_back(d);
  }
  return out;
}

std::vector<long> Config::integers(const std::string& key) const {
  std::vector<long> out;
  for (const auto& s : split_list(values_.at(spec(key).name))) {
    long l = 0;
    parse_integer(s, l);
    out.push_back(l);
  }
  return out;
}

bool Config::flag(const std::string& key) const {
  bool b = false;
  parse_flag(values_.at(spec(key).name), b);
  return b;
}

nlohmann::ordered_json Config::effective() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& k : keys_) {
    switch (k.kind) {
      case KeyKind::Real: j[k.name] = real(k.name); break;
      case KeyKind::Integer: j[k.name] = integer(k.name); break;
      case KeyKind::Unsigned: j[k.name] = unsigned_integer(k.name); break;
      case KeyKind::Text: j[k.name] = text(k.name); break;
      case KeyKind::WordList: j[k.name] = words(k.name); break;
      case KeyKind::RealList: j[k.name] = reals(k.name); break;
      case KeyKind::IntList: j[k.name] = integers(k.name); break;
      case KeyKind::Flag: j[k.name] = flag(k.name); break;
    }
  }
  return j;
}

std::string default_text(const std::vector<KeySpec>& keys) {
  std::string out;
  for (const auto& k : keys) {
    out += "# " + k.help + "\n" + k.name + " = " + k.fallback + "\n";
  }
  return out;
}

}  // namespace dgbo::run
