// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Each subcommand reads a key = value config file,
// applies key=value overrides given as positional arguments and hands the
// result to dgbo_run.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dgbo/dgbo.h"

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string key_of(const std::string& line) {
  const auto code = line.substr(0, line.find('#'));
  const auto eq = code.find('=');
  return eq == std::string::npos ? std::string() : trim(code.substr(0, eq));
}

// Drops file lines whose key an override sets, then appends the overrides.
std::string merge(const std::string& file_text, const std::vector<std::string>& overrides) {
  std::vector<std::string> keys;
  for (const auto& o : overrides) keys.push_back(key_of(o));
  std::string out;
  std::istringstream in(file_text);
  std::string line;
  while (std::getline(in, line)) {
    const auto k = key_of(line);
    bool replaced = false;
    for (const auto& o : keys) replaced = replaced || (!k.empty() && k == o);
    out += (replaced ? "# overridden: " : "") + line + "\n";
  }
  for (const auto& o : overrides) out += o + "\n";
  return out;
}

struct Args {
  std::string config;
  std::string out = "dgbo-out";
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  bool quiet = false;
  bool print_defaults = false;
  std::vector<std::string> overrides;
};

int run(const std::string& subcommand, const Args& a, const CLI::App& sub) {
  if (a.print_defaults) {
    const char* text = dgbo_default_config(subcommand.c_str());
    if (!text) {
      std::cerr << "dgbo: " << dgbo_last_error() << '\n';
      return 2;
    }
    std::cout << text;
    return 0;
  }
  std::string text;
  if (!a.config.empty()) {
    std::ifstream in(a.config, std::ios::binary);
    if (!in) {
      std::cerr << "dgbo: cannot read config file '" << a.config << "'\n";
      return 2;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  for (const auto& o : a.overrides) {
    if (key_of(o).empty()) {
      std::cerr << "dgbo: override '" << o << "' is not of the form key=value\n";
      return 2;
    }
  }
  text = merge(text, a.overrides);

  dgbo_run_options opts;
  dgbo_run_options_init(&opts);
  opts.out_dir = a.out.c_str();
  opts.seed_set = sub.count("--seed") > 0 ? 1 : 0;
  opts.seed = a.seed;
  opts.jobs = a.jobs;
  opts.quiet = a.quiet ? 1 : 0;
  const dgbo_status s = dgbo_run(subcommand.c_str(), text.c_str(), &opts);
  if (s != DGBO_OK) std::cerr << "dgbo: " << dgbo_status_name(s) << ": " << dgbo_last_error() << '\n';
  return dgbo_exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dispersion-generalized Benjamin-Ono experiments"};
  app.set_version_flag("--version", dgbo_version());
  app.require_subcommand(1);

  Args args;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const char* const* name = dgbo_subcommands(); *name; ++name) {
    auto* sub = app.add_subcommand(*name, std::string("run the ") + *name + " pipeline");
    sub->add_option("--config", args.config, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "artifact directory")->capture_default_str();
    sub->add_option("--seed", args.seed, "random seed, overrides the config");
    sub->add_option("--jobs", args.jobs, "worker threads, overrides the config")->check(CLI::Range(1u, 256u));
    sub->add_flag("--quiet", args.quiet, "no progress lines on stderr");
    sub->add_flag("--print-defaults", args.print_defaults, "print the default config and exit");
    sub->add_option("overrides", args.overrides, "key=value overrides applied after the config file");
    subs.emplace_back(*name, sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) return run(name, args, *sub);
  }
  return 2;
}
