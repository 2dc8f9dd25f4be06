// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "dgbo/dgbo.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("dgbo_capi_" + name);
  fs::remove_all(p);
  return p;
}

dgbo_status run(const char* sub, const std::string& config, const fs::path& out) {
  dgbo_run_options opts;
  dgbo_run_options_init(&opts);
  const std::string dir = out.string();
  opts.out_dir = dir.c_str();
  opts.quiet = 1;
  return dgbo_run(sub, config.c_str(), &opts);
}

constexpr const char* kSmallSolve = "N = 128\nL = 32\ndt = 0.01\nt_end = 0.2\nsnapshot_stride = 5\n";

}  // namespace

TEST_CASE("resonance is symmetric, homogeneous of degree alpha+1 and matches the diagonal value") {
  for (double alpha : {1.1, 1.5, 1.9}) {
    double a = 0, b = 0, c = 0, d = 0;
    REQUIRE(dgbo_resonance(0.7, 1.9, alpha, &a) == DGBO_OK);
    REQUIRE(dgbo_resonance(1.9, 0.7, alpha, &b) == DGBO_OK);
    REQUIRE(dgbo_resonance(2.1, 5.7, alpha, &c) == DGBO_OK);
    REQUIRE(dgbo_resonance(1.0, 1.0, alpha, &d) == DGBO_OK);
    CHECK(a == doctest::Approx(b).epsilon(1e-14));
    CHECK(c == doctest::Approx(std::pow(3.0, alpha + 1.0) * a).epsilon(1e-12));
    CHECK(d == doctest::Approx(std::pow(2.0, alpha + 1.0) - 2.0).epsilon(1e-14));
  }
}

TEST_CASE("triple commutator vanishes for a constant multiplier") {
  for (long p : {-7L, 3L, 11L}) {
    double re = 1, im = 1;
    REQUIRE(dgbo_triple_commutator_modes(64, p, 0, 1.5, &re, &im) == DGBO_OK);
    CHECK(std::hypot(re, im) <= 1e-12);
  }
  double re = 0, im = 0;
  CHECK(dgbo_triple_commutator_modes(64, 20, 1, 1.5, &re, &im) == DGBO_ERR_CONFIG);
}

TEST_CASE("every subcommand publishes a default config that it accepts back") {
  int count = 0;
  for (const char* const* s = dgbo_subcommands(); *s; ++s, ++count) {
    const char* text = dgbo_default_config(*s);
    REQUIRE(text != nullptr);
    CHECK(std::string(text).find(" = ") != std::string::npos);
  }
  CHECK(count >= 8);
  CHECK(dgbo_default_config("no-such-command") == nullptr);
}

TEST_CASE("zero datum solve writes artifacts and exits cleanly") {
  const auto out = scratch("zero");
  REQUIRE(run("solve", std::string(kSmallSolve) + "datum = zero\n", out) == DGBO_OK);
  const auto meta = nlohmann::json::parse(slurp(out / "metadata.json"));
  CHECK(meta["status"] == "ok");
  CHECK(meta["subcommand"] == "solve");
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  CHECK(report["passed"] == true);
  CHECK(report["violations"].empty());
  CHECK(fs::exists(out / "trajectory.csv"));
}

TEST_CASE("invalid configs are rejected with config status") {
  const auto out = scratch("bad");
  CHECK(run("solve", std::string(kSmallSolve) + "alpha = 2.5\n", out) == DGBO_ERR_CONFIG);
  CHECK(std::string(dgbo_last_error()).find("(1,2)") != std::string::npos);
  const auto meta = nlohmann::json::parse(slurp(out / "metadata.json"));
  CHECK(meta["status"] != "ok");
  CHECK(meta.contains("error"));

  CHECK(run("solve", std::string(kSmallSolve) + "bogus = 1\n", out) == DGBO_ERR_CONFIG);
  CHECK(run("solve", std::string(kSmallSolve) + "N = 64\n", out) == DGBO_ERR_CONFIG);
  CHECK(run("solve", "N = 12x\n", out) == DGBO_ERR_CONFIG);
  CHECK(run("no-such-command", "", out) == DGBO_ERR_CONFIG);
  CHECK(dgbo_run("solve", nullptr, nullptr) == DGBO_ERR_NULL_ARGUMENT);
}

TEST_CASE("reports and tables are byte-identical across runs and job counts") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  const std::string cfg = "part = resonance\nresonance_samples = 20000\n";
  dgbo_run_options opts;
  dgbo_run_options_init(&opts);
  opts.quiet = 1;
  const std::string da = a.string(), db = b.string();
  opts.out_dir = da.c_str();
  opts.jobs = 1;
  REQUIRE(dgbo_run("verify-estimates", cfg.c_str(), &opts) == DGBO_OK);
  opts.out_dir = db.c_str();
  opts.jobs = 3;
  REQUIRE(dgbo_run("verify-estimates", cfg.c_str(), &opts) == DGBO_OK);
  int compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().filename() == "metadata.json") continue;
    ++compared;
    CHECK_MESSAGE(slurp(e.path()) == slurp(b / e.path().filename()), e.path().filename().string());
  }
  CHECK(compared >= 4);
}

TEST_CASE("seed option overrides the config seed") {
  const auto out = scratch("seed");
  dgbo_run_options opts;
  dgbo_run_options_init(&opts);
  const std::string dir = out.string();
  opts.out_dir = dir.c_str();
  opts.quiet = 1;
  opts.seed_set = 1;
  opts.seed = 99;
  REQUIRE(dgbo_run("verify-estimates", "part = resonance\nresonance_samples = 1000\nseed = 5\n", &opts) == DGBO_OK);
  CHECK(nlohmann::json::parse(slurp(out / "report.json"))["seed"] == 99);
}
