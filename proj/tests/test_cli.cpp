// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("dgbo_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Runs the CLI with the given arguments; stderr goes to dir/stderr.txt.
int cli(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string(DGBO_CLI_PATH) + " " + args + " >" + (dir / "stdout.txt").string() + " 2>" +
                          (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const std::string kSmall = "N=128 L=32 dt=0.01 t_end=0.2 snapshot_stride=5";

}  // namespace

TEST_CASE("zero datum exits 0") {
  const auto d = scratch("zero");
  CHECK(cli("solve --quiet --out " + (d / "out").string() + " datum=zero " + kSmall, d) == 0);
  CHECK(fs::exists(d / "out" / "report.json"));
}

TEST_CASE("alpha outside (1,2) exits 2 and names the interval") {
  const auto d = scratch("alpha");
  CHECK(cli("solve --quiet --out " + (d / "out").string() + " alpha=2.5 " + kSmall, d) == 2);
  CHECK(slurp(d / "stderr.txt").find("(1,2)") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  const auto d = scratch("usage");
  CHECK(cli("solve --quiet --out " + (d / "out").string() + " nonsense=1", d) == 2);
  CHECK(cli("solve --quiet --config " + (d / "missing.conf").string(), d) == 2);
  CHECK(cli("no-such-command", d) == 2);
  CHECK(cli("solve --jobs 0", d) == 2);
  CHECK(cli("solve notkeyvalue", d) == 2);
}

TEST_CASE("config file with command-line overrides") {
  const auto d = scratch("config");
  std::ofstream(d / "run.conf") << "# small grid\nN = 64\nL = 32\ndt = 0.01\nt_end = 0.1\nsnapshot_stride = 5\n";
  CHECK(cli("solve --quiet --config " + (d / "run.conf").string() + " --out " + (d / "out").string() + " N=128", d) ==
        0);
  CHECK(slurp(d / "out" / "report.json").find("\"N\": 128") != std::string::npos);
}

TEST_CASE("print-defaults lists the keys") {
  const auto d = scratch("defaults");
  CHECK(cli("conserve --print-defaults", d) == 0);
  const auto text = slurp(d / "stdout.txt");
  CHECK(text.find("alpha = 1.5") != std::string::npos);
  CHECK(text.find("hamiltonian_tol") != std::string::npos);
}

TEST_CASE("repeated runs produce identical reports") {
  const auto d = scratch("determinism");
  const std::string args = "verify-estimates --quiet part=duality triples=20";
  REQUIRE(cli(args + " --out " + (d / "a").string() + " --jobs 1", d) == 0);
  REQUIRE(cli(args + " --out " + (d / "b").string() + " --jobs 2", d) == 0);
  CHECK(slurp(d / "a" / "report.json") == slurp(d / "b" / "report.json"));
  CHECK(!slurp(d / "a" / "report.json").empty());
}
