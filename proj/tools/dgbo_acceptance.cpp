// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance driver: runs the dgbo CLI on the acceptance configurations,
// checks each criterion from the written reports and prints one PASS/FAIL
// line per criterion. Usage: dgbo_acceptance <dgbo executable> <work dir>.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct RunResult {
  std::string name;
  std::string subcommand;
  std::string config;
  std::vector<std::string> flags;
  int exit_code = -1;
  double seconds = 0.0;
  json report;
};

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Driver {
 public:
  Driver(std::string cli, fs::path work) : cli_(std::move(cli)), work_(std::move(work)) {
    fs::remove_all(work_);
    fs::create_directories(work_ / "configs");
  }

  RunResult& run(const std::string& name, const std::string& subcommand, const std::string& config,
                 std::vector<std::string> flags = {}) {
    RunResult r;
    r.name = name;
    r.subcommand = subcommand;
    r.config = config;
    r.flags = std::move(flags);
    execute(r, work_ / "runs" / name);
    runs_.push_back(std::move(r));
    return runs_.back();
  }

  // Reruns every recorded run into a second directory; returns the files
  // whose bytes differ (metadata.json, which holds wall time, excluded).
  std::vector<std::string> rerun_and_compare() {
    std::vector<std::string> diffs;
    for (auto& r : runs_) {
      RunResult again = r;
      execute(again, work_ / "rerun" / r.name);
      if (again.exit_code != r.exit_code) diffs.push_back(r.name + ": exit code");
      const fs::path a = work_ / "runs" / r.name, b = work_ / "rerun" / r.name;
      std::size_t files = 0;
      for (const auto& e : fs::directory_iterator(a)) {
        const auto file = e.path().filename().string();
        if (file == "metadata.json") continue;
        ++files;
        if (!fs::exists(b / file) || read_file(e.path()) != read_file(b / file)) diffs.push_back(r.name + "/" + file);
      }
      if (files == 0) diffs.push_back(r.name + ": no payload files");
      compared_ += files;
    }
    return diffs;
  }

  std::size_t compared() const { return compared_; }
  std::size_t runs() const { return runs_.size(); }

 private:
  void execute(RunResult& r, const fs::path& out) {
    const fs::path cfg = work_ / "configs" / (r.name + ".conf");
    std::ofstream(cfg, std::ios::binary) << r.config;
    fs::remove_all(out);
    std::string cmd = quote(cli_) + " " + r.subcommand + " --config " + quote(cfg.string()) + " --out " +
                      quote(out.string()) + " --quiet";
    for (const auto& f : r.flags) cmd += " " + f;
    cmd += " 2>" + quote((work_ / (r.name + ".stderr")).string());
    const auto start = std::chrono::steady_clock::now();
    const int status = std::system(cmd.c_str());
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.report = json();
    if (fs::exists(out / "report.json")) {
      try {
        r.report = json::parse(read_file(out / "report.json"));
      } catch (const json::exception&) {
      }
    }
  }

  std::string cli_;
  fs::path work_;
  std::deque<RunResult> runs_;  // stable references across runs
  std::size_t compared_ = 0;
};

// Collects the failed conditions of one criterion.
class Check {
 public:
  explicit Check(int id, std::string title) : id_(id), title_(std::move(title)) {}

  void require(bool ok, const std::string& what) {
    (ok ? passed_ : failed_).push_back(what);
  }

  // Number at a JSON pointer; NaN when absent or not a number.
  static double num(const json& j, const std::string& pointer) {
    try {
      const auto& v = j.at(json::json_pointer(pointer));
      if (v.is_number()) return v.get<double>();
    } catch (const json::exception&) {
    }
    return std::nan("");
  }

  bool print() const {
    const bool ok = failed_.empty() && !passed_.empty();
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id_ << ": " << title_ << " (";
    const auto& list = ok ? passed_ : failed_;
    for (std::size_t i = 0; i < list.size(); ++i) std::cout << (i ? "; " : "") << list[i];
    std::cout << ")" << std::endl;
    return ok;
  }

 private:
  int id_;
  std::string title_;
  std::vector<std::string> passed_, failed_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

void require_clean(Check& c, const RunResult& r) {
  c.require(r.exit_code == 0, r.name + " exit " + std::to_string(r.exit_code));
  c.require(r.report.is_object() && r.report.value("passed", false), r.name + " report passed");
}

void le(Check& c, const std::string& what, double v, double bound) {
  c.require(v <= bound, what + " " + fmt(v) + " <= " + fmt(bound));
}

void ge(Check& c, const std::string& what, double v, double bound) {
  c.require(v >= bound, what + " " + fmt(v) + " >= " + fmt(bound));
}

const json* find_report(const json& report, const std::string& id) {
  if (!report.is_object() || !report.contains("results")) return nullptr;
  const auto& results = report["results"];
  if (!results.contains("reports")) return nullptr;
  for (const auto& r : results["reports"]) {
    if (r.value("id", "") == id) return &r;
  }
  return nullptr;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: dgbo_acceptance <dgbo executable> <work dir>\n";
    return 2;
  }
  Driver d(argv[1], argv[2]);
  const unsigned hw = std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
  const std::string jobs = "--jobs " + std::to_string(hw);
  bool all = true;

  {
    Check c(1, "conservation on the smooth datum, N=2048, L=256, dt=5e-4, t in [0,1]");
    const auto& r = d.run("conserve", "conserve",
                          "alpha = 1.5\nN = 2048\nL = 256\ndt = 5e-4\nt_end = 1\ndatum = smooth\ndatum_l2 = 0.01\n");
    require_clean(c, r);
    le(c, "L2 drift", Check::num(r.report, "/results/drifts/l2"), 1e-8);
    le(c, "mean drift", Check::num(r.report, "/results/drifts/mean"), 1e-12);
    le(c, "Hamiltonian drift", Check::num(r.report, "/results/drifts/hamiltonian"), 1e-6);
    le(c, "runtime s", r.seconds, 120.0);
    all = c.print() && all;
  }
  {
    Check c(2, "solver order under dt halving and spectral saturation under N doubling");
    const auto& a = d.run("order", "solve",
                          "N = 256\nL = 64\ndt = 0.02\nt_end = 1\ndatum_l2 = 2\nsnapshot_stride = 50\n"
                          "dt_study = true\ndt_levels = 4\n");
    require_clean(c, a);
    const double p = Check::num(a.report, "/results/dt_study/observed_order");
    c.require(std::abs(p - 4.0) <= 0.2, "observed order " + fmt(p) + " in 4 +- 0.2");
    const auto& b = d.run("saturation", "solve",
                          "N = 2048\nL = 256\ndt = 5e-4\nt_end = 1\ndatum_l2 = 0.01\nn_study = true\n");
    require_clean(c, b);
    le(c, "N-doubling change", Check::num(b.report, "/results/n_study/change"), 1e-10);
    all = c.print() && all;
  }
  const auto& rn = d.run("renorm", "renorm",
                         "alpha = 1.5\nN = 2048\nL = 256\nK = 40\nstates = 100\npartition_samples = 100001\n"
                         "residual_strides = 200,100,50\n");
  {
    Check c(3, "partition of unity for K=40 and stable cutoff derivative constants");
    c.require(rn.exit_code == 0, "renorm exit " + std::to_string(rn.exit_code));
    le(c, "defect", Check::num(rn.report, "/results/partition_defect"), 1e-12);
    const auto bounds = rn.report.is_object() ? rn.report["results"].value("derivative_bounds", json::array())
                                              : json::array();
    c.require(!bounds.empty(), "derivative bounds reported");
    for (const auto& b : bounds) {
      const std::string o = std::to_string(b.value("order", 0));
      c.require(b["max_constant"].is_number() && std::isfinite(b["max_constant"].get<double>()),
                "order " + o + " constant finite");
      le(c, "order " + o + " spread", Check::num(b, "/tail_spread"), 0.2);
    }
    all = c.print() && all;
  }
  {
    Check c(4, "renormalization round trip on 100 random states and the five-term split");
    c.require(Check::num(rn.report, "/results/roundtrip/states") == 100.0, "100 states");
    le(c, "round-trip error", Check::num(rn.report, "/results/roundtrip/max_error"), 1e-10);
    le(c, "split error", Check::num(rn.report, "/results/split_max_error"), 1e-12);
    all = c.print() && all;
  }
  {
    Check c(5, "residual of the renormalized system on the acceptance trajectory");
    const json empty = json::array();
    const auto& res = rn.report.is_object() ? rn.report["results"]["residual"]["max_residual"] : empty;
    c.require(res.is_array() && res.size() == 3, "three snapshot spacings");
    if (res.is_array() && res.size() == 3) {
      le(c, "finest residual", res[2].get<double>(), 1e-5);
      ge(c, "decay 1", res[0].get<double>() / res[1].get<double>(), 8.0);
      ge(c, "decay 2", res[1].get<double>() / res[2].get<double>(), 8.0);
    }
    require_clean(c, rn);
    all = c.print() && all;
  }
  {
    Check c(6, "resonance band over 1e6 samples for alpha 1.1, 1.5, 1.9");
    const auto& r = d.run("resonance", "verify-estimates",
                          "part = resonance\nresonance_alphas = 1.1,1.5,1.9\nresonance_samples = 1000000\n");
    require_clean(c, r);
    for (const char* a : {"1.1", "1.5", "1.9"}) {
      const json* rep = find_report(r.report, std::string("om20-alpha") + a);
      c.require(rep && rep->value("samples", 0) == 1000000 && (*rep)["violations"].empty(),
                std::string("alpha ") + a + ": 1e6 samples, no violations");
    }
    le(c, "runtime s", r.seconds, 60.0);
    all = c.print() && all;
  }
  {
    Check c(7, "trilinear duality on 200 triples and permutation identities");
    const auto& r = d.run("duality", "verify-estimates", "part = duality\ntriples = 200\n");
    require_clean(c, r);
    c.require(Check::num(r.report, "/results/duality/triples") == 200.0, "200 triples");
    le(c, "duality error", Check::num(r.report, "/results/duality/duality_error"), 1e-8);
    le(c, "swap error", Check::num(r.report, "/results/duality/swap_error"), 1e-10);
    le(c, "reflection error", Check::num(r.report, "/results/duality/reflect_error"), 1e-10);
    all = c.print() && all;
  }
  {
    Check c(8, "trilinear and bilinear estimates bounded without growth; saturation slope 0.5");
    const auto& r = d.run("bounded", "verify-estimates",
                          "part = trilinear-a,trilinear-b,trilinear-c,bilinear-6.1a,bilinear-6.2,bilinear-6.3\n",
                          {jobs});
    require_clean(c, r);
    for (const char* id : {"om31", "om32", "om3", "hj1", "hw1", "hb1-lambda16"}) {
      const json* rep = find_report(r.report, id);
      if (!rep) {
        c.require(false, std::string(id) + " reported");
        continue;
      }
      c.require((*rep)["violations"].empty() && rep->value("samples", 0) > 0,
                std::string(id) + ": " + std::to_string(rep->value("samples", 0)) + " samples, no violations");
      for (const auto& g : (*rep)["regressions"]) {
        const double s = Check::num(g, "/slope"), e = Check::num(g, "/stderr_slope");
        const std::string what = std::string(id) + " " + g.value("parameter", "?");
        if (g.contains("predicted_slope")) {
          c.require(std::abs(s - 0.5) <= 0.1, what + " slope " + fmt(s) + " in 0.5 +- 0.1");
        } else {
          c.require(s <= 0.05 + 2.0 * e, what + " slope " + fmt(s) + " <= 0.05 + 2*" + fmt(e));
        }
      }
    }
    const json* a = find_report(r.report, "om31");
    bool saturation = false;
    if (a) {
      for (const auto& g : (*a)["regressions"]) saturation = saturation || g.contains("predicted_slope");
    }
    c.require(saturation, "om31 saturation regression present");
    all = c.print() && all;
  }
  {
    Check c(9, "linear estimates over a block sweep and one grid refinement");
    const auto& r = d.run("linear", "norms", "K = 10\nN = 1024\nL = 64\nM = 128\nT = 16\nrefine = true\n");
    require_clean(c, r);
    const auto est = r.report.is_object() ? r.report["results"].value("estimates", json::array()) : json::array();
    c.require(est.size() == 3, "three estimates");
    for (const auto& e : est) {
      const std::string id = e.value("id", "?");
      le(c, id + " max/median", Check::num(e, "/spread"), 4.0);
      le(c, id + " refinement growth", Check::num(e, "/refinement_growth"), 0.1);
    }
    all = c.print() && all;
  }
  {
    Check c(10, "triple commutator cancellation and two-mode closed form");
    const auto& r = d.run("triple", "verify-commutators", "part = triple\n");
    require_clean(c, r);
    le(c, "constant m'", Check::num(r.report, "/results/triple/constant_error"), 1e-12);
    le(c, "two-mode", Check::num(r.report, "/results/triple/two_mode_error"), 1e-10);
    all = c.print() && all;
  }
  {
    Check c(11, "ill-posedness packet demo: linear input distance, saturated output distance");
    const auto& r = d.run("illposed", "demo-illposed", "c_values = 0.001,0.003,0.009,0.027\n");
    require_clean(c, r);
    const double s = Check::num(r.report, "/results/input_slope/slope");
    c.require(std::abs(s - 1.0) <= 0.05, "input slope " + fmt(s) + " in 1 +- 0.05");
    ge(c, "min output / min input", Check::num(r.report, "/results/saturation_factor"), 50.0);
    all = c.print() && all;
  }
  {
    Check c(12, "every acceptance run is byte-identical on rerun");
    const auto diffs = d.rerun_and_compare();
    for (const auto& f : diffs) c.require(false, "differs: " + f);
    c.require(diffs.empty(), std::to_string(d.runs()) + " runs, " + std::to_string(d.compared()) + " payload files");
    all = c.print() && all;
  }
  return all ? 0 : 1;
}
