// Runs every shipped acceptance scenario and prints one PASS/FAIL line per
// criterion. Optional arguments restrict the run to the listed criteria.
#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "blq/error.hpp"
#include "blq/scenario.hpp"

namespace {

struct Criterion {
  int id;
  std::string title;
  std::vector<std::string> scenarios;
  double budget_seconds;  // per scenario
};

struct Run {
  blq::RunReport report;
  double seconds = 0.0;
};

Run run_named(const std::string& name) {
  Run out;
  auto start = std::chrono::steady_clock::now();
  try {
    out.report = blq::run_scenario(blq::load_scenario_file(blq::resolve_scenario(name)));
  } catch (const blq::Error& e) {
    out.report.scenario = name;
    out.report.error = e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string first_failure(const blq::RunReport& r) {
  if (!r.error.empty()) return "error: " + r.error;
  for (const auto& a : r.assertions)
    if (!a.pass) return a.name + " = " + blq::format_number(a.value) + " (needs " + a.op + " " + blq::format_number(a.bound) + ")";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

  const std::vector<Criterion> criteria = {
      {1, "gaussian constants", {"ac01_gaussian_constants"}, 5.0},
      {2, "identity of the two gaussian optimizations", {"ac02_identity_ai"}, 120.0},
      {3, "adjoint gaussian constant and grid margins", {"ac03_adjoint_gaussian"}, 600.0},
      {4, "discrete subgroup constants", {"ac04_discrete"}, 600.0},
      {5, "equality cases", {"ac05_equality_cases"}, 600.0},
      {6, "perturbation gap", {"ac06_perturbation_gap"}, 600.0},
      {7, "tomography", {"ac07_tomography"}, 600.0},
      {8, "gamma constant", {"ac08_gamma_constant"}, 60.0},
      {9, "gowers norms", {"ac09_gowers"}, 600.0},
      {10, "entropy", {"ac10_entropy"}, 600.0},
  };

  int failed = 0;
  auto line = [&](int id, const std::string& title, bool ok, double seconds, const std::string& detail) {
    std::printf("[%s] criterion %2d: %-44s %8.2fs%s%s\n", ok ? "PASS" : "FAIL", id, title.c_str(), seconds,
                detail.empty() ? "" : "  ", detail.c_str());
    std::fflush(stdout);
    failed += ok ? 0 : 1;
  };

  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    bool ok = true;
    double total = 0.0;
    std::string detail;
    for (const auto& name : c.scenarios) {
      Run r = run_named(name);
      total += r.seconds;
      if (!r.report.pass()) {
        ok = false;
        detail = name + ": " + first_failure(r.report);
      } else if (r.seconds > c.budget_seconds) {
        ok = false;
        detail = name + ": over the " + blq::format_number(c.budget_seconds) + " s budget";
      }
    }
    line(c.id, c.title, ok, total, detail);
  }

  if (only.empty() || only.count(11)) {
    // The dedicated scenario checks itself; a few fast scenarios are rerun here too.
    bool ok = true;
    std::string detail;
    double total = 0.0;
    Run self = run_named("ac11_determinism");
    total += self.seconds;
    if (!self.report.pass()) {
      ok = false;
      detail = "ac11_determinism: " + first_failure(self.report);
    }
    for (const std::string name : {"ac01_gaussian_constants", "ac04_discrete", "ac09_gowers"}) {
      Run a = run_named(name), b = run_named(name);
      total += a.seconds + b.seconds;
      bool same = blq::canonical_json(blq::report_to_json(a.report)) == blq::canonical_json(blq::report_to_json(b.report)) &&
                  blq::report_to_csv(a.report) == blq::report_to_csv(b.report) && a.report.tables == b.report.tables;
      if (!same) {
        ok = false;
        detail = name + ": reports differ between runs";
      }
    }
    line(11, "determinism", ok, total, detail);
  }
  return failed == 0 ? 0 : 1;
}
