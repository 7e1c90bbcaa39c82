#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "blq/error.hpp"
#include "blq/scenario.hpp"

namespace {

struct Outcome {
  std::string name;
  bool pass = false;
  std::size_t passed = 0;
  std::size_t total = 0;
  double seconds = 0.0;
  std::string error;
};

Outcome run_one(const std::string& path, const blq::RunOverrides& ov, const std::string& out_dir) {
  Outcome o;
  o.name = std::filesystem::path(path).stem().string();
  auto start = std::chrono::steady_clock::now();
  blq::RunReport r;
  try {
    r = blq::run_scenario(blq::load_scenario_file(path), ov);
  } catch (const blq::Error& e) {
    r.scenario = o.name;
    r.error = e.what();
  }
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!r.scenario.empty()) o.name = r.scenario;
  for (const auto& a : r.assertions) o.passed += a.pass ? 1 : 0;
  o.total = r.assertions.size();
  o.pass = r.pass();
  o.error = r.error;
  if (!out_dir.empty()) blq::write_report(r, out_dir);
  return o;
}

void print_row(const Outcome& o) {
  std::printf("%-34s %-4s %4zu/%-4zu %9.2fs%s%s\n", o.name.c_str(), o.pass ? "PASS" : "FAIL", o.passed, o.total,
              o.seconds, o.error.empty() ? "" : "  error: ", o.error.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brascamp-Lieb and adjoint inequality toolkit"};
  app.require_subcommand(1);

  blq::RunOverrides ov;
  std::string target, out_dir;
  std::uint64_t seed = 0;
  double tol = 0.0;

  auto* run = app.add_subcommand("run", "Run one scenario given by path or name");
  run->add_option("scenario", target, "Scenario file or name")->required();
  run->add_option("--out", out_dir, "Directory for the JSON/CSV report");
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  auto* tol_opt = run->add_option("--tol", tol, "Override the primary tolerance")->check(CLI::PositiveNumber);

  std::string suite_dir;
  auto* suite = app.add_subcommand("suite", "Run every scenario in a directory");
  suite->add_option("dir", suite_dir, "Directory of scenario files")->required()->check(CLI::ExistingDirectory);
  suite->add_option("--out", out_dir, "Directory for the reports");

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) ov.seed = seed;
  if (*tol_opt) ov.tol = tol;

  if (*run) {
    std::string path;
    try {
      path = blq::resolve_scenario(target);
    } catch (const blq::Error& e) {
      std::cerr << "blq: " << e.what() << '\n';
      return 2;
    }
    Outcome o = run_one(path, ov, out_dir);
    print_row(o);
    return o.pass ? 0 : 1;
  }

  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(suite_dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::size_t failed = 0;
  std::printf("%-34s %-4s %9s %10s\n", "scenario", "", "asserts", "time");
  for (const auto& f : files) {
    Outcome o = run_one(f.string(), ov, out_dir);
    print_row(o);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%zu of %zu scenarios passed\n", files.size() - failed, files.size());
  return failed == 0 ? 0 : 1;
}
