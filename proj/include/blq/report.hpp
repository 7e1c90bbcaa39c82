#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace blq {

using Json = nlohmann::json;

// A checked relation `value <op> bound` with op one of ">=", "<=".
struct Assertion {
  std::string name;
  double value = 0.0;
  std::string op = ">=";
  double bound = 0.0;
  bool pass = false;
};

struct RunReport {
  std::string scenario;
  std::string task;
  Json inputs = Json::object();
  Json results = Json::object();
  std::vector<Assertion> assertions;
  // Set when the task stopped on an error; partial results are kept.
  std::string error;
  // CSV tables keyed by file stem.
  std::map<std::string, std::string> tables;

  bool pass() const;
  // Records and returns the assertion.
  const Assertion& check(const std::string& name, double value, const std::string& op, double bound);
  const Assertion& check_true(const std::string& name, bool ok);
};

inline constexpr const char* kLibraryVersion = "1.0.0";

// Sorted keys, two-space indent, finite doubles as %.12g, non-finite as the
// strings "inf", "-inf", "nan". Output is byte-stable for equal documents.
std::string canonical_json(const Json& j);

Json report_to_json(const RunReport& r);
// One row per assertion: name,value,op,bound,pass.
std::string report_to_csv(const RunReport& r);

// %.12g.
std::string format_number(double v);

}  // namespace blq
