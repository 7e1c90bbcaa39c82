#include "blq/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace blq {
namespace {

void emit(std::ostringstream& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      std::vector<std::string> keys;
      for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
      std::sort(keys.begin(), keys.end());
      out << "{\n";
      for (std::size_t i = 0; i < keys.size(); ++i) {
        out << inner << Json(keys[i]).dump() << ": ";
        emit(out, j.at(keys[i]), indent + 1);
        out << (i + 1 < keys.size() ? ",\n" : "\n");
      }
      out << pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out << inner;
        emit(out, j[i], indent + 1);
        out << (i + 1 < j.size() ? ",\n" : "\n");
      }
      out << pad << "]";
      return;
    }
    case Json::value_t::number_float: {
      double v = j.get<double>();
      if (std::isfinite(v))
        out << format_number(v);
      else
        out << (std::isnan(v) ? "\"nan\"" : (v > 0 ? "\"inf\"" : "\"-inf\""));
      return;
    }
    default:
      out << j.dump();
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

bool RunReport::pass() const {
  return error.empty() && std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

const Assertion& RunReport::check(const std::string& name, double value, const std::string& op, double bound) {
  Assertion a{name, value, op, bound, false};
  if (op == ">=")
    a.pass = value >= bound;
  else if (op == "<=")
    a.pass = value <= bound;
  assertions.push_back(a);
  return assertions.back();
}

const Assertion& RunReport::check_true(const std::string& name, bool ok) {
  return check(name, ok ? 1.0 : 0.0, ">=", 1.0);
}

std::string canonical_json(const Json& j) {
  std::ostringstream out;
  emit(out, j, 0);
  out << '\n';
  return out.str();
}

Json report_to_json(const RunReport& r) {
  Json j;
  j["scenario"] = r.scenario;
  j["task"] = r.task;
  j["inputs"] = r.inputs;
  j["results"] = r.results;
  j["library_version"] = kLibraryVersion;
  Json list = Json::array();
  for (const auto& a : r.assertions)
    list.push_back({{"name", a.name}, {"value", a.value}, {"op", a.op}, {"bound", a.bound}, {"pass", a.pass}});
  j["assertions"] = list;
  j["pass"] = r.pass();
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

std::string report_to_csv(const RunReport& r) {
  std::ostringstream out;
  out << "name,value,op,bound,pass\n";
  for (const auto& a : r.assertions)
    out << a.name << ',' << format_number(a.value) << ',' << a.op << ',' << format_number(a.bound) << ','
        << (a.pass ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace blq
