#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gl2rep/growth.hpp"

namespace gl2rep {

// Machine-readable command report.  JSON schema:
//   {command, params, rows:[{n,dim}], checks:[{name,expected,actual,pass}]}
// CSV columns: p,r,lambda,a,family,n,dim (invariant tables append `stable`).
struct Report {
  struct Row {
    long n;
    std::size_t dim;
    std::optional<bool> stable;
  };
  struct Check {
    std::string name;
    std::string expected;
    std::string actual;
    bool pass;
  };

  std::string command;
  std::map<std::string, std::string> params;  // ordered keys, deterministic output
  std::vector<Row> rows;
  std::vector<Check> checks;
  std::vector<GrowthStep> exponents;  // filled by growth commands

  bool all_pass() const {
    for (const Check& c : checks)
      if (!c.pass) return false;
    return true;
  }

  void add_check(const std::string& name, const std::string& expected, const std::string& actual) {
    checks.push_back({name, expected, actual, expected == actual});
  }

  void add_check_le(const std::string& name, std::size_t actual, std::size_t bound) {
    checks.push_back({name, "<= " + std::to_string(bound), std::to_string(actual), actual <= bound});
  }

  void add_check_bool(const std::string& name, bool ok) {
    checks.push_back({name, "true", ok ? "true" : "false", ok});
  }
};

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_csv(const Report& r) {
  auto param = [&](const char* k) {
    auto it = r.params.find(k);
    return it == r.params.end() ? std::string() : it->second;
  };
  const bool with_stable = !r.rows.empty() && r.rows.front().stable.has_value();
  std::string out = "p,r,lambda,a,family,n,dim";
  if (with_stable) out += ",stable";
  out += "\n";
  const std::string family = param("family").empty() ? param("subgroup") : param("family");
  for (const Report::Row& row : r.rows) {
    out += param("p") + "," + param("r") + "," + param("lambda") + "," + param("a") + "," +
           csv_escape(family) + "," + std::to_string(row.n) + "," + std::to_string(row.dim);
    if (with_stable) out += std::string(",") + (row.stable.value_or(false) ? "yes" : "no");
    out += "\n";
  }
  return out;
}

inline std::string to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["command"] = r.command;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  j["params"] = params;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const Report::Row& row : r.rows) {
    nlohmann::ordered_json o{{"n", row.n}, {"dim", row.dim}};
    if (row.stable) o["stable"] = *row.stable;
    rows.push_back(o);
  }
  j["rows"] = rows;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const Report::Check& c : r.checks)
    checks.push_back(nlohmann::ordered_json{
        {"name", c.name}, {"expected", c.expected}, {"actual", c.actual}, {"pass", c.pass}});
  j["checks"] = checks;
  if (!r.exponents.empty()) {
    nlohmann::ordered_json ex = nlohmann::ordered_json::array();
    for (const GrowthStep& s : r.exponents)
      ex.push_back(nlohmann::ordered_json{{"exact", s.exact}, {"value", s.value}});
    j["exponents"] = ex;
  }
  return j.dump(2) + "\n";
}

}  // namespace gl2rep
