#pragma once

// Run reports: per-check records plus an aggregate flag, serialized as JSON.
// Wall-clock data lives under "timing" so the rest of the document is a pure
// function of config and seed.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace thermolab {

const char* tool_version();

enum class CheckStatus { pass, fail, report };

std::string to_string(CheckStatus status);
CheckStatus check_status_from_string(const std::string& s);

struct CheckRecord {
  std::string name;
  std::string operation;  // module operation that produced the values
  nlohmann::json values = nlohmann::json::object();
  nlohmann::json bound = nullptr;
  CheckStatus status = CheckStatus::report;
};

struct Report {
  std::string tool_version = thermolab::tool_version();
  nlohmann::json config = nlohmann::json::object();
  std::vector<CheckRecord> checks;
  nlohmann::json timing = nlohmann::json::object();

  bool pass() const;
  void add(CheckRecord record, double runtime_seconds);
  nlohmann::json to_json() const;
  /// to_json() without the timing block.
  nlohmann::json deterministic_json() const;
};

Report report_from_json(const nlohmann::json& j);

/// JSON number, or "inf" / "-inf" / "nan" for non-finite values.
nlohmann::json json_number(double x);
double number_from_json(const nlohmann::json& j);
nlohmann::json json_numbers(const std::vector<double>& v);

/// ISO-8601 UTC timestamp.
std::string utc_timestamp();

void write_report(const Report& report, const std::string& path);

}  // namespace thermolab
