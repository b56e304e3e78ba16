#include "thermolab/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <stdexcept>

#include "thermolab/csv.hpp"

#ifndef THERMOLAB_VERSION
#define THERMOLAB_VERSION "0.0.0"
#endif

namespace thermolab {

using nlohmann::json;

const char* tool_version() { return THERMOLAB_VERSION; }

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass:
      return "pass";
    case CheckStatus::fail:
      return "fail";
    case CheckStatus::report:
      return "report";
  }
  return "report";
}

CheckStatus check_status_from_string(const std::string& s) {
  if (s == "pass") return CheckStatus::pass;
  if (s == "fail") return CheckStatus::fail;
  if (s == "report") return CheckStatus::report;
  throw std::invalid_argument("unknown check status '" + s + "'");
}

bool Report::pass() const {
  for (const auto& c : checks) {
    if (c.status == CheckStatus::fail) return false;
  }
  return true;
}

void Report::add(CheckRecord record, double runtime_seconds) {
  if (!timing.contains("runtimes")) timing["runtimes"] = json::object();
  timing["runtimes"][record.name] = runtime_seconds;
  checks.push_back(std::move(record));
}

json Report::deterministic_json() const {
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"operation", c.operation},
                   {"values", c.values},
                   {"bound", c.bound},
                   {"status", to_string(c.status)}});
  }
  return json{{"tool_version", tool_version}, {"config", config}, {"checks", arr}, {"pass", pass()}};
}

json Report::to_json() const {
  json j = deterministic_json();
  j["timing"] = timing;
  return j;
}

Report report_from_json(const json& j) {
  Report r;
  r.tool_version = j.at("tool_version").get<std::string>();
  r.config = j.at("config");
  for (const auto& c : j.at("checks")) {
    CheckRecord rec;
    rec.name = c.at("name").get<std::string>();
    rec.operation = c.at("operation").get<std::string>();
    rec.values = c.at("values");
    rec.bound = c.at("bound");
    rec.status = check_status_from_string(c.at("status").get<std::string>());
    r.checks.push_back(std::move(rec));
  }
  if (j.contains("timing")) r.timing = j.at("timing");
  return r;
}

json json_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  throw std::invalid_argument("not a number: '" + s + "'");
}

json json_numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_report(const Report& report, const std::string& path) {
  write_file_atomic(path, report.to_json().dump(2) + "\n");
}

}  // namespace thermolab
