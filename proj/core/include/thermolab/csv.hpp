#pragma once

// Locale-independent CSV output with round-trip float formatting and atomic
// file replacement.

#include <string>
#include <vector>

namespace thermolab {

/// Shortest-safe formatting with 17 significant digits, '.' decimal point.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values);
  void add_row(std::vector<std::string> cells);
  std::string str() const;
};

/// Writes to path.tmp then renames over path.
void write_file_atomic(const std::string& path, const std::string& content);
void write_csv(const std::string& path, const CsvTable& table);

}  // namespace thermolab
