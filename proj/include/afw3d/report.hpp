#pragma once

// Machine-readable run reports: one CSV table and a JSON document with
// schema "afw3d-report/1". Numbers use the shortest round-trip decimal form
// so identical runs give identical bytes.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace afw3d {

inline constexpr const char* kReportSchema = "afw3d-report/1";

struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=" or ">="
  double threshold = 0.0;
  bool passed = false;
  std::string detail;
};

/// Builds a check and decides `passed` (NaN always fails).
Check make_check(std::string name, double value, std::string relation, double threshold, std::string detail = {});

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

struct Report {
  std::string command;
  std::map<std::string, std::string> config;
  std::vector<Check> checks;
  std::map<std::string, double> summary;
  Table table;

  bool passed() const;
};

std::string format_number(double v);
std::string to_csv(const Table& t);
std::string to_json(const Report& r);
/// Aligned plain-text rendering of the checks, summary and table.
void print_report(std::ostream& os, const Report& r);
/// Writes <dir>/<stem>.csv and <dir>/<stem>.json, creating dir.
void write_report(const Report& r, const std::string& dir, const std::string& stem);

}  // namespace afw3d
