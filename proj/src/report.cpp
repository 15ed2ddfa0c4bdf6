#include "afw3d/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "afw3d/errors.hpp"

namespace afw3d {

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  return std::get<std::string>(c);
}

nlohmann::ordered_json number_json(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

Check make_check(std::string name, double value, std::string relation, double threshold, std::string detail) {
  Check c{std::move(name), value, std::move(relation), threshold, false, std::move(detail)};
  if (std::isnan(value)) c.passed = false;
  else if (c.relation == "<=") c.passed = value <= threshold;
  else if (c.relation == ">=") c.passed = value >= threshold;
  else if (c.relation == "==") c.passed = value == threshold;
  else throw ConfigError("unknown check relation " + c.relation);
  return c;
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw DimensionMismatch("table row width");
  rows.push_back(std::move(row));
}

bool Report::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + csv_escape(t.columns[i]);
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_escape(cell_text(row[i]));
    out += '\n';
  }
  return out;
}

std::string to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["schema"] = kReportSchema;
  j["command"] = r.command;
  j["passed"] = r.passed();
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config) j["config"][k] = v;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["value"] = number_json(c.value);
    cj["relation"] = c.relation;
    cj["threshold"] = number_json(c.threshold);
    cj["passed"] = c.passed;
    if (!c.detail.empty()) cj["detail"] = c.detail;
    j["checks"].push_back(cj);
  }
  j["summary"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.summary) j["summary"][k] = number_json(v);
  j["table"]["columns"] = r.table.columns;
  j["table"]["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.table.rows) {
    nlohmann::ordered_json rj = nlohmann::ordered_json::array();
    for (const auto& c : row) {
      if (const auto* i = std::get_if<std::int64_t>(&c)) rj.push_back(*i);
      else if (const auto* d = std::get_if<double>(&c)) rj.push_back(number_json(*d));
      else rj.push_back(std::get<std::string>(c));
    }
    j["table"]["rows"].push_back(rj);
  }
  return j.dump(2) + "\n";
}

void print_report(std::ostream& os, const Report& r) {
  os << r.command << '\n';
  std::size_t w = 0;
  for (const auto& c : r.checks) w = std::max(w, c.name.size());
  for (const auto& c : r.checks) {
    os << "  " << (c.passed ? "PASS " : "FAIL ") << std::left << std::setw(static_cast<int>(w)) << c.name << "  "
       << format_number(c.value) << ' ' << c.relation << ' ' << format_number(c.threshold);
    if (!c.detail.empty()) os << "  (" << c.detail << ')';
    os << '\n';
  }
  for (const auto& [k, v] : r.summary) os << "  " << k << " = " << format_number(v) << '\n';
  if (!r.table.columns.empty()) {
    std::vector<std::size_t> widths(r.table.columns.size());
    for (std::size_t i = 0; i < widths.size(); ++i) widths[i] = r.table.columns[i].size();
    for (const auto& row : r.table.rows)
      for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], cell_text(row[i]).size());
    auto line = [&](const std::vector<std::string>& cells) {
      os << ' ';
      for (std::size_t i = 0; i < cells.size(); ++i) os << ' ' << std::right << std::setw(static_cast<int>(widths[i])) << cells[i];
      os << '\n';
    };
    line(r.table.columns);
    for (const auto& row : r.table.rows) {
      std::vector<std::string> cells;
      for (const auto& c : row) cells.push_back(cell_text(c));
      line(cells);
    }
  }
  os << (r.passed() ? "result: ok" : "result: check failure") << '\n';
}

void write_report(const Report& r, const std::string& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base = std::filesystem::path(dir) / stem;
  std::ofstream csv(base.string() + ".csv", std::ios::binary);
  std::ofstream json(base.string() + ".json", std::ios::binary);
  if (!csv || !json) throw ConfigError("cannot write report files under " + dir);
  csv << to_csv(r.table);
  json << to_json(r);
}

}  // namespace afw3d
