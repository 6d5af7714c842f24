#include "artifacts.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <ostream>

namespace randcurv::cli {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

void Table::add_meta(const std::string& key, double value) { meta.emplace_back(key, format_number(value)); }

void Table::add_meta(const std::string& key, const std::string& value) { meta.emplace_back(key, value); }

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size())
    throw std::logic_error("table " + name + ": row has " + std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(columns.size()));
  rows.push_back(std::move(cells));
}

void write_csv(std::ostream& out, const Table& table) {
  for (const auto& [k, v] : table.meta) out << "# " << k << ' ' << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

namespace {

nlohmann::json cell(const std::string& s) {
  if (s == "nan" || s == "inf" || s == "-inf") return nullptr;
  if (s == "true") return true;
  if (s == "false") return false;
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (!s.empty() && end == s.c_str() + s.size()) return x;
  return s;
}

}  // namespace

nlohmann::json table_json(const Table& table) {
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [k, v] : table.meta) meta[k] = cell(v);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[table.columns[i]] = cell(row[i]);
    rows.push_back(std::move(r));
  }
  return {{"name", table.name}, {"meta", meta}, {"columns", table.columns}, {"rows", rows}};
}

nlohmann::json run_json(const RunRecord& record) {
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& t : record.tables) tables.push_back(table_json(t));
  return {{"command", record.command},
          {"config_hash", record.config_hash},
          {"seed", record.seed},
          {"seed_source", record.seed_source},
          {"workers", record.workers},
          {"version", record.version},
          {"timestamp", record.timestamp},
          {"files", record.files},
          {"warnings", record.warnings},
          {"tables", tables}};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace randcurv::cli
