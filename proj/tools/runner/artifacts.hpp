#pragma once

// CSV tables with '#' metadata and the per-run JSON summary.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace randcurv::cli {

/// Text form used in every artifact: %.15g, "nan" and "inf" spelled out.
std::string format_number(double x);

struct Table {
  std::string name;  // file stem
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_meta(const std::string& key, double value);
  void add_meta(const std::string& key, const std::string& value);
  void add_row(std::vector<std::string> cells);
};

/// "# key value" lines, then the header and the rows. Nothing run-dependent
/// (time, worker count) is written, so reruns are byte-identical.
void write_csv(std::ostream& out, const Table& table);

/// Rows as objects; cells that parse as numbers become JSON numbers.
nlohmann::json table_json(const Table& table);

struct RunRecord {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string seed_source;
  unsigned workers = 1;
  std::string version;
  std::string timestamp;  // UTC, ISO 8601
  std::vector<std::string> files;
  std::vector<Table> tables;
  std::vector<std::string> warnings;
};

nlohmann::json run_json(const RunRecord& record);

std::string utc_timestamp();

}  // namespace randcurv::cli
