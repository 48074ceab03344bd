#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace subdiff::cli {

// monostate is an empty cell
using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  Table(std::string name, std::vector<std::string> columns);
  /// Throws std::logic_error on a width mismatch.
  void add(std::vector<Cell> row);
};

enum class Format { csv, json };

/// %.17g; nan and inf are spelled "nan", "inf", "-inf".
std::string format_number(double v);

/// RFC 4180: CRLF record ends, fields quoted when they hold , " CR or LF.
void write_csv(std::ostream& os, const Table& t);
/// {"name":..., "columns":[...], "rows":[[...], ...]}; non-finite numbers
/// and empty cells become null.
void write_json(std::ostream& os, const Table& t);

/// All tables to one stream: CSV tables each preceded by a "# name" line and
/// separated by a blank line, or one JSON object {"tables": [...]}.
void write_tables(std::ostream& os, const std::vector<Table>& tables, Format f);
/// One file per table, <dir>/<name>.csv or .json. Creates dir.
void write_tables(const std::filesystem::path& dir, const std::vector<Table>& tables, Format f);

}  // namespace subdiff::cli
