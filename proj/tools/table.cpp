#include "table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace subdiff::cli {

Table::Table(std::string n, std::vector<std::string> cols)
    : name(std::move(n)), columns(std::move(cols)) {}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::logic_error("table " + name + ": row has " + std::to_string(row.size()) +
                           " cells for " + std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(row));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string cell_text(const Cell& c) {
  struct {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const { return s; }
  } visit;
  return std::visit(visit, c);
}

std::string cell_json(const Cell& c) {
  struct {
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(double v) const {
      return std::isfinite(v) ? format_number(v) : "null";
    }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const { return nlohmann::json(s).dump(); }
  } visit;
  return std::visit(visit, c);
}

void write_record(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_field(fields[i]);
  }
  os << "\r\n";
}

}  // namespace

void write_csv(std::ostream& os, const Table& t) {
  write_record(os, t.columns);
  std::vector<std::string> fields;
  for (const auto& row : t.rows) {
    fields.clear();
    for (const auto& c : row) fields.push_back(cell_text(c));
    write_record(os, fields);
  }
}

void write_json(std::ostream& os, const Table& t) {
  os << "{\"name\":" << nlohmann::json(t.name).dump() << ",\"columns\":[";
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    os << (i ? "," : "") << nlohmann::json(t.columns[i]).dump();
  os << "],\"rows\":[";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    os << (r ? ",\n" : "\n") << '[';
    for (std::size_t i = 0; i < t.rows[r].size(); ++i)
      os << (i ? "," : "") << cell_json(t.rows[r][i]);
    os << ']';
  }
  os << "]}";
}

void write_tables(std::ostream& os, const std::vector<Table>& tables, Format f) {
  if (f == Format::csv) {
    for (std::size_t i = 0; i < tables.size(); ++i) {
      if (i) os << "\r\n";
      os << "# " << tables[i].name << "\r\n";
      write_csv(os, tables[i]);
    }
    return;
  }
  os << "{\"tables\":[";
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i) os << ",\n";
    write_json(os, tables[i]);
  }
  os << "]}\n";
}

void write_tables(const std::filesystem::path& dir, const std::vector<Table>& tables, Format f) {
  std::filesystem::create_directories(dir);
  for (const auto& t : tables) {
    const auto path = dir / (t.name + (f == Format::csv ? ".csv" : ".json"));
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    if (f == Format::csv) {
      write_csv(os, t);
    } else {
      write_json(os, t);
      os << '\n';
    }
    if (!os) throw std::runtime_error("write to " + path.string() + " failed");
  }
}

}  // namespace subdiff::cli
