#include "kdsqnm/table.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "kdsqnm/error.hpp"

namespace kdsqnm {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw Error(ErrorCode::InvalidArgument, "table row width does not match the header");
  }
  rows.push_back(std::move(row));
}

OutputFormat parse_output_format(const std::string& text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw Error(ErrorCode::InvalidArgument, "unknown output format '" + text + "' (expected csv or json)");
}

std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string cell_text(const Cell& c) {
  struct Visitor {
    std::string operator()(double x) const { return format_double(x); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(bool x) const { return x ? "true" : "false"; }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

void write_csv_line(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_quote(fields[i]);
  }
  os << '\n';
}

nlohmann::ordered_json cell_json(const Cell& c) {
  struct Visitor {
    nlohmann::ordered_json operator()(double x) const {
      if (!std::isfinite(x)) return format_double(x);
      return x;
    }
    nlohmann::ordered_json operator()(std::int64_t x) const { return x; }
    nlohmann::ordered_json operator()(bool x) const { return x; }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

}  // namespace

void write_csv(const Table& t, std::ostream& os) {
  write_csv_line(os, t.columns);
  std::vector<std::string> fields;
  for (const auto& row : t.rows) {
    fields.clear();
    for (const auto& c : row) fields.push_back(cell_text(c));
    write_csv_line(os, fields);
  }
}

void write_json(const Table& t, std::ostream& os) {
  auto object = [&t](const std::vector<Cell>& row) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) o[t.columns[i]] = cell_json(row[i]);
    return o;
  };
  nlohmann::ordered_json doc;
  if (t.rows.size() == 1) {
    doc = object(t.rows.front());
  } else {
    doc = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) doc.push_back(object(row));
  }
  os << doc.dump(2) << '\n';
}

void write_table(const Table& t, OutputFormat f, std::ostream& os) {
  if (f == OutputFormat::csv) {
    write_csv(t, os);
  } else {
    write_json(t, os);
  }
}

}  // namespace kdsqnm
