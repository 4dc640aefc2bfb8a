#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace kdsqnm {

using Cell = std::variant<double, std::int64_t, bool, std::string>;

/// Column-ordered result table shared by the CLI and the verification harness.
struct Table {
  std::vector<std::string> columns;  ///< snake-case keys
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

enum class OutputFormat { csv, json };

OutputFormat parse_output_format(const std::string& text);
std::string to_string(OutputFormat f);

/// 17 significant digits, '.' decimal; non-finite values as inf, -inf, nan.
std::string format_double(double x);

/// RFC-4180: header line then one line per row, CRLF-free ('\n' terminated).
void write_csv(const Table& t, std::ostream& os);

/// A single row is written as a flat object, several rows as an array of flat
/// objects. Non-finite doubles are written as the strings "inf", "-inf", "nan".
void write_json(const Table& t, std::ostream& os);

void write_table(const Table& t, OutputFormat f, std::ostream& os);

}  // namespace kdsqnm
