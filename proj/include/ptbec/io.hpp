#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ptbec/types.hpp"

namespace ptbec::io {

inline constexpr const char* kVersion = "0.1.0";

enum class Format { Csv, Json };

const char* to_string(Format f) noexcept;
Format format_from_string(const std::string& name);

/// Integers stay integers on a round trip; doubles always carry a decimal
/// point or exponent.
using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();

  void add_row(std::vector<Cell> row);
};

/// Appends `<name>_re` and `<name>_im` cells.
void push_complex(std::vector<Cell>& row, Complex z);
std::vector<std::string> complex_columns(const std::string& name);

/// CSV: a first line `# meta: <json>`, a header row, then one line per row.
/// JSON: {"meta": {...}, "records": [{column: value}, ...]}.
void write(std::ostream& os, const Table& table, Format format);
Table read(std::istream& is, Format format);

/// Writes to `path`, or to stdout when the path is empty or "-".
void write_file(const std::string& path, const Table& table, Format format);

}  // namespace ptbec::io
