#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "ptbec/io.hpp"

namespace ptbec::io {

using nlohmann::ordered_json;

const char* to_string(Format f) noexcept { return f == Format::Csv ? "csv" : "json"; }

Format format_from_string(const std::string& name) {
  if (name == "csv" || name == "CSV") return Format::Csv;
  if (name == "json" || name == "JSON") return Format::Json;
  throw Error(Errc::InvalidConfig, "unknown format '" + name + "'");
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw Error(Errc::InvalidConfig, "row has " + std::to_string(row.size()) + " cells, table has " +
                                         std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

void push_complex(std::vector<Cell>& row, Complex z) {
  row.emplace_back(z.real());
  row.emplace_back(z.imag());
}

std::vector<std::string> complex_columns(const std::string& name) {
  return {name + "_re", name + "_im"};
}

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

Cell parse_cell(const std::string& s, bool quoted);

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos && !s.empty() &&
      std::holds_alternative<std::string>(parse_cell(s, false))) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_cell(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return quote(std::get<std::string>(c));
}

std::vector<std::pair<std::string, bool>> split_csv(const std::string& line) {
  std::vector<std::pair<std::string, bool>> out;
  std::string cur;
  bool quoted = false, in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = quoted = true;
    } else if (c == ',') {
      out.emplace_back(cur, quoted);
      cur.clear();
      quoted = false;
    } else {
      cur += c;
    }
  }
  out.emplace_back(cur, quoted);
  return out;
}

Cell parse_cell(const std::string& s, bool quoted) {
  if (quoted) return s;
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  const char* b = s.data();
  const char* e = b + s.size();
  if (s.find_first_of(".e") == std::string::npos) {
    long long i = 0;
    const auto r = std::from_chars(b, e, i);
    if (r.ec == std::errc() && r.ptr == e && !s.empty()) return i;
  } else {
    double d = 0.0;
    const auto r = std::from_chars(b, e, d);
    if (r.ec == std::errc() && r.ptr == e) return d;
  }
  return s;
}

ordered_json to_json(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_double(*d);
  }
  if (const long long* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

}  // namespace

void write(std::ostream& os, const Table& table, Format format) {
  if (format == Format::Csv) {
    os << "# meta: " << table.meta.dump() << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      os << (i ? "," : "") << quote(table.columns[i]);
    }
    os << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
      os << '\n';
    }
    return;
  }
  ordered_json doc;
  doc["meta"] = table.meta;
  doc["records"] = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json rec = ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) rec[table.columns[i]] = to_json(row[i]);
    doc["records"].push_back(std::move(rec));
  }
  os << doc.dump(1) << '\n';
}

Table read(std::istream& is, Format format) {
  Table t;
  if (format == Format::Csv) {
    std::string line;
    const std::string tag = "# meta: ";
    if (!std::getline(is, line) || line.rfind(tag, 0) != 0) {
      throw Error(Errc::InvalidConfig, "csv input lacks the meta line");
    }
    t.meta = ordered_json::parse(line.substr(tag.size()));
    if (!std::getline(is, line)) throw Error(Errc::InvalidConfig, "csv input lacks a header");
    for (auto& [name, quoted] : split_csv(line)) t.columns.push_back(name);
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      std::vector<Cell> row;
      for (auto& [text, quoted] : split_csv(line)) row.push_back(parse_cell(text, quoted));
      t.add_row(std::move(row));
    }
    return t;
  }
  const ordered_json doc = ordered_json::parse(is);
  t.meta = doc.at("meta");
  for (const auto& rec : doc.at("records")) {
    if (t.columns.empty()) {
      for (const auto& item : rec.items()) t.columns.push_back(item.key());
    }
    std::vector<Cell> row;
    for (const auto& name : t.columns) {
      const ordered_json& v = rec.at(name);
      if (v.is_number_integer()) {
        row.emplace_back(v.get<long long>());
      } else if (v.is_number()) {
        row.emplace_back(v.get<double>());
      } else {
        const std::string s = v.get<std::string>();
        const Cell c = parse_cell(s, false);
        row.push_back(std::holds_alternative<double>(c) && !std::isfinite(std::get<double>(c)) ? c : Cell(s));
      }
    }
    t.add_row(std::move(row));
  }
  return t;
}

void write_file(const std::string& path, const Table& table, Format format) {
  if (path.empty() || path == "-") {
    write(std::cout, table, format);
    return;
  }
  std::ofstream os(path);
  if (!os) throw Error(Errc::InvalidConfig, "cannot open '" + path + "' for writing");
  write(os, table, format);
}

}  // namespace ptbec::io
