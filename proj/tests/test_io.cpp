#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "ptbec/io.hpp"

using namespace ptbec;

namespace {

io::Table sample() {
  io::Table t;
  t.columns = {"x", "n", "label", "z_re", "z_im"};
  t.meta = {{"command", "test"}, {"g", 0.1}, {"list", {1, 2, 3}}};
  t.add_row({0.1, 3LL, "plain", 1.0, -0.0});
  t.add_row({1e-300, -7LL, "with, comma \"and quote\"", std::nextafter(1.0, 2.0), 2.5e17});
  t.add_row({std::numeric_limits<double>::quiet_NaN(), 0LL, "1.5", std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity()});
  t.add_row({0.30714691162109375, 12345678901LL, "", 1.0 / 3.0, -2.0 / 3.0});
  return t;
}

bool same(const io::Cell& a, const io::Cell& b) {
  if (a.index() != b.index()) return false;
  if (const double* x = std::get_if<double>(&a)) {
    const double y = std::get<double>(b);
    if (std::isnan(*x)) return std::isnan(y);
    return *x == y && std::signbit(*x) == std::signbit(y);
  }
  return a == b;
}

void round_trip(io::Format f) {
  const io::Table t = sample();
  std::stringstream ss;
  io::write(ss, t, f);
  const io::Table r = io::read(ss, f);
  CHECK(r.columns == t.columns);
  CHECK(r.meta == t.meta);
  REQUIRE(r.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      INFO("row " << i << " column " << t.columns[j]);
      CHECK(same(r.rows[i][j], t.rows[i][j]));
    }
  }
}

}  // namespace

TEST_CASE("csv round trip is lossless") { round_trip(io::Format::Csv); }

TEST_CASE("json round trip is lossless") { round_trip(io::Format::Json); }

TEST_CASE("csv layout") {
  std::stringstream ss;
  io::write(ss, sample(), io::Format::Csv);
  std::string meta, header, first;
  std::getline(ss, meta);
  std::getline(ss, header);
  std::getline(ss, first);
  CHECK(meta.rfind("# meta: {", 0) == 0);
  CHECK(header == "x,n,label,z_re,z_im");
  CHECK(first == "0.1,3,plain,1.0,-0.0");
}

TEST_CASE("json layout") {
  std::stringstream ss;
  io::write(ss, sample(), io::Format::Json);
  const auto doc = nlohmann::json::parse(ss);
  CHECK(doc.at("meta").at("command") == "test");
  CHECK(doc.at("records").size() == 4);
  CHECK(doc.at("records")[0].at("n") == 3);
}

TEST_CASE("rows must match the columns") {
  io::Table t;
  t.columns = {"a", "b"};
  CHECK_THROWS_AS(t.add_row({1.0}), Error);
}

TEST_CASE("complex helpers") {
  std::vector<io::Cell> row;
  io::push_complex(row, Complex(1.5, -2.0));
  CHECK(row.size() == 2);
  CHECK(std::get<double>(row[1]) == -2.0);
  CHECK(io::complex_columns("E2") == std::vector<std::string>{"E2_re", "E2_im"});
  CHECK(io::format_from_string("json") == io::Format::Json);
  CHECK_THROWS_AS(io::format_from_string("xml"), Error);
}
