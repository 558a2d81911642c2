#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "ptbec/io.hpp"

using namespace ptbec;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "ptbec-cli");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

io::Table parse(const std::string& text, io::Format fmt = io::Format::Csv) {
  std::istringstream is(text);
  return io::read(is, fmt);
}

std::size_t column(const io::Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i] == name) return i;
  }
  FAIL("missing column " << name);
  return 0;
}

double num(const io::Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return *d;
  return static_cast<double>(std::get<long long>(c));
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(call({}).code == 2);
  CHECK(call({"bogus"}).code == 2);
  CHECK(call({"spectrum-matrix", "--gamma-range", "0:1:x"}).code == 2);
  CHECK(call({"spectrum-matrix", "--g", "-1"}).code == 2);
  CHECK(call({"spectrum-matrix", "--format", "xml"}).code == 2);
  CHECK(call({"acceptance", "--only", "12"}).code == 2);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("spectrum-matrix") {
  const Result r = call({"spectrum-matrix", "--g", "1.2", "--gamma-range", "0:1:11"});
  REQUIRE(r.code == 0);
  const io::Table t = parse(r.out);
  REQUIRE(t.rows.size() == 11);
  const std::size_t gamma = column(t, "gamma");
  const std::size_t e4 = column(t, "E4_re");
  const std::size_t e3 = column(t, "E3_re");
  const std::size_t e3i = column(t, "E3_im");
  for (const auto& row : t.rows) {
    if (std::abs(num(row[gamma]) - 0.8) < 1e-12) {
      CHECK(num(row[e3]) == doctest::Approx(0.6));
      CHECK(num(row[e4]) == doctest::Approx(0.6));
    }
    if (num(row[gamma]) > 0.85 && num(row[gamma]) < 0.95) CHECK(std::abs(num(row[e3i])) > 1e-3);
  }

  const Result j = call({"spectrum-matrix", "--g", "1.2", "--gamma-range", "0:1:11", "--format", "json"});
  REQUIRE(j.code == 0);
  const io::Table tj = parse(j.out, io::Format::Json);
  CHECK(tj.rows == t.rows);
}

TEST_CASE("encircle with the matrix model") {
  const Result r = call({"encircle", "--provider", "matrix", "--g", "1.2", "--contour-center", "0.8",
                         "--contour-radius", "0.04"});
  REQUIRE(r.code == 0);
  const io::Table t = parse(r.out);
  CHECK(t.meta["classification"] == "EP2_PAIR");
  CHECK(t.meta["eigenvector_mapping"] == t.meta["mapping"]);
  CHECK(r.err.find("EP2_PAIR") != std::string::npos);
  CHECK(t.rows.size() >= 65);

  const Result bad = call({"encircle", "--provider", "matrix", "--g", "1.2", "--contour-center", "0.78",
                           "--contour-radius", "0.02"});
  CHECK(bad.code == 1);
  CHECK(!bad.err.empty());
}

TEST_CASE("encircle with the appendix matrix") {
  const Result r = call({"encircle", "--provider", "appendix", "--parameter", "eps", "--contour-radius", "1e-3"});
  REQUIRE(r.code == 0);
  CHECK(parse(r.out).meta["classification"] == "EP3_CYCLE");
}

TEST_CASE("scalar-product") {
  const Result r = call({"scalar-product", "--g", "0.2", "--gamma-range", "0:1:5"});
  REQUIRE(r.code == 0);
  const io::Table t = parse(r.out);
  REQUIRE(t.rows.size() == 5);
  const auto& first = t.rows.front();
  CHECK(num(first[column(t, "sp_re")]) == doctest::Approx(1.1 / std::sqrt(2.04)));
  CHECK(num(first[column(t, "series_c0")]) == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(std::get<long long>(first[column(t, "real")]) == 1);
  CHECK(std::get<long long>(t.rows.back()[column(t, "real")]) == 0);
}

TEST_CASE("linear gpe spectrum") {
  const Result r = call({"spectrum-gpe", "--g", "0", "--gamma-range", "0:0.3:3"});
  REQUIRE(r.code == 0);
  const io::Table t = parse(r.out);
  const std::size_t kappa = column(t, "kappa_re");
  const std::size_t status = column(t, "status");
  CHECK(t.rows.size() >= 6);
  for (const auto& row : t.rows) {
    CHECK(std::get<std::string>(row[status]) == "ok");
    CHECK(num(row[kappa]) > 0.0);
  }
}

TEST_CASE("output is deterministic") {
  const std::vector<std::string> args{"spectrum-matrix", "--g", "0.2", "--gamma-range", "0:1:21"};
  CHECK(call(args).out == call(args).out);
}
