#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "rydnhqc/io.hpp"

using namespace rydnhqc::io;

TEST_CASE("format_number round trips") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, i % 30 - 15);
    CHECK(parse_double(format_number(x)) == x);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(3.0) == "3");
}

TEST_CASE("csv header and round trip") {
  ResultTable t{"demo", {{"t", "T"}, {"F_avg", "1"}}, {}};
  t.add_row({0.0, 1.0});
  t.add_row({0.125, 0.99431});
  std::ostringstream out;
  write_csv(t, out);
  CHECK(out.str() == "# t:T,F_avg:1\n0,1\n0.125,0.99431\n");
  std::istringstream in(out.str());
  const ResultTable back = read_csv(in, "demo");
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);
  CHECK(back.column("F_avg")[1] == 0.99431);
  CHECK_THROWS_AS(t.column("missing"), std::out_of_range);
}

TEST_CASE("table rejects bad rows") {
  ResultTable t{"x", {{"a", "1"}}, {}};
  CHECK_THROWS_AS(t.add_row({1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(t.add_row({std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
  std::istringstream no_header("1,2\n");
  CHECK_THROWS_AS(read_csv(no_header), IoError);
  std::istringstream bad_cell("# a:1\nabc\n");
  CHECK_THROWS_AS(read_csv(bad_cell), IoError);
}

TEST_CASE("csv files on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "rydnhqc_test_io";
  std::filesystem::create_directories(dir);
  ResultTable t{"fig", {{"x", "1"}}, {}};
  t.add_row({2.5});
  const auto path = write_csv(t, dir);
  CHECK(path.filename() == "fig.csv");
  CHECK(read_csv(path).rows == t.rows);
  CHECK(read_csv(path).name == "fig");
  CHECK_THROWS_AS(read_csv(dir / "absent.csv"), IoError);
  CHECK_THROWS_AS(write_csv(t, dir / "no" / "such" / "dir"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("config document parse and serialize") {
  const std::string text =
      "experiment = \"not-gate\"  # comment\n"
      "\n"
      "[run]\n"
      "steps = 1000\n"
      "out = \"a # b\"\n"
      "[sweep]\n"
      "epsilons = [-0.1, 0, 0.1]\n";
  const ConfigDocument d = ConfigDocument::parse(text);
  CHECK(parse_string(*d.get("", "experiment")) == "not-gate");
  CHECK(parse_int(*d.get("run", "steps")) == 1000);
  CHECK(parse_string(*d.get("run", "out")) == "a # b");
  CHECK(parse_double_list(*d.get("sweep", "epsilons")) == std::vector<double>{-0.1, 0.0, 0.1});
  CHECK_FALSE(d.get("run", "missing"));
  const ConfigDocument again = ConfigDocument::parse(d.serialize());
  CHECK(again.serialize() == d.serialize());
  CHECK(again.sections() == d.sections());

  ConfigDocument late;
  late.set("run", "steps", "1");
  late.set("", "seed", "2");
  CHECK(late.serialize() == "seed = 2\n\n[run]\nsteps = 1\n");
}

TEST_CASE("config parse errors carry line numbers") {
  auto message = [](const std::string& text) {
    try {
      ConfigDocument::parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("a = 1\nb\n").find("line 2") != std::string::npos);
  CHECK(message("[run\n").find("line 1") != std::string::npos);
  CHECK(message("a = 1\na = 2\n").find("duplicate") != std::string::npos);
  CHECK(message("bad key = 1\n").find("bad key") != std::string::npos);
  CHECK(message("a =\n").find("missing value") != std::string::npos);
  CHECK_THROWS_AS(ConfigDocument::load("/nonexistent/config.toml"), ConfigError);
}

TEST_CASE("typed conversions") {
  CHECK(parse_double("+1.5") == 1.5);
  CHECK(parse_double(" 2e-3 ") == 0.002);
  CHECK_THROWS_AS(parse_double("1.5x"), ConfigError);
  CHECK_THROWS_AS(parse_double(""), ConfigError);
  CHECK_THROWS_AS(parse_int("1.5"), ConfigError);
  CHECK(parse_bool("true"));
  CHECK_THROWS_AS(parse_bool("yes"), ConfigError);
  CHECK_THROWS_AS(parse_string("unquoted"), ConfigError);
  CHECK(parse_double_list("[]").empty());
  CHECK_THROWS_AS(parse_double_list("1, 2"), ConfigError);
  CHECK(raw_list({0.5, -1.0}) == "[0.5, -1]");
  CHECK(quote("x") == "\"x\"");
  CHECK_THROWS_AS(quote("a\"b"), ConfigError);
}
