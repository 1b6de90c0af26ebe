#include "itp/config.hpp"

#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "itp/report_io.hpp"

using namespace itp;
using config::Config;

TEST_SUITE_BEGIN("config");

TEST_CASE("sectioned key=value text parses with comments and whitespace") {
  const Config c = Config::parse_text(
      "# leading comment\n"
      "[run]\n"
      "subcommand = decompose\n"
      "seed=42\n"
      "; another comment\n"
      "\n"
      "[measure]\n"
      "kind = gaussian\n"
      "sigma = 1.5\n"
      "label = two  words \n");
  CHECK(c.has_section("run"));
  CHECK(c.has("run", "seed"));
  CHECK_FALSE(c.has("run", "missing"));
  CHECK_FALSE(c.has_section("points"));
  CHECK(c.require("run", "subcommand") == "decompose");
  CHECK(c.require_int("run", "seed") == 42);
  CHECK(c.require_double("measure", "sigma") == 1.5);
  CHECK(c.get_str("measure", "kind", "x") == "gaussian");
  // interior whitespace survives, edges are trimmed
  CHECK(c.require("measure", "label") == "two  words");
  CHECK(c.line_of("measure", "sigma") == 9);
  c.finish();
}

TEST_CASE("defaults apply only when the key is absent") {
  const Config c = Config::parse_text("[run]\ndepth = 8\n");
  CHECK(c.get_int("run", "depth", 64) == 8);
  CHECK(c.get_int("run", "samples", 20000) == 20000);
  CHECK(c.get_double("run", "tol", 1e-10) == 1e-10);
  CHECK(c.get_u64("run", "seed", 7) == 7);
  CHECK_FALSE(c.get("run", "absent").has_value());
  c.finish();
}

TEST_CASE("malformed lines carry their line number") {
  const auto line_of_error = [](const std::string& text) {
    try {
      Config::parse_text(text);
    } catch (const ConfigError& e) {
      return e.line;
    }
    return -1;
  };
  CHECK(line_of_error("[run]\nnokey\n") == 2);
  CHECK(line_of_error("[run]\n= value\n") == 2);
  CHECK(line_of_error("key = outside\n") == 1);
  CHECK(line_of_error("[run]\na = 1\na = 2\n") == 3);
  CHECK(line_of_error("[run]\n[run]\n") == 2);
  CHECK(line_of_error("[]\n") == 1);
  CHECK(line_of_error("[run\n") == 1);
}

TEST_CASE("numeric accessors parse the full value or fail with context") {
  const Config c = Config::parse_text(
      "[n]\na = 12\nb = 2.5e-3\nc = 7x\nd = -3\ne = 99999999999\n");
  CHECK(c.require_int("n", "a") == 12);
  CHECK(c.require_double("n", "b") == 2.5e-3);
  CHECK(c.require_int("n", "d") == -3);
  CHECK_THROWS_AS(c.require_int("n", "c"), ConfigError);
  CHECK_THROWS_AS(c.require_double("n", "c"), ConfigError);
  CHECK_THROWS_AS(c.require_int("n", "e"), ConfigError);   // beyond int32
  CHECK_THROWS_AS(c.get_u64("n", "d", 0), ConfigError);    // negative
  try {
    (void)c.require_int("n", "c");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("n.c") != std::string::npos);
    CHECK(e.line == 4);
  }
  CHECK_THROWS_AS(c.require("n", "zz"), ConfigError);
}

TEST_CASE("finish rejects any unconsumed key by name and line") {
  const Config c = Config::parse_text("[run]\nsubcommand = algebra\ntypo = 1\n");
  CHECK(c.require("run", "subcommand") == "algebra");
  try {
    c.finish();
    FAIL("finish accepted an unknown key");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("typo") != std::string::npos);
    CHECK(e.line == 3);
  }
}

TEST_CASE("section key listing is ordered and does not consume") {
  const Config c = Config::parse_text("[points]\nx2 = b\nx1 = a\nx10 = c\n");
  CHECK(c.keys("points") == std::vector<std::string>{"x1", "x10", "x2"});
  CHECK(c.keys("absent").empty());
  CHECK_THROWS_AS(c.finish(), ConfigError);  // listing did not mark them used
  CHECK(c.require("points", "x1") == "a");
  CHECK(c.require("points", "x2") == "b");
  CHECK(c.require("points", "x10") == "c");
  c.finish();
}

TEST_CASE("field splitting handles repeated whitespace") {
  CHECK(config::split_fields("  1:0.5\t2:1.25  ") ==
        std::vector<std::string>{"1:0.5", "2:1.25"});
  CHECK(config::split_fields("").empty());
  CHECK(config::split_fields("   ").empty());
}

TEST_CASE("missing config files are reported as invalid input") {
  CHECK_THROWS_AS(Config::parse_file("/nonexistent/path.cfg"),
                  InvalidArgError);
}

TEST_CASE("csv assembly checks column counts and prints %.17g") {
  report::Csv csv({"a", "b"});
  csv.row({"1", report::fmt(1.0 / 3.0)});
  CHECK(csv.text() == "a,b\n1,0.33333333333333331\n");
  CHECK_THROWS_AS(csv.row({"only-one"}), InvalidArgError);
  CHECK(report::fmt(0.25) == "0.25");
  CHECK(report::fmt(3.1067797589878765e-05) == "3.1067797589878765e-05");
}

TEST_CASE("decomposition reports serialize with the schema header") {
  bm::DecompositionReport rep;
  rep.measure_key = "G:1";
  rep.depth = 4;
  rep.seed = 9;
  rep.samples = 10;
  rep.levels = {1, 2};
  rep.levels_pass = true;
  bm::McRow row;
  row.x = {{1, 0.5}};
  row.closed = {0.25, 0.0};
  row.estimate = {0.3, -0.1};
  row.radius = 0.4;
  row.pass = true;
  rep.mc.push_back(row);
  const std::string j = report::decomposition_to_json(rep);
  CHECK(j.find("\"schema\"") != std::string::npos);
  CHECK(j.find(report::kSchema) != std::string::npos);
  CHECK(j.find("\"kind\": \"decompose\"") != std::string::npos);
  CHECK(j.find("\"measure\": \"G:1\"") != std::string::npos);
  CHECK(j.back() == '\n');
  // identical reports serialize identically
  CHECK(report::decomposition_to_json(rep) == j);
}

TEST_CASE("plot scripts reference the csv they plot") {
  const std::string gp = report::residual_plot_script("tail.csv");
  CHECK(gp.find("tail.csv") != std::string::npos);
  CHECK(gp.find("logscale") != std::string::npos);
}

TEST_CASE("write_file round-trips bytes exactly") {
  const std::string path = "test_config_roundtrip.tmp";
  const std::string body = "line1\nline2\n";
  report::write_file(path, body);
  std::ifstream in(path, std::ios::binary);
  std::string back((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(back == body);
  std::remove(path.c_str());
  CHECK_THROWS_AS(report::write_file("/nonexistent-dir/f.txt", body),
                  InvalidArgError);
}

TEST_SUITE_END();
