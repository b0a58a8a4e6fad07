#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "doctest.h"
#include "nevlab/config.hpp"
#include "nevlab/io.hpp"
#include "nevlab/runner.hpp"

using namespace nevlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("nevlab-test-" + tag + "-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_SUITE("config_io") {

TEST_CASE("config parsing, accessors, and stable serialization") {
  const std::string text =
      "# run setup\n"
      "\n"
      "grid.r_min = 2\n"
      "name = flat:1\n"
      "flag = true\n"
      "list = [1, 2.5, 4]\n"
      "count = 7\n";
  auto cfg = config::Config::parse(text);
  CHECK(cfg.get_double("grid.r_min", 0.0) == 2.0);
  CHECK(cfg.get_string("name", "") == "flat:1");
  CHECK(cfg.get_bool("flag", false));
  CHECK(cfg.get_int("count", 0) == 7);
  CHECK(cfg.get_list("list", {}) == std::vector<double>{1.0, 2.5, 4.0});
  CHECK_FALSE(cfg.has("missing"));
  CHECK(cfg.get_double("missing", 3.5) == 3.5);
  CHECK(cfg.require_string("name") == "flat:1");
  CHECK_THROWS_AS(cfg.require_string("missing"), std::invalid_argument);

  cfg.set("bare", "1,2,3");
  CHECK(cfg.get_list("bare", {}) == std::vector<double>{1.0, 2.0, 3.0});
  cfg.set("grid.r_min", "3");
  CHECK(cfg.get_double("grid.r_min", 0.0) == 3.0);

  const std::string ser = cfg.serialize();
  CHECK(ser.rfind("bare", 0) == 0);  // keys come out sorted
  auto again = config::Config::parse(ser);
  CHECK(again.hash() == cfg.hash());
  CHECK(again.hash_hex() == cfg.hash_hex());
  CHECK(again.serialize() == ser);

  TempDir tmp("cfg");
  std::ofstream(tmp.path / "a.cfg") << text;
  CHECK(config::Config::load((tmp.path / "a.cfg").string()).hash() ==
        config::Config::parse(text).hash());
}

TEST_CASE("radius grids") {
  config::Config cfg;
  cfg.set("grid.r_min", "1");
  cfg.set("grid.r_max", "8");
  cfg.set("grid.count", "4");
  cfg.set("grid.spacing", "log");
  auto g = config::radius_grid(cfg, 2.0, 50.0, 12);
  REQUIRE(g.size() == 4);
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(g[1] == doctest::Approx(2.0));
  CHECK(g[3] == doctest::Approx(8.0));

  cfg.set("grid.spacing", "linear");
  cfg.set("grid.r_max", "7");
  auto lin = config::radius_grid(cfg, 2.0, 50.0, 12);
  REQUIRE(lin.size() == 4);
  CHECK(lin[1] == doctest::Approx(3.0));
  CHECK(lin[2] == doctest::Approx(5.0));

  config::Config empty;
  auto def = config::radius_grid(empty, 2.0, 50.0, 12);
  REQUIRE(def.size() == 12);
  CHECK(def.front() == doctest::Approx(2.0));
  CHECK(def.back() == doctest::Approx(50.0));
}

TEST_CASE("doubles round-trip through their printed form") {
  for (double v : {0.1, 1.0 / 3.0, 2.0, -1.72e-300, 12345678.9, 6.02e23}) {
    const std::string s = io::format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(io::format_double(0.5) == "0.5");
}

TEST_CASE("csv files are byte-stable without timestamps") {
  TempDir tmp("csv");
  auto write_one = [&](const fs::path& p) {
    io::CsvWriter csv(p, "cafe1234", 7, false);
    csv.header({"tag", "v"});
    csv.row({1.5, 0.1});
    csv.row_tagged("x", {2.0});
  };
  write_one(tmp.path / "a.csv");
  write_one(tmp.path / "b.csv");
  const std::string a = slurp(tmp.path / "a.csv");
  CHECK(a == slurp(tmp.path / "b.csv"));
  CHECK(a.rfind("#", 0) == 0);
  CHECK(a.find("cafe1234") != std::string::npos);
  CHECK(a.find("tag,v\n") != std::string::npos);
  CHECK(a.find("1.5,0.1\n") != std::string::npos);
  CHECK(a.find("x,2\n") != std::string::npos);
}

TEST_CASE("svg plots are self-contained") {
  TempDir tmp("svg");
  io::Series s{"alpha", {1.0, 2.0, 3.0}, {0.5, 0.25, 0.75}};
  io::PlotOptions po;
  po.title = "demo";
  po.x_label = "r";
  po.y_label = "value";
  po.shaded_x = {{1.5, 2.0}};
  io::write_svg_plot(tmp.path / "p.svg", {s}, po);
  const std::string svg = slurp(tmp.path / "p.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("alpha") != std::string::npos);
  CHECK(svg.find("rect") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("runner rejects bad invocations up front") {
  TempDir tmp("runner");
  runner::RunOptions bad;
  bad.subcommand = "frobnicate";
  bad.out_root = tmp.path;
  CHECK_THROWS_AS(runner::run(bad), std::invalid_argument);

  runner::RunOptions fmt;
  fmt.subcommand = "fmt";
  fmt.out_root = tmp.path;
  CHECK_THROWS_AS(runner::run(fmt), std::invalid_argument);  // no seed
}

TEST_CASE("ode subcommand writes its artifact tree") {
  TempDir tmp("ode");
  runner::RunOptions opts;
  opts.subcommand = "ode-check";
  opts.out_root = tmp.path;
  opts.reproducible = true;
  CHECK(runner::run(opts) == runner::kExitOk);
  const fs::path dir = tmp.path / ("ode-check-" + opts.cfg.hash_hex());
  CHECK(fs::exists(dir / "ode_check.csv"));
}

TEST_CASE("repeated seeded runs produce byte-identical artifacts") {
  TempDir tmp("repro");
  auto run_once = [&](const std::string& tag) {
    runner::RunOptions opts;
    opts.subcommand = "fmt";
    opts.out_root = tmp.path / tag;
    opts.reproducible = true;
    opts.cfg.set("seed", "7");
    opts.cfg.set("model", "flat:1");
    opts.cfg.set("map", "map:id");
    opts.cfg.set("divisor", "p1:points=[2]");
    opts.cfg.set("grid.r_min", "2");
    opts.cfg.set("grid.r_max", "8");
    opts.cfg.set("grid.count", "3");
    opts.cfg.set("n_paths", "300");
    CHECK(runner::run(opts) == runner::kExitOk);
    return slurp(tmp.path / tag / ("fmt-" + opts.cfg.hash_hex()) / "fmt.csv");
  };
  const std::string first = run_once("one");
  const std::string second = run_once("two");
  CHECK(first == second);
  CHECK(first.find("component") != std::string::npos);
}

}  // TEST_SUITE
