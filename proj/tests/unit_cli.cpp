#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "eamac/cli.hpp"
#include "eamac/covert_planner.hpp"
#include "eamac/errors.hpp"

using namespace eamac;
using namespace eamac::cli;
namespace fs = std::filesystem;

namespace {

RunConfig config(const std::string& command, const std::string& text = "") {
  return make_config(command, parse_key_values(text));
}

// Value of `key = ...` in a record-format output.
std::string field(const std::string& out, const std::string& key) {
  std::istringstream in(out);
  std::string line;
  const std::string prefix = key + " = ";
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  FAIL("missing field " << key);
  return {};
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "eamac");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return main_entry(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "eamac_unit_cli";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("key-value parsing") {
  const auto kv = parse_key_values("# comment\n tau = 0.3  # trailing\n\nkappa=0.2\n");
  CHECK(kv.size() == 2);
  CHECK(kv.at("tau") == "0.3");
  CHECK(kv.at("kappa") == "0.2");
  CHECK_THROWS_AS(parse_key_values("tau = 1\ntau = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_key_values("just words\n"), ConfigError);
  CHECK_THROWS_AS(parse_key_values(" = 3\n"), ConfigError);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(config("region", "alpha = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(config("region", "tau = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(config("region", "tau = abc\n"), ConfigError);
  CHECK_THROWS_AS(config("region", "n_s = -1\n"), ConfigError);
  CHECK_THROWS_AS(config("region", "cutoff = 80\n"), ConfigError);
  CHECK_THROWS_AS(config("plan", "delta = 0\n"), ConfigError);
  CHECK_NOTHROW(config("budget", "delta = 0\n"));
  CHECK_THROWS_AS(config("sweep", "sweep.x = tau:0:1:1000\nsweep.y = kappa:0.1:0.9:1000\n"), ConfigError);
  CHECK_THROWS_AS(config("sweep", ""), ConfigError);
  CHECK_THROWS_AS(config("sweep", "sweep.x = tau:0:1\n"), ConfigError);
  CHECK_THROWS_AS(config("sweep", "sweep.x = bogus:0:1:3\n"), ConfigError);
  CHECK_THROWS_AS(config("validate", "tv.samples = 0\n"), ConfigError);

  const auto sw = config("sweep", "sweep.target = budget\nsweep.x = n:100:300:3\n");
  REQUIRE(sw.axes.size() == 1);
  CHECK(sw.axes[0].at(0) == 100.0);
  CHECK(sw.axes[0].at(1) == 200.0);
  CHECK(sw.axes[0].at(2) == 300.0);
}

TEST_CASE("resolved config leaves out the worker count") {
  auto a = config("region", "workers = 1\n");
  auto b = config("region", "workers = 4\n");
  CHECK(a.workers == 1);
  CHECK(b.workers == 4);
  CHECK(resolved_config(a) == resolved_config(b));
  for (const auto& [k, v] : resolved_config(a)) CHECK(k != "workers");
}

TEST_CASE("region output") {
  const auto out = run(config("region"));
  CHECK(out.rfind("# eamac " + version(), 0) == 0);
  CHECK(out.find("[config]") != std::string::npos);
  CHECK(field(out, "tau") == "0.5");
  CHECK(field(out, "vertex_count") == "5");

  const auto zero = run(config("region", "n_s = 0\n"));
  CHECK(field(zero, "vertex_count") == "1");
  CHECK(zero.find("row = vertex, 0, 0, 0") != std::string::npos);

  const auto full = run(config("region", "tau = 1\n"));
  CHECK(field(full, "Y-bound") == "0");

  auto bits_cfg = config("region");
  bits_cfg.bits = true;
  const double nats = std::stod(field(out, "X-bound"));
  const double bits = std::stod(field(run(bits_cfg), "X-bound"));
  CHECK(bits == doctest::Approx(nats / std::log(2.0)).epsilon(1e-15));

  auto svg_cfg = config("region");
  svg_cfg.format = Format::svg;
  const auto svg = run(svg_cfg);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<polygon") != std::string::npos);

  auto csv_cfg = config("region");
  csv_cfg.format = Format::csv;
  const auto csv = run(csv_cfg);
  CHECK(csv.find("# config.tau = 0.5") != std::string::npos);
  CHECK(csv.find("kind,index,r_x,r_y") != std::string::npos);
}

TEST_CASE("svg only for regions") {
  auto cfg = config("budget");
  cfg.format = Format::svg;
  CHECK_THROWS_AS(run(cfg), ConfigError);
}

TEST_CASE("budget and plan records match the library") {
  const auto zero = run(config("budget", "delta = 0\n"));
  CHECK(field(zero, "budget") == "0");

  const auto out = run(config("plan"));
  covert::PlanInputs in;
  const auto plan = covert::make_plan(in);
  CHECK(std::stod(field(out, "log_M_X1")) == plan.layer1.log_mx1);
  CHECK(std::stod(field(out, "log_M_Y2")) == plan.layer2.log_my2);
  CHECK(std::stod(field(out, "log_M_X1S_XM_Y1S_Y")) == plan.layer1.log_keys_total);
  CHECK(std::stoll(field(out, "l_x")) == plan.layer2.l_x);
  CHECK(std::stod(field(out, "budget")) == plan.budget);

  CHECK_THROWS_AS(run(config("plan", "s = 0.5\n")), InfeasibleError);
}

TEST_CASE("covert rectangle output") {
  const auto out = run(config("covert-rect"));
  CHECK(std::stod(field(out, "X-bound")) == doctest::Approx(0.01 * std::log(100.0) / 6.0).epsilon(1e-14));
}

TEST_CASE("sweep rows follow grid order for any worker count") {
  const std::string text = "sweep.target = covert-rect\nsweep.x = tau:0:1:5\nsweep.y = s:0.01:0.1:3\n";
  auto one = config("sweep", text);
  auto four = config("sweep", text);
  four.workers = 4;
  const auto a = run(one);
  CHECK(a == run(four));
  CHECK(a == run(one));
  CHECK(field(a, "points") == "15");
}

TEST_CASE("validate needs a seed and is reproducible") {
  CHECK_THROWS_AS(run(config("validate")), ConfigError);
  auto cfg = config("validate", "seed = 5\n");
  const auto a = run(cfg);
  cfg.workers = 4;
  CHECK(a == run(cfg));
  CHECK(field(a, "all_pass") == "true");
}

TEST_CASE("exit codes") {
  const auto out = scratch("region.txt");
  CHECK(invoke({"region", "--out", out.string()}) == kOk);
  CHECK(slurp(out).find("[result]") != std::string::npos);

  const auto bad = scratch("bad.cfg");
  std::ofstream(bad) << "tau = 7\n";
  CHECK(invoke({"region", "--config", bad.string()}) == kConfigError);
  CHECK(invoke({"region", "--bogus"}) == kConfigError);
  CHECK(invoke({"region", "--config", (scratch("missing.cfg")).string()}) == kConfigError);
  CHECK(invoke({"validate", "--out", out.string()}) == kConfigError);

  const auto hot = scratch("hot.cfg");
  std::ofstream(hot) << "s = 0.5\n";
  CHECK(invoke({"plan", "--config", hot.string(), "--out", out.string()}) == kInfeasible);

  const auto trunc = scratch("trunc.cfg");
  std::ofstream(trunc) << "n_b = 20\ncutoff = 8\n";
  CHECK(invoke({"region", "--config", trunc.string(), "--out", out.string()}) == kNumericalError);

  const auto seeded = scratch("seeded.txt");
  CHECK(invoke({"validate", "--seed", "9", "--out", seeded.string()}) == kOk);
  CHECK(slurp(seeded).find("seed = 9") != std::string::npos);
}
