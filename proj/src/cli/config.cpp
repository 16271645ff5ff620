#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "eamac/cli.hpp"
#include "eamac/errors.hpp"

namespace eamac::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(fmt::format("{}: expected a finite number, got '{}'", key, v));
  }
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, v));
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(fmt::format("{}: expected an unsigned 64-bit integer, got '{}'", key, v));
  }
  return out;
}

const std::set<std::string> kMac{"tau", "kappa", "n_b"};
const std::set<std::string> kRegion{"n_s", "cutoff", "psk_order", "tail_tol", "boundary_points"};
const std::set<std::string> kPlan{"n", "alpha", "beta", "s", "mu_bar", "delta", "epsilon"};
const std::set<std::string> kSweepable{"tau", "kappa", "n_b", "n_s", "s", "n", "alpha", "beta",
                                       "delta", "mu_bar", "epsilon"};

std::set<std::string> keys_for(const std::string& command) {
  std::set<std::string> k = kMac;
  k.insert("workers");
  k.insert("seed");
  if (command == "region") k.insert(kRegion.begin(), kRegion.end());
  if (command == "covert-rect") k.insert("s");
  if (command == "budget") {
    for (const char* x : {"n", "delta", "alpha", "beta", "s"}) k.insert(x);
  }
  if (command == "plan") k.insert(kPlan.begin(), kPlan.end());
  if (command == "sweep") {
    k.insert(kRegion.begin(), kRegion.end());
    k.insert(kPlan.begin(), kPlan.end());
    for (const char* x : {"sweep.target", "sweep.x", "sweep.y"}) k.insert(x);
  }
  if (command == "validate") {
    for (const char* x : {"tv.n", "tv.samples", "tv.target"}) k.insert(x);
  }
  return k;
}

SweepAxis parse_axis(const std::string& key, const std::string& v) {
  // name:start:stop:points
  std::vector<std::string> parts;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(trim(item));
  if (parts.size() != 4) {
    throw ConfigError(fmt::format("{}: expected name:start:stop:points, got '{}'", key, v));
  }
  SweepAxis a;
  a.param = parts[0];
  if (!kSweepable.count(a.param)) {
    throw ConfigError(fmt::format("{}: '{}' is not a sweepable parameter", key, a.param));
  }
  a.start = parse_double(key, parts[1]);
  a.stop = parse_double(key, parts[2]);
  const long long pts = parse_int(key, parts[3]);
  if (pts < 1 || pts > 100000) throw ConfigError(fmt::format("{}: points must lie in [1, 100000]", key));
  a.points = static_cast<int>(pts);
  return a;
}

// Shortest text that round-trips to the same double.
std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

double SweepAxis::at(int i) const {
  if (points == 1) return start;
  const double t = static_cast<double>(i) / (points - 1);
  return start + (stop - start) * t;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(fmt::format("line {}: empty key or value", lineno));
    }
    if (!out.emplace(key, value).second) {
      throw ConfigError(fmt::format("line {}: duplicate key '{}'", lineno, key));
    }
  }
  return out;
}

RunConfig make_config(const std::string& command, const std::map<std::string, std::string>& keys) {
  static const std::set<std::string> commands{"region", "covert-rect", "budget", "plan", "sweep",
                                              "validate"};
  if (!commands.count(command)) throw ConfigError("unknown command '" + command + "'");
  const auto allowed = keys_for(command);
  for (const auto& [k, v] : keys) {
    if (!allowed.count(k)) throw ConfigError(fmt::format("unknown key '{}' for command {}", k, command));
  }

  RunConfig cfg;
  cfg.command = command;
  auto real = [&](const char* key, double& field) {
    if (auto it = keys.find(key); it != keys.end()) field = parse_double(key, it->second);
  };
  auto integer = [&](const char* key, auto& field) {
    if (auto it = keys.find(key); it != keys.end()) {
      field = static_cast<std::remove_reference_t<decltype(field)>>(parse_int(key, it->second));
    }
  };

  real("tau", cfg.tau);
  real("kappa", cfg.kappa);
  real("n_b", cfg.n_b);
  real("n_s", cfg.n_s);
  integer("cutoff", cfg.numerics.cutoff);
  integer("psk_order", cfg.numerics.psk_order);
  real("tail_tol", cfg.numerics.tail_tol);
  integer("boundary_points", cfg.boundary_points);
  real("n", cfg.plan.n);
  real("alpha", cfg.plan.alpha);
  real("beta", cfg.plan.beta);
  real("s", cfg.plan.s);
  real("mu_bar", cfg.plan.mu_bar);
  real("delta", cfg.plan.delta);
  real("epsilon", cfg.plan.epsilon);
  integer("tv.n", cfg.tv_n);
  integer("tv.samples", cfg.tv_samples);
  real("tv.target", cfg.tv_target);
  if (auto it = keys.find("workers"); it != keys.end()) {
    const long long w = parse_int("workers", it->second);
    if (w < 1 || w > 256) throw ConfigError("workers: must lie in [1, 256]");
    cfg.workers = static_cast<unsigned>(w);
  }
  if (auto it = keys.find("seed"); it != keys.end()) cfg.seed = parse_u64("seed", it->second);
  if (auto it = keys.find("sweep.target"); it != keys.end()) cfg.sweep_target = it->second;
  for (const char* axis : {"sweep.x", "sweep.y"}) {
    if (auto it = keys.find(axis); it != keys.end()) cfg.axes.push_back(parse_axis(axis, it->second));
  }

  // Field-level validation before any computation.
  try {
    cfg.plan.params = cfg.mac_params();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("channel parameters: ") + e.what());
  }
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  check(cfg.n_s >= 0.0, "n_s: must be >= 0");
  try {
    cfg.numerics.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("numerics: ") + e.what());
  }
  check(cfg.boundary_points >= 0 && cfg.boundary_points <= 100000, "boundary_points: must lie in [0, 100000]");
  if (command == "plan" || command == "budget" || command == "sweep") {
    check(cfg.plan.n >= 1.0, "n: must be >= 1");
    // A zero covertness budget is a valid budget query; plans need delta > 0.
    const bool budget_only = command == "budget" || (command == "sweep" && cfg.sweep_target == "budget");
    if (budget_only) {
      check(cfg.plan.delta >= 0.0 && cfg.plan.delta < 1.0, "delta: must lie in [0, 1)");
    } else {
      check(cfg.plan.delta > 0.0 && cfg.plan.delta < 1.0, "delta: must lie in (0, 1)");
    }
  }
  if (command == "plan") {
    try {
      cfg.plan.validate();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("plan inputs: ") + e.what());
    }
  }
  if (command == "covert-rect") check(cfg.plan.s > 0.0 && cfg.plan.s < 1.0, "s: must lie in (0, 1)");
  if (command == "sweep") {
    static const std::set<std::string> targets{"region", "covert-rect", "budget", "plan"};
    check(targets.count(cfg.sweep_target) > 0,
          "sweep.target: must be one of region, covert-rect, budget, plan");
    check(!cfg.axes.empty(), "sweep.x: a sweep needs at least one axis");
    long long total = 1;
    for (const auto& a : cfg.axes) total *= a.points;
    check(total <= 100000, "sweep grid exceeds 100000 points");
  }
  if (command == "validate") {
    check(cfg.tv_n >= 1, "tv.n: must be >= 1");
    check(cfg.tv_samples >= 1 && cfg.tv_samples <= 100000000, "tv.samples: must lie in [1, 1e8]");
    check(cfg.tv_target > 0.0 && cfg.tv_target < 1.0, "tv.target: must lie in (0, 1)");
  }
  return cfg;
}

std::vector<std::pair<std::string, std::string>> resolved_config(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto& c = cfg.command;
  out.emplace_back("command", c);
  out.emplace_back("tau", num(cfg.tau));
  out.emplace_back("kappa", num(cfg.kappa));
  out.emplace_back("n_b", num(cfg.n_b));
  if (c == "region" || c == "sweep") {
    out.emplace_back("n_s", num(cfg.n_s));
    out.emplace_back("cutoff", std::to_string(cfg.numerics.cutoff));
    out.emplace_back("psk_order", std::to_string(cfg.numerics.psk_order));
    out.emplace_back("tail_tol", num(cfg.numerics.tail_tol));
  }
  if (c == "region") out.emplace_back("boundary_points", std::to_string(cfg.boundary_points));
  if (c == "covert-rect") out.emplace_back("s", num(cfg.plan.s));
  if (c == "budget" || c == "plan" || c == "sweep") {
    out.emplace_back("n", num(cfg.plan.n));
    out.emplace_back("delta", num(cfg.plan.delta));
    out.emplace_back("alpha", num(cfg.plan.alpha));
    out.emplace_back("beta", num(cfg.plan.beta));
    out.emplace_back("s", num(cfg.plan.s));
  }
  if (c == "plan" || c == "sweep") {
    out.emplace_back("mu_bar", num(cfg.plan.mu_bar));
    out.emplace_back("epsilon", num(cfg.plan.epsilon));
  }
  if (c == "sweep") {
    out.emplace_back("sweep.target", cfg.sweep_target);
    const char* names[] = {"sweep.x", "sweep.y"};
    for (std::size_t i = 0; i < cfg.axes.size(); ++i) {
      const auto& a = cfg.axes[i];
      out.emplace_back(names[i], fmt::format("{}:{}:{}:{}", a.param, num(a.start), num(a.stop), a.points));
    }
  }
  if (c == "validate") {
    out.emplace_back("tv.n", std::to_string(cfg.tv_n));
    out.emplace_back("tv.samples", std::to_string(cfg.tv_samples));
    out.emplace_back("tv.target", num(cfg.tv_target));
  }
  out.emplace_back("seed", cfg.seed ? std::to_string(*cfg.seed) : "none");
  out.emplace_back("units", cfg.bits ? "bits" : "nats");
  const char* fmts[] = {"csv", "record", "svg"};
  out.emplace_back("format", fmts[static_cast<int>(cfg.format)]);
  return out;
}

}  // namespace eamac::cli
