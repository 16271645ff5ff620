#pragma once

// Batch front end. A run is fully described by a RunConfig; the same
// config and seed always produce the same bytes.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eamac/covert_planner.hpp"
#include "eamac/rate_region.hpp"

namespace eamac::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kInfeasible = 3, kNumericalError = 4 };

enum class Format { csv, record, svg };

struct SweepAxis {
  std::string param;
  double start = 0.0;
  double stop = 0.0;
  int points = 1;

  double at(int i) const;
};

struct RunConfig {
  std::string command;
  Format format = Format::record;
  bool bits = false;
  unsigned workers = 1;
  std::optional<std::uint64_t> seed;

  double tau = 0.5;
  double kappa = 0.5;
  double n_b = 1.0;
  double n_s = 0.1;
  region::Numerics numerics;
  int boundary_points = 0;

  covert::PlanInputs plan;

  std::string sweep_target = "region";
  std::vector<SweepAxis> axes;

  long long tv_n = 10000;
  long long tv_samples = 20000;
  double tv_target = 0.3;

  mac::MacParams mac_params() const { return {tau, kappa, n_b}; }
};

// Splits `key = value` lines; '#' starts a comment. Throws ConfigError on
// malformed lines or duplicate keys.
std::map<std::string, std::string> parse_key_values(const std::string& text);

// Builds and validates a config for `command` from the parsed keys. Keys
// that the command does not use are rejected.
RunConfig make_config(const std::string& command, const std::map<std::string, std::string>& keys);

// Canonical `key = value` listing of every resolved field used by the command.
std::vector<std::pair<std::string, std::string>> resolved_config(const RunConfig& cfg);

std::string run(const RunConfig& cfg);

// Full argument handling; returns the process exit code.
int main_entry(int argc, char** argv);

std::string version();

}  // namespace eamac::cli
