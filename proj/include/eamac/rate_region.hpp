#pragma once

// Achievable rate regions of the entanglement-assisted MAC. All rates are in
// nats per channel use.

#include <optional>
#include <string>
#include <vector>

#include "eamac/fock_oracle.hpp"
#include "eamac/mac_channel.hpp"

namespace eamac::region {

struct Numerics {
  int cutoff = 24;
  int psk_order = 64;
  double tail_tol = fock::kDefaultTailTol;

  void validate() const;
};

struct ConditionalEntropy {
  double value = 0.0;
  double mu_plus = 0.0;
  double mu_minus = 0.0;
  // False when n_t_eff violates the PSK convergence noise condition. The
  // value is still well defined.
  bool in_validity_region = true;
};

ConditionalEntropy conditional_entropy_term(const mac::EffectiveChannel& eff);

// Noise condition n_t > max{k n_s - 1, (-(1 + 2 k n_s) + sqrt(4 k n_s^2 + 4 k n_s + 1)) / 2}.
bool psk_noise_condition(const mac::EffectiveChannel& eff);

struct MiEstimate {
  double value = 0.0;
  double avg_entropy = 0.0;
  double cond_entropy = 0.0;
  double tail = 0.0;
  bool in_validity_region = true;
};

// Phase-averaged entropy from the Fock oracle minus the closed-form
// conditional entropy.
MiEstimate continuous_phase_mi(const mac::EffectiveChannel& eff, const Numerics& numerics);

// The explicitly printed log terms of the closed-form continuous-phase
// bound, without the terms it defers elsewhere. A partial expression, not a
// bound. Empty when n_t_eff <= kappa_eff.
std::optional<double> partial_log_terms(const mac::EffectiveChannel& eff);

struct Constraint {
  std::string label;
  double value = 0.0;
  bool active = true;
};

struct RateRegion {
  // Counterclockwise from the origin.
  std::vector<std::pair<double, double>> vertices;
  std::vector<Constraint> constraints;
  // Which ordering attains the sum bound: "X-first" means
  // MI_X(unconditioned) + MI_Y(conditioned).
  std::string sum_branch;
  double sum_branch_x_first = 0.0;
  double sum_branch_y_first = 0.0;
  bool in_validity_region = true;
  double max_tail = 0.0;

  double bound(const std::string& label) const;
};

struct RegionTerms {
  MiEstimate x_conditioned;
  MiEstimate y_conditioned;
  MiEstimate x_unconditioned;
  MiEstimate y_unconditioned;
};

RegionTerms region_terms(const mac::MacParams& p, const mac::ModulationConfig& m,
                         const Numerics& numerics);

// Assembles the polygon from the three half-planes.
RateRegion assemble_region(const RegionTerms& terms);

RateRegion achievable_region(const mac::MacParams& p, const mac::ModulationConfig& m,
                           const Numerics& numerics);

// Small-signal limit rectangle; s must lie in (0, 1).
RateRegion covert_rectangle(const mac::MacParams& p, double s);

}  // namespace eamac::region
