#pragma once

// Covert two-layer planning: the warden's power budget, leading-order
// Layer-1/Layer-2 throughputs, limit constants, and classical oracles for
// the Layer-1 relative entropies and the warden's detection probability.
// Everything is in nats.

#include <cstdint>
#include <optional>
#include <string>

#include "eamac/fock_oracle.hpp"
#include "eamac/mac_channel.hpp"

namespace eamac::covert {

using fock::Receiver;

// Upper tail of the standard normal.
double q_function(double z);

// Unique z with q_function(z) = p, p in (0, 1).
double q_inv(double p);

// 2 sqrt(k N_B (1 + k N_B)) / (1 - k), the n-independent budget prefactor.
double budget_prefactor(const mac::MacParams& p);

// Largest allowed (alpha tau + beta (1 - tau)) s at blocklength n.
double covert_budget(double n, double delta, const mac::MacParams& p);

// Weighted pulse energy (alpha tau + beta (1 - tau)) s.
double budget_usage(const mac::MacParams& p, double alpha, double beta, double s);

bool budget_feasible(double n, double delta, const mac::MacParams& p, double alpha, double beta,
                     double s);

struct PlanInputs {
  mac::MacParams params{0.5, 0.5, 1.0};
  double n = 1e6;
  double alpha = 1e-2;
  double beta = 1e-2;
  double s = 1e-2;
  double mu_bar = 0.1;
  double delta = 0.1;
  double epsilon = 0.1;

  void validate() const;
};

struct Layer1Rates {
  double log_mx1 = 0.0;
  double log_my1 = 0.0;
  double log_mx1my1 = 0.0;
  double log_mx1sx = 0.0;
  double log_my1sy = 0.0;
  double log_keys_total = 0.0;
  // Little-o orders of the omitted remainders.
  std::string order_x = "o(n alpha s^2)";
  std::string order_y = "o(n beta s^2)";
  std::string order_sum = "o(n (alpha + beta) s^2)";
};

struct Layer2Rates {
  double log_mx2 = 0.0;
  double log_my2 = 0.0;
  double log_mx2my2 = 0.0;
  long long l_x = 0;
  long long l_y = 0;
  double entangled_nats_x = 0.0;
  double entangled_nats_y = 0.0;
  std::string order_x = "O(n alpha s)";
  std::string order_y = "O(n beta s)";
  std::string order_sum = "O(n (alpha + beta) s)";
};

// Both throw InfeasibleError when the covert budget is exceeded.
Layer1Rates layer1_throughput(const PlanInputs& in);
Layer2Rates layer2_throughput(const PlanInputs& in);

struct CovertPlan {
  PlanInputs inputs;
  double budget = 0.0;
  double usage = 0.0;
  Layer1Rates layer1;
  Layer2Rates layer2;
  double chernoff = 0.0;
  double willie_tv = 0.0;
};

CovertPlan make_plan(const PlanInputs& in);

// Large-n limits along alpha n^(gamma - 1/2), beta n^(gamma - 1/2), s n^(-gamma).
// Layer-1 values are log M / n^(1/2 - gamma). Layer-2 and entanglement values
// are per sqrt(n) ln n and per unit (1 - mu_bar), which the finite-n rates carry.
struct LimitConstants {
  double layer1_x = 0.0;
  double layer1_y = 0.0;
  double layer2_x = 0.0;
  double layer2_y = 0.0;
  double ent_x = 0.0;
  double ent_y = 0.0;
};

// Requires (alpha tau + beta (1 - tau)) s to equal the budget prefactor
// times q_inv((1 - delta) / 2); throws InfeasibleError otherwise.
LimitConstants limit_constants(double gamma, double alpha, double beta, double s, double delta,
                                 const mac::MacParams& p);

// Sequences alpha n^(gamma - 1/2), beta n^(gamma - 1/2), s n^(-gamma) at n.
PlanInputs limit_inputs(double gamma, double alpha, double beta, double s, double delta,
                            double mu_bar, const mac::MacParams& p, double n);

enum class Marginal { joint, x_only, y_only };

struct RelEntStats {
  double d = 0.0;
  double v = 0.0;
  std::string r_order;
};

RelEntStats relent_leading(const mac::MacParams& p, double alpha, double beta, double s,
                           Receiver receiver, Marginal marginal);

RelEntStats relent_exact(const mac::MacParams& p, double alpha, double beta, double s,
                         Receiver receiver, Marginal marginal, double tail_tol = 1e-15);

double willie_tv_leading(double n, double alpha, double beta, double s, const mac::MacParams& p);

struct TvEstimate {
  double tv = 0.0;
  double std_error = 0.0;
  double p_signal = 0.0;  // P(LLR > 0) with transmissions
  double p_idle = 0.0;    // P(LLR > 0) without
  long long samples = 0;
};

// Monte Carlo total variation between the warden's n-mode output with and
// without transmissions. Samples are split into fixed chunks seeded from
// (seed, chunk), so the estimate does not depend on `workers`. A missing
// seed throws ConfigError.
TvEstimate willie_tv_mc(long long n, double alpha, double beta, double s, const mac::MacParams& p,
                        long long samples, std::optional<std::uint64_t> seed, unsigned workers = 1);

double chernoff_truncation(double n, double alpha, double beta, double mu_bar);

// P(Bin(n, q) < (1 - mu_bar) n q).
double binomial_lower_tail(long long n, double q, double mu_bar);

// n D - sqrt(n V) q_inv(eps^2).
double second_order_rate(double n, const RelEntStats& stats, double eps);
// n D + sqrt(n V) q_inv(delta^2).
double second_order_rate_dmax(double n, const RelEntStats& stats, double delta);

}  // namespace eamac::covert
