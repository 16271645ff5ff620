#include "eamac/covert_planner.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "eamac/errors.hpp"
#include "eamac/gaussian_core.hpp"
#include "eamac/kernels.hpp"
#include "eamac/parallel.hpp"

namespace eamac::covert {

namespace {

constexpr double kBudgetSlack = 1e-12;
constexpr long long kChunk = 10000;

void require_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError(std::string(name) + " must lie in [0, 1]");
}

long long ceil_count(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<long long>(r);
  return static_cast<long long>(std::ceil(x));
}

// (1 + e) log(1 + e) - e, accurate for small |e|.
double kl_phi(double e) {
  if (std::abs(e) < 1e-4) {
    return e * e * (0.5 + e * (-1.0 / 6.0 + e * (1.0 / 12.0 - e / 20.0)));
  }
  return (1.0 + e) * std::log1p(e) - e;
}

double coefficient(const mac::MacParams& p, Receiver r) {
  const double k = r == Receiver::Bob ? p.kappa() : 1.0 - p.kappa();
  const double bg = r == Receiver::Bob ? p.n_t() : p.kappa() * p.n_b();
  return k * k / (2.0 * bg * (1.0 + bg));
}

void require_feasible(const PlanInputs& in) {
  const double b = covert_budget(in.n, in.delta, in.params);
  const double u = budget_usage(in.params, in.alpha, in.beta, in.s);
  if (u > b * (1.0 + kBudgetSlack)) {
    throw InfeasibleError("covert budget exceeded: (alpha tau + beta (1 - tau)) s = " +
                              sci(u) + " > " + sci(b),
                          "covert-budget");
  }
}

}  // namespace

double q_function(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double q_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("q_inv needs p in (0, 1)");
  if (p == 0.5) return 0.0;
  auto f = [p](double z) { return q_function(z) - p; };
  std::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(f, -40.0, 40.0,
                                                          boost::math::tools::eps_tolerance<double>(53),
                                                          iters);
  // Pick the end of the final bracket with the smaller residual.
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

double budget_prefactor(const mac::MacParams& p) {
  const double kn = p.kappa() * p.n_b();
  return 2.0 * std::sqrt(kn * (1.0 + kn)) / (1.0 - p.kappa());
}

double covert_budget(double n, double delta, const mac::MacParams& p) {
  if (!(n >= 1.0)) throw DomainError("blocklength must be >= 1");
  if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("delta must lie in [0, 1)");
  if (delta == 0.0) return 0.0;
  return budget_prefactor(p) * q_inv((1.0 - delta) / 2.0) / std::sqrt(n);
}

double budget_usage(const mac::MacParams& p, double alpha, double beta, double s) {
  return (alpha * p.tau() + beta * (1.0 - p.tau())) * s;
}

bool budget_feasible(double n, double delta, const mac::MacParams& p, double alpha, double beta,
                     double s) {
  return budget_usage(p, alpha, beta, s) <= covert_budget(n, delta, p) * (1.0 + kBudgetSlack);
}

void PlanInputs::validate() const {
  if (!(n >= 1.0)) throw DomainError("n must be >= 1");
  // A silent sender (alpha or beta = 0) is allowed; s enters through ln s.
  for (auto [v, name] : {std::pair{alpha, "alpha"}, {beta, "beta"}}) {
    if (!(v >= 0.0 && v < 1.0)) throw DomainError(std::string(name) + " must lie in [0, 1)");
  }
  if (!(s > 0.0 && s < 1.0)) throw DomainError("s must lie in (0, 1)");
  if (!(mu_bar > 0.0 && mu_bar < 1.0)) throw DomainError("mu_bar must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
}

Layer1Rates layer1_throughput(const PlanInputs& in) {
  in.validate();
  require_feasible(in);
  const auto& p = in.params;
  const double t = p.tau();
  const double s2 = in.s * in.s;
  const double bob = coefficient(p, Receiver::Bob);
  const double willie = coefficient(p, Receiver::Willie);
  const double wx = in.n * in.alpha * t * t * s2;
  const double wy = in.n * in.beta * (1.0 - t) * (1.0 - t) * s2;
  Layer1Rates r;
  r.log_mx1 = wx * bob;
  r.log_my1 = wy * bob;
  r.log_mx1my1 = (wx + wy) * bob;
  r.log_mx1sx = wx * willie;
  r.log_my1sy = wy * willie;
  r.log_keys_total = (wx + wy) * willie;
  return r;
}

Layer2Rates layer2_throughput(const PlanInputs& in) {
  in.validate();
  require_feasible(in);
  const auto& p = in.params;
  const double scale = (1.0 - in.mu_bar) * in.n * p.kappa() / (1.0 + p.n_t()) * (-in.s * std::log(in.s));
  Layer2Rates r;
  r.log_mx2 = scale * p.tau() * in.alpha;
  r.log_my2 = scale * (1.0 - p.tau()) * in.beta;
  r.log_mx2my2 = scale * (p.tau() * in.alpha + (1.0 - p.tau()) * in.beta);
  r.l_x = ceil_count(in.n * in.alpha * (1.0 - in.mu_bar));
  r.l_y = ceil_count(in.n * in.beta * (1.0 - in.mu_bar));
  const double g = gaussian::g_entropy(in.s);
  r.entangled_nats_x = static_cast<double>(r.l_x) * g;
  r.entangled_nats_y = static_cast<double>(r.l_y) * g;
  return r;
}

CovertPlan make_plan(const PlanInputs& in) {
  CovertPlan plan;
  plan.inputs = in;
  plan.layer1 = layer1_throughput(in);
  plan.layer2 = layer2_throughput(in);
  plan.budget = covert_budget(in.n, in.delta, in.params);
  plan.usage = budget_usage(in.params, in.alpha, in.beta, in.s);
  plan.chernoff = chernoff_truncation(in.n, in.alpha, in.beta, in.mu_bar);
  plan.willie_tv = willie_tv_leading(in.n, in.alpha, in.beta, in.s, in.params);
  return plan;
}

LimitConstants limit_constants(double gamma, double alpha, double beta, double s, double delta,
                                 const mac::MacParams& p) {
  if (!(gamma > 0.0 && gamma < 0.5)) throw DomainError("gamma must lie in (0, 1/2)");
  if (!(alpha > 0.0 && beta > 0.0 && s > 0.0)) throw DomainError("alpha, beta, s must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  const double target = budget_prefactor(p) * q_inv((1.0 - delta) / 2.0);
  const double usage = budget_usage(p, alpha, beta, s);
  if (std::abs(usage - target) > 1e-9 * target) {
    throw InfeasibleError("limit constants need (alpha tau + beta (1 - tau)) s = " +
                              sci(target) + ", got " + sci(usage),
                          "limit-budget");
  }
  const double t = p.tau();
  const double bob = coefficient(p, Receiver::Bob);
  const double l2 = gamma * p.kappa() * s / (1.0 + p.n_t());
  LimitConstants c;
  c.layer1_x = alpha * t * t * s * s * bob;
  c.layer1_y = beta * (1.0 - t) * (1.0 - t) * s * s * bob;
  c.layer2_x = l2 * t * alpha;
  c.layer2_y = l2 * (1.0 - t) * beta;
  c.ent_x = gamma * alpha * s;
  c.ent_y = gamma * beta * s;
  return c;
}

PlanInputs limit_inputs(double gamma, double alpha, double beta, double s, double delta,
                            double mu_bar, const mac::MacParams& p, double n) {
  PlanInputs in;
  in.params = p;
  in.n = n;
  in.alpha = alpha * std::pow(n, gamma - 0.5);
  in.beta = beta * std::pow(n, gamma - 0.5);
  in.s = s * std::pow(n, -gamma);
  in.mu_bar = mu_bar;
  in.delta = delta;
  return in;
}

RelEntStats relent_leading(const mac::MacParams& p, double alpha, double beta, double s,
                           Receiver receiver, Marginal marginal) {
  require_unit(alpha, "alpha");
  require_unit(beta, "beta");
  const double t = p.tau();
  const double wx = alpha * t * t;
  const double wy = beta * (1.0 - t) * (1.0 - t);
  RelEntStats st;
  double weight = 0.0;
  switch (marginal) {
    case Marginal::joint:
      weight = wx + wy;
      st.r_order = "O((alpha + beta) s^4)";
      break;
    case Marginal::x_only:
      weight = wx;
      st.r_order = "O(alpha s^4)";
      break;
    case Marginal::y_only:
      weight = wy;
      st.r_order = "O(beta s^4)";
      break;
  }
  st.d = weight * s * s * coefficient(p, receiver);
  st.v = 2.0 * st.d;
  return st;
}

RelEntStats relent_exact(const mac::MacParams& p, double alpha, double beta, double s,
                         Receiver receiver, Marginal marginal, double tail_tol) {
  const auto parts = fock::layer1_mode_distributions(p, alpha, beta, s, receiver, 0, tail_tol);
  const std::size_t d = parts.front().dist.probs.size();

  // Reference distribution for each (x, y) hypothesis: the mixture over the
  // coordinates the marginal averages out.
  auto reference = [&](const fock::WeightedDistribution& w) {
    std::vector<double> ref(d, 0.0);
    double mass = 0.0;
    for (const auto& o : parts) {
      const bool use = marginal == Marginal::joint ||
                       (marginal == Marginal::x_only && o.y == w.y) ||
                       (marginal == Marginal::y_only && o.x == w.x);
      if (!use) continue;
      mass += o.weight;
      simd::axpy(o.weight, o.dist.probs, ref);
    }
    for (double& r : ref) r /= mass;
    return ref;
  };

  RelEntStats st;
  st.r_order = relent_leading(p, alpha, beta, s, receiver, marginal).r_order;
  std::vector<std::vector<double>> llr(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto ref = reference(parts[i]);
    const auto& pr = parts[i].dist.probs;
    llr[i].resize(d);
    double kl = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double e = (pr[k] - ref[k]) / ref[k];
      kl += ref[k] * kl_phi(e);
      llr[i][k] = std::log1p(e);
    }
    st.d += parts[i].weight * kl;
  }
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& pr = parts[i].dist.probs;
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double c = llr[i][k] - st.d;
      acc += pr[k] * c * c;
    }
    st.v += parts[i].weight * acc;
  }
  return st;
}

double willie_tv_leading(double n, double alpha, double beta, double s, const mac::MacParams& p) {
  if (!(n >= 1.0)) throw DomainError("blocklength must be >= 1");
  const double kn = p.kappa() * p.n_b();
  const double arg = std::sqrt(n) * budget_usage(p, alpha, beta, s) * (1.0 - p.kappa()) /
                     (2.0 * std::sqrt(kn * (1.0 + kn)));
  return std::clamp(1.0 - 2.0 * q_function(arg), 0.0, 1.0);
}

TvEstimate willie_tv_mc(long long n, double alpha, double beta, double s, const mac::MacParams& p,
                        long long samples, std::optional<std::uint64_t> seed, unsigned workers) {
  if (!seed) throw ConfigError("willie_tv_mc needs an explicit seed");
  if (n < 1) throw DomainError("blocklength must be >= 1");
  if (samples < 1) throw DomainError("sample count must be >= 1");

  // Per-mode laws with an exact overflow bucket as the last category.
  const auto parts = fock::layer1_mode_distributions(p, alpha, beta, s, Receiver::Willie, 0, 1e-13);
  const std::size_t d = parts.front().dist.probs.size();
  std::vector<double> signal(d + 1, 0.0);
  for (const auto& w : parts) {
    for (std::size_t k = 0; k < d; ++k) signal[k] += w.weight * w.dist.probs[k];
    signal[d] += w.weight * w.dist.tail;
  }
  const auto idle_dist = fock::photon_distribution_thermal(p.kappa() * p.n_b(), static_cast<int>(d));
  std::vector<double> idle(idle_dist.probs);
  idle.push_back(idle_dist.tail);
  std::vector<double> llr(d + 1);
  for (std::size_t k = 0; k <= d; ++k) llr[k] = std::log(signal[k] / idle[k]);

  const long long chunks = (samples + kChunk - 1) / kChunk;
  std::vector<long long> hits_signal(chunks, 0), hits_idle(chunks, 0);
  parallel_for(static_cast<std::size_t>(chunks), workers, [&](std::size_t c) {
    const long long count = std::min(kChunk, samples - static_cast<long long>(c) * kChunk);
    for (int hyp = 0; hyp < 2; ++hyp) {
      const auto& law = hyp == 0 ? signal : idle;
      std::seed_seq seq{static_cast<std::uint32_t>(*seed), static_cast<std::uint32_t>(*seed >> 32),
                        static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(hyp)};
      std::mt19937_64 rng(seq);
      long long hits = 0;
      for (long long i = 0; i < count; ++i) {
        // Multinomial(n, law) by sequential conditional binomials.
        long long left = n;
        double mass = 1.0;
        double stat = 0.0;
        for (std::size_t k = 0; k <= d && left > 0; ++k) {
          long long ck = left;
          if (k < d) {
            const double q = std::clamp(law[k] / mass, 0.0, 1.0);
            std::binomial_distribution<long long> bin(left, q);
            ck = bin(rng);
            mass -= law[k];
          }
          stat += static_cast<double>(ck) * llr[k];
          left -= ck;
        }
        if (stat > 0.0) ++hits;
      }
      (hyp == 0 ? hits_signal : hits_idle)[c] = hits;
    }
  });

  long long hs = 0, hi = 0;
  for (long long c = 0; c < chunks; ++c) {
    hs += hits_signal[c];
    hi += hits_idle[c];
  }
  TvEstimate est;
  est.samples = samples;
  const double m = static_cast<double>(samples);
  est.p_signal = static_cast<double>(hs) / m;
  est.p_idle = static_cast<double>(hi) / m;
  est.tv = est.p_signal - est.p_idle;
  est.std_error = std::sqrt(est.p_signal * (1.0 - est.p_signal) / m + est.p_idle * (1.0 - est.p_idle) / m);
  return est;
}

double chernoff_truncation(double n, double alpha, double beta, double mu_bar) {
  if (!(mu_bar >= 0.0 && mu_bar < 1.0)) throw DomainError("mu_bar must lie in [0, 1)");
  const double c = 0.5 * mu_bar * mu_bar * n;
  return 2.0 * std::exp(-c * alpha) + 2.0 * std::exp(-c * beta);
}

double binomial_lower_tail(long long n, double q, double mu_bar) {
  if (n < 0) throw DomainError("n must be >= 0");
  require_unit(q, "q");
  const double threshold = (1.0 - mu_bar) * static_cast<double>(n) * q;
  // Largest integer strictly below the threshold.
  const double k = std::ceil(threshold) - 1.0;
  if (k < 0.0) return 0.0;
  if (q == 0.0) return 1.0;
  if (q == 1.0) return k >= static_cast<double>(n) ? 1.0 : 0.0;
  boost::math::binomial_distribution<double> bin(static_cast<double>(n), q);
  return boost::math::cdf(bin, std::min(k, static_cast<double>(n)));
}

double second_order_rate(double n, const RelEntStats& stats, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
  return n * stats.d - std::sqrt(n * stats.v) * q_inv(eps * eps);
}

double second_order_rate_dmax(double n, const RelEntStats& stats, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  return n * stats.d + std::sqrt(n * stats.v) * q_inv(delta * delta);
}

}  // namespace eamac::covert
