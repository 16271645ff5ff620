#include "eamac/rate_region.hpp"

#include <algorithm>
#include <cmath>

#include "eamac/errors.hpp"
#include "eamac/gaussian_core.hpp"

namespace eamac::region {

namespace {

using Point = std::pair<double, double>;

void push_unique(std::vector<Point>& pts, Point p) {
  auto same = [](const Point& a, const Point& b) {
    return std::abs(a.first - b.first) <= 1e-15 && std::abs(a.second - b.second) <= 1e-15;
  };
  if (!pts.empty() && same(pts.back(), p)) return;
  if (pts.size() > 1 && same(pts.front(), p)) return;
  pts.push_back(p);
}

}  // namespace

void Numerics::validate() const {
  if (cutoff < 2 || cutoff > 64) throw DomainError("cutoff must lie in [2, 64]");
  if (psk_order < 1) throw DomainError("psk_order must be >= 1");
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw DomainError("tail_tol must lie in (0, 1)");
}

bool psk_noise_condition(const mac::EffectiveChannel& eff) {
  const double k = eff.kappa_eff;
  const double ns = eff.n_s;
  const double a = k * ns - 1.0;
  const double b = 0.5 * (-(1.0 + 2.0 * k * ns) + std::sqrt(4.0 * k * ns * ns + 4.0 * k * ns + 1.0));
  return eff.n_t_eff > std::max(a, b);
}

ConditionalEntropy conditional_entropy_term(const mac::EffectiveChannel& eff) {
  const double k = eff.kappa_eff;
  const double nt = eff.n_t_eff;
  const double ns = eff.n_s;
  const double lead = nt + (1.0 + k) * ns + 1.0;
  const double root = 0.5 * std::sqrt(std::max(0.0, lead * lead - 4.0 * k * ns * (ns + 1.0)));
  const double shift = 0.5 * (nt + (k - 1.0) * ns);
  ConditionalEntropy out;
  out.mu_plus = root + shift;
  out.mu_minus = root - shift;
  // mu = nu / 2, so g(mu - 1/2) is the thermal entropy at (nu - 1) / 2.
  auto term = [](double mu) {
    const double x = mu - 0.5;
    if (x < -gaussian::kPhysicalTol) throw PhysicalityError("conditional state is unphysical");
    return gaussian::g_entropy(std::max(0.0, x));
  };
  out.value = term(out.mu_plus) + term(out.mu_minus);
  out.in_validity_region = psk_noise_condition(eff);
  return out;
}

MiEstimate continuous_phase_mi(const mac::EffectiveChannel& eff, const Numerics& numerics) {
  numerics.validate();
  MiEstimate est;
  est.in_validity_region = psk_noise_condition(eff);
  const auto cond = conditional_entropy_term(eff);
  est.cond_entropy = cond.value;
  if (eff.kappa_eff == 0.0 || eff.n_s == 0.0) {
    est.avg_entropy = cond.value;
    return est;
  }
  const auto avg = fock::psk_average_state(eff, numerics.psk_order, numerics.cutoff, numerics.tail_tol);
  est.avg_entropy = fock::entropy_fock(avg);
  est.tail = avg.tail;
  est.value = est.avg_entropy - est.cond_entropy;
  return est;
}

std::optional<double> partial_log_terms(const mac::EffectiveChannel& eff) {
  const double k = eff.kappa_eff;
  const double nt = eff.n_t_eff;
  const double ns = eff.n_s;
  if (!(nt > k) || !(ns > 0.0)) return std::nullopt;
  const double v = std::log((ns + 1.0) * nt * (nt - k + 1.0) / (nt - k)) +
                   ns * std::log((ns + 1.0) / ns) + ns * std::log(nt / (nt - k)) +
                   (k * ns + nt) * std::log((nt - k + 1.0) / (nt - k));
  return v - conditional_entropy_term(eff).value;
}

double RateRegion::bound(const std::string& label) const {
  for (const auto& c : constraints) {
    if (c.label == label) return c.value;
  }
  throw DomainError("no constraint labelled " + label);
}

RegionTerms region_terms(const mac::MacParams& p, const mac::ModulationConfig& m,
                         const Numerics& numerics) {
  using mac::Sender;
  RegionTerms t;
  t.x_conditioned = continuous_phase_mi(mac::effective_params(p, m, Sender::X, true), numerics);
  t.y_conditioned = continuous_phase_mi(mac::effective_params(p, m, Sender::Y, true), numerics);
  t.x_unconditioned = continuous_phase_mi(mac::effective_params(p, m, Sender::X, false), numerics);
  t.y_unconditioned = continuous_phase_mi(mac::effective_params(p, m, Sender::Y, false), numerics);
  return t;
}

RateRegion assemble_region(const RegionTerms& t) {
  RateRegion r;
  const double a = std::max(0.0, t.x_conditioned.value);
  const double b = std::max(0.0, t.y_conditioned.value);
  r.sum_branch_x_first = std::max(0.0, t.x_unconditioned.value) + b;
  r.sum_branch_y_first = std::max(0.0, t.y_unconditioned.value) + a;
  const bool x_first = r.sum_branch_x_first >= r.sum_branch_y_first;
  const double c = x_first ? r.sum_branch_x_first : r.sum_branch_y_first;
  r.sum_branch = x_first ? "X-first" : "Y-first";
  r.in_validity_region = t.x_conditioned.in_validity_region && t.y_conditioned.in_validity_region &&
                         t.x_unconditioned.in_validity_region && t.y_unconditioned.in_validity_region;
  r.max_tail = std::max({t.x_conditioned.tail, t.y_conditioned.tail, t.x_unconditioned.tail,
                         t.y_unconditioned.tail});

  const bool rectangle = c >= a + b - 1e-15;
  r.constraints = {{"X-bound", a, true}, {"Y-bound", b, true}, {"sum-bound", c, !rectangle}};
  push_unique(r.vertices, {0.0, 0.0});
  push_unique(r.vertices, {a, 0.0});
  if (rectangle) {
    push_unique(r.vertices, {a, b});
  } else {
    push_unique(r.vertices, {a, c - a});
    push_unique(r.vertices, {c - b, b});
  }
  push_unique(r.vertices, {0.0, b});
  return r;
}

RateRegion achievable_region(const mac::MacParams& p, const mac::ModulationConfig& m,
                           const Numerics& numerics) {
  return assemble_region(region_terms(p, m, numerics));
}

RateRegion covert_rectangle(const mac::MacParams& p, double s) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("covert rectangle needs 0 < s < 1");
  const double scale = -p.kappa() / (1.0 + p.n_t()) * s * std::log(s);
  RateRegion r;
  const double a = scale * p.tau();
  const double b = scale * (1.0 - p.tau());
  r.constraints = {{"X-bound", a, true}, {"Y-bound", b, true}, {"sum-bound", a + b, false}};
  r.sum_branch = "none";
  push_unique(r.vertices, {0.0, 0.0});
  push_unique(r.vertices, {a, 0.0});
  push_unique(r.vertices, {a, b});
  push_unique(r.vertices, {0.0, b});
  return r;
}

}  // namespace eamac::region
