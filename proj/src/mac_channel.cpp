#include "eamac/mac_channel.hpp"

#include <cmath>
#include <string>

#include "eamac/errors.hpp"

namespace eamac::mac {

namespace {

double two_mode_s(double n_s) { return 2.0 * n_s + 1.0; }
double two_mode_cq(double n_s) { return 2.0 * std::sqrt(n_s * (n_s + 1.0)); }

Matrix eye2() { return Matrix::Identity(2, 2); }

// Shared layout of Bob's and Willie's three-mode states.
CovarianceMatrix three_mode(double out_var, double cx, double cy, double theta, double phi,
                            double s) {
  Matrix lam = Matrix::Zero(6, 6);
  lam.block(0, 0, 2, 2) = out_var * eye2();
  lam.block(2, 2, 2, 2) = s * eye2();
  lam.block(4, 4, 2, 2) = s * eye2();
  const Matrix bx = cx * rotation_block(theta);
  const Matrix by = cy * rotation_block(phi);
  lam.block(0, 2, 2, 2) = bx;
  lam.block(2, 0, 2, 2) = bx.transpose();
  lam.block(0, 4, 2, 2) = by;
  lam.block(4, 0, 2, 2) = by.transpose();
  return CovarianceMatrix(std::move(lam));
}

}  // namespace

std::string_view sender_name(Sender s) { return s == Sender::X ? "X" : "Y"; }

MacParams::MacParams(double tau, double kappa, double n_b) : tau_(tau), kappa_(kappa), n_b_(n_b) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("tau must lie in [0, 1]");
  if (!(kappa > 0.0 && kappa < 1.0)) throw DomainError("kappa must lie in (0, 1)");
  if (!(n_b > 0.0) || !std::isfinite(n_b)) throw DomainError("n_b must be a positive number");
}

void ModulationConfig::validate() const {
  if (!(n_s >= 0.0) || !std::isfinite(n_s)) throw DomainError("n_s must be >= 0");
  if (psk_order < 1) throw DomainError("psk_order must be >= 1");
}

double EffectiveChannel::n_b_eff() const {
  if (kappa_eff >= 1.0) return 0.0;
  return n_t_eff / (1.0 - kappa_eff);
}

CovarianceMatrix EffectiveChannel::covariance(double theta) const {
  const double s = two_mode_s(n_s);
  Matrix lam = Matrix::Zero(4, 4);
  lam.block(0, 0, 2, 2) = (s * kappa_eff + 2.0 * n_t_eff + 1.0 - kappa_eff) * eye2();
  lam.block(2, 2, 2, 2) = s * eye2();
  const Matrix c = two_mode_cq(n_s) * std::sqrt(kappa_eff) * rotation_block(theta);
  lam.block(0, 2, 2, 2) = c;
  lam.block(2, 0, 2, 2) = c.transpose();
  return CovarianceMatrix(std::move(lam));
}

CovarianceMatrix tmsv_cov(double n_s) {
  if (!(n_s >= 0.0)) throw DomainError("tmsv_cov requires n_s >= 0");
  EffectiveChannel ideal{1.0, 0.0, n_s};
  return ideal.covariance(0.0);
}

Matrix rotation_block(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), std::sin(theta), std::sin(theta), -std::cos(theta);
  return r;
}

CovarianceMatrix bob_joint_cov(const MacParams& p, const ModulationConfig& m, double theta,
                               double phi) {
  m.validate();
  const double s = two_mode_s(m.n_s);
  const double cq = two_mode_cq(m.n_s);
  const double k = p.kappa();
  const double noise = 2.0 * p.n_t() / (1.0 - k) + 1.0;
  return three_mode(s * k + noise * (1.0 - k), cq * std::sqrt(k * p.tau()),
                    cq * std::sqrt(k * (1.0 - p.tau())), theta, phi, s);
}

CovarianceMatrix willie_joint_cov(const MacParams& p, const ModulationConfig& m, double theta,
                                  double phi) {
  m.validate();
  const double s = two_mode_s(m.n_s);
  const double cq = two_mode_cq(m.n_s);
  const double k = p.kappa();
  return three_mode(s * (1.0 - k) + k * (2.0 * p.n_b() + 1.0),
                    -cq * std::sqrt((1.0 - k) * p.tau()), -cq * std::sqrt((1.0 - k) * (1.0 - p.tau())),
                    theta, phi, s);
}

CovarianceMatrix conditioned_cov(const MacParams& p, const ModulationConfig& m, Sender sender,
                                 double theta) {
  m.validate();
  const double s = two_mode_s(m.n_s);
  const double cq = two_mode_cq(m.n_s);
  const double k = p.kappa();
  const double own = p.weight(sender);
  const double other = 1.0 - own;
  const double noise = 2.0 * p.n_t() / (1.0 - k) + 1.0;
  const double var = s * k + noise * (1.0 - k) - cq * cq * k * other / (s + 1.0);
  Matrix lam = Matrix::Zero(4, 4);
  lam.block(0, 0, 2, 2) = var * eye2();
  lam.block(2, 2, 2, 2) = s * eye2();
  const Matrix c = cq * std::sqrt(k * own) * rotation_block(theta);
  lam.block(0, 2, 2, 2) = c;
  lam.block(2, 0, 2, 2) = c.transpose();
  return CovarianceMatrix(std::move(lam));
}

EffectiveChannel effective_params(const MacParams& p, const ModulationConfig& m, Sender sender,
                                  bool conditioned) {
  m.validate();
  const double own = p.weight(sender);
  EffectiveChannel eff;
  eff.n_s = m.n_s;
  eff.kappa_eff = p.kappa() * own;
  if (!conditioned) {
    eff.n_t_eff = p.n_t() + p.kappa() * m.n_s * (1.0 - own);
    return eff;
  }
  // Match the conditioned output variance:
  // (2N_S+1) k_eff + 2 n_t_eff + 1 - k_eff = var.
  const double var = conditioned_cov(p, m, sender)(0, 0);
  const double s = two_mode_s(m.n_s);
  eff.n_t_eff = 0.5 * (var - s * eff.kappa_eff - 1.0 + eff.kappa_eff);
  if (eff.n_t_eff < 0.0 && eff.n_t_eff > -1e-12) eff.n_t_eff = 0.0;
  return eff;
}

double tabulated_conditioned_n_t(const MacParams& p, const ModulationConfig& m, Sender sender) {
  const double ns = m.n_s;
  const double other = 1.0 - p.weight(sender);
  return p.n_t() + p.kappa() * ns * other * (1.0 - 4.0 * (1.0 + ns) / (2.0 + 2.0 * ns));
}

}  // namespace eamac::mac
