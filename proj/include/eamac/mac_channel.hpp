#pragma once

// Gaussian states of the two-sender entanglement-assisted bosonic MAC.
// Mode order for three-mode states is (output, idler X, idler Y).

#include <string_view>

#include "eamac/gaussian_core.hpp"

namespace eamac::mac {

using gaussian::CovarianceMatrix;
using gaussian::Matrix;

enum class Sender { X, Y };

std::string_view sender_name(Sender s);

class MacParams {
 public:
  // Throws DomainError unless 0 <= tau <= 1, 0 < kappa < 1, n_b > 0.
  MacParams(double tau, double kappa, double n_b);

  double tau() const { return tau_; }
  double kappa() const { return kappa_; }
  double n_b() const { return n_b_; }
  double n_t() const { return (1.0 - kappa_) * n_b_; }

  // Mixing weight of the given sender: tau for X, 1 - tau for Y.
  double weight(Sender s) const { return s == Sender::X ? tau_ : 1.0 - tau_; }

 private:
  double tau_;
  double kappa_;
  double n_b_;
};

struct ModulationConfig {
  double n_s = 0.0;
  int psk_order = 64;

  void validate() const;
};

struct EffectiveChannel {
  double kappa_eff = 0.0;
  double n_t_eff = 0.0;
  double n_s = 0.0;

  // Environment photon number of the equivalent thermal-loss channel.
  double n_b_eff() const;

  // (output, idler) covariance of the point-to-point reduction.
  CovarianceMatrix covariance(double theta = 0.0) const;
};

CovarianceMatrix tmsv_cov(double n_s);

// [[cos t, sin t], [sin t, -cos t]]
Matrix rotation_block(double theta);

CovarianceMatrix bob_joint_cov(const MacParams& p, const ModulationConfig& m, double theta,
                               double phi);
CovarianceMatrix willie_joint_cov(const MacParams& p, const ModulationConfig& m, double theta,
                                  double phi);

// Two-mode (B, own idler) covariance after ideal heterodyne of the other
// sender's idler. theta is the phase of the sender being decoded.
CovarianceMatrix conditioned_cov(const MacParams& p, const ModulationConfig& m, Sender sender,
                                 double theta = 0.0);

EffectiveChannel effective_params(const MacParams& p, const ModulationConfig& m, Sender sender,
                                  bool conditioned);

// Closed form N_T + kappa N_S (1 - tau_s)(1 - 4(1+N_S)/(2+2N_S)) for the
// conditioned n_t_eff. It disagrees with the Schur complement and is only
// reported next to it.
double tabulated_conditioned_n_t(const MacParams& p, const ModulationConfig& m, Sender sender);

}  // namespace eamac::mac
