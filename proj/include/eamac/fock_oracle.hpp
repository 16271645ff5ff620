#pragma once

// Truncated Fock-space ground truth. Multi-mode states are stored with mode 0
// as the most significant index digit: |n_0, n_1, ...> sits at
// sum_k n_k d^(m-1-k). Every constructor and channel records the probability
// weight lost to truncation in `tail`.

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "eamac/mac_channel.hpp"

namespace eamac::fock {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kDefaultTailTol = 1e-8;
inline constexpr double kEigenTol = 1e-10;

struct FockVector {
  int cutoff = 1;
  int modes = 1;
  CVector amplitudes;
  double tail = 0.0;

  Eigen::Index dim() const { return amplitudes.size(); }
};

struct FockDensity {
  int cutoff = 1;
  int modes = 1;
  CMatrix matrix;
  double tail = 0.0;

  Eigen::Index dim() const { return matrix.rows(); }
  double trace() const { return matrix.trace().real(); }

  // Hermitian to 1e-10 and shape consistent with cutoff^modes.
  void validate() const;
};

struct PhotonDistribution {
  std::vector<double> probs;
  double tail = 0.0;

  double mean() const;
};

// Smallest cutoff with (n/(n+1))^d <= tail_tol.
int thermal_cutoff(double n_mean, double tail_tol);

// Throws TruncationError when d leaves more than tail_tol of the weight out.
FockVector tmsv_fock(double n_s, int d, double tail_tol = kDefaultTailTol);
FockVector coherent_fock(cplx alpha, int d, double tail_tol = kDefaultTailTol);
FockDensity thermal_fock(double n_mean, int d, double tail_tol = kDefaultTailTol);

// Multiplies Fock level k of `mode` by exp(i 2 theta k).
FockVector phase_rotate_fock(const FockVector& state, double theta, int mode);
FockDensity phase_rotate_fock(const FockDensity& rho, double theta, int mode);

FockDensity to_density(const FockVector& v);
FockDensity partial_trace(const FockDensity& rho, std::span<const int> keep);

// Beamsplitter of transmissivity t on modes (a, b) in the convention
// a -> sqrt(t) a + sqrt(1-t) b. Levels pushed past the cutoff are dropped
// and counted in `tail`.
FockVector apply_beamsplitter(const FockVector& v, int mode_a, int mode_b, double t);

// Thermal-loss channel on `mode`: mix with a thermal(n_b) environment at
// transmissivity kappa and discard the environment. d_env = 0 picks the
// smallest environment cutoff meeting tail_tol. Throws TruncationError when
// the trace drops by more than 2 tail_tol beyond the input tail.
FockDensity thermal_loss_fock(const FockDensity& rho, double kappa, double n_b, int mode = 0,
                              int d_env = 0, double tail_tol = kDefaultTailTol);

// Both signals through the tau beamsplitter, second port traced out.
FockDensity mac_mix_fock(const FockDensity& rho_x, const FockDensity& rho_y, double tau);

double entropy_fock(const FockDensity& rho);
double trace_distance_fock(const FockDensity& rho, const FockDensity& sigma);
// Throws SupportError if rho has weight outside the support of sigma.
double rel_entropy_fock(const FockDensity& rho, const FockDensity& sigma);

struct HolevoResult {
  double mi = 0.0;
  double avg_entropy = 0.0;
  double cond_entropy = 0.0;
  double tail = 0.0;
};

// Holevo information of the L-PSK ensemble of TMSV signals sent through the
// effective thermal-loss channel, with the idler kept by the receiver.
HolevoResult psk_ensemble_mi(const mac::EffectiveChannel& eff, int psk_order, int d,
                             double tail_tol = kDefaultTailTol);

// Returns the phase-averaged (output, idler) state used above.
FockDensity psk_average_state(const mac::EffectiveChannel& eff, int psk_order, int d,
                              double tail_tol = kDefaultTailTol);

PhotonDistribution photon_distribution_thermal(double n_mean, int d);

enum class Receiver { Bob, Willie };

struct WeightedDistribution {
  int x = 0;
  int y = 0;
  double weight = 0.0;
  double mean = 0.0;
  PhotonDistribution dist;
};

// The four sparse-coding input combinations seen by one receiver, each a
// thermal state. Combinations with zero weight are dropped. d = 0 picks the
// cutoff from tail_tol.
std::vector<WeightedDistribution> layer1_mode_distributions(const mac::MacParams& p, double alpha,
                                                            double beta, double s, Receiver receiver,
                                                            int d = 0, double tail_tol = 1e-15);

// Single-mode first and second moments in the vacuum-equals-identity
// convention: mean (q, p) and 2x2 covariance.
struct QuadratureMoments {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
};
QuadratureMoments quadrature_moments(const FockDensity& rho, int mode = 0);

}  // namespace eamac::fock
