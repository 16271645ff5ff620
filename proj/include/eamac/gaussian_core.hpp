#pragma once

// Gaussian-state algebra in the vacuum-equals-identity quadrature
// convention: quadratures are ordered (q1, p1, q2, p2, ...), the vacuum has
// covariance I and a thermal mode with mean photon number N has (2N+1) I.
// A symplectic eigenvalue nu therefore corresponds to mean photon number
// (nu - 1) / 2.

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace eamac::gaussian {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kPhysicalTol = 1e-9;

class CovarianceMatrix {
 public:
  // Throws ShapeError for non-square or odd-dimension input and DomainError
  // for asymmetry beyond kSymmetryTol. Physicality is not required here.
  explicit CovarianceMatrix(Matrix entries);

  static CovarianceMatrix vacuum(int modes);
  static CovarianceMatrix thermal(double mean_photons, int modes = 1);

  int modes() const { return static_cast<int>(entries_.rows() / 2); }
  const Matrix& matrix() const { return entries_; }
  double operator()(Eigen::Index r, Eigen::Index c) const { return entries_(r, c); }

  // 2x2 block coupling mode i to mode j.
  Matrix block(int i, int j) const { return entries_.block(2 * i, 2 * j, 2, 2); }

  // Covariance of the listed modes, in the listed order.
  CovarianceMatrix marginal(std::span<const int> keep) const;

  bool is_physical() const;

 private:
  Matrix entries_;
};

struct SymplecticSpectrum {
  std::vector<double> values;  // ascending, one per mode

  bool is_pure(double tol = kPhysicalTol) const;
};

class GaussianState {
 public:
  // Throws ShapeError on a mean/cov size mismatch, PhysicalityError if cov
  // is not a valid quantum covariance matrix.
  GaussianState(Vector mean, CovarianceMatrix cov);
  explicit GaussianState(CovarianceMatrix cov);

  const Vector& mean() const { return mean_; }
  const CovarianceMatrix& cov() const { return cov_; }
  int modes() const { return cov_.modes(); }

 private:
  Vector mean_;
  CovarianceMatrix cov_;
};

// Thermal-state entropy (x+1) ln(x+1) - x ln x in nats; g(0) = 0.
double g_entropy(double x);

// Direct sum of [[0, 1], [-1, 0]] over the modes.
Matrix symplectic_form(int modes);

SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& cov);
SymplecticSpectrum symplectic_eigenvalues(const Matrix& cov);

// Sum of g((nu - 1) / 2). Eigenvalues in [1 - 1e-9, 1] clamp to 1; anything
// lower raises PhysicalityError.
double entropy_from_cov(const CovarianceMatrix& cov);

// Ideal heterodyne (measurement covariance I) on `measured` modes with the
// given outcome; returns the Gaussian state of the remaining modes in
// ascending mode order.
GaussianState schur_condition_heterodyne(const GaussianState& state,
                                         std::span<const int> measured,
                                         const Vector& outcome);

// cov -> X cov X^T + Y, mean -> X mean. Throws ChannelValidityError unless
// Y + i(Omega' - X Omega X^T) is positive semidefinite to within 1e-9.
GaussianState apply_gaussian_channel(const GaussianState& state, const Matrix& x,
                                     const Matrix& y);

// 4x4 symplectic [[sqrt(t) I, sqrt(1-t) I], [-sqrt(1-t) I, sqrt(t) I]].
Matrix beamsplitter_symplectic(double t);

// 2x2 quadrature rotation by `angle` (a -> a e^{i angle}).
Matrix phase_rotation(double angle);

}  // namespace eamac::gaussian
