#include "eamac/gaussian_core.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "eamac/errors.hpp"

namespace eamac::gaussian {

namespace {

void require_shape(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw ShapeError("covariance matrix must be square, got " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  }
  if (m.rows() == 0 || m.rows() % 2 != 0) {
    throw ShapeError("covariance matrix dimension must be a positive even number, got " +
                     std::to_string(m.rows()));
  }
}

std::vector<double> pair_up(std::vector<double> magnitudes) {
  std::sort(magnitudes.begin(), magnitudes.end());
  std::vector<double> out;
  out.reserve(magnitudes.size() / 2);
  for (std::size_t i = 0; i + 1 < magnitudes.size(); i += 2) {
    out.push_back(0.5 * (magnitudes[i] + magnitudes[i + 1]));
  }
  return out;
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(Matrix entries) : entries_(std::move(entries)) {
  require_shape(entries_);
  const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= kSymmetryTol)) {
    throw DomainError("covariance matrix is not symmetric (max |A - A^T| = " +
                      sci(asym) + ")");
  }
}

CovarianceMatrix CovarianceMatrix::vacuum(int modes) {
  if (modes <= 0) throw ShapeError("mode count must be positive");
  return CovarianceMatrix(Matrix::Identity(2 * modes, 2 * modes));
}

CovarianceMatrix CovarianceMatrix::thermal(double mean_photons, int modes) {
  if (!(mean_photons >= 0.0)) throw DomainError("thermal mean photon number must be >= 0");
  if (modes <= 0) throw ShapeError("mode count must be positive");
  return CovarianceMatrix((2.0 * mean_photons + 1.0) * Matrix::Identity(2 * modes, 2 * modes));
}

CovarianceMatrix CovarianceMatrix::marginal(std::span<const int> keep) const {
  const auto k = static_cast<Eigen::Index>(keep.size());
  Matrix out(2 * k, 2 * k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      if (keep[a] < 0 || keep[a] >= modes()) throw ShapeError("mode index out of range");
      out.block(2 * a, 2 * b, 2, 2) = block(keep[a], keep[b]);
    }
  }
  return CovarianceMatrix(std::move(out));
}

bool CovarianceMatrix::is_physical() const {
  const auto spectrum = symplectic_eigenvalues(*this);
  if (spectrum.values.front() < 1.0 - kPhysicalTol) return false;
  // nu >= 1 alone admits indefinite matrices; require positivity too.
  Eigen::SelfAdjointEigenSolver<Matrix> es(entries_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > 0.0;
}

bool SymplecticSpectrum::is_pure(double tol) const {
  return std::all_of(values.begin(), values.end(),
                     [tol](double v) { return std::abs(v - 1.0) <= tol; });
}

GaussianState::GaussianState(Vector mean, CovarianceMatrix cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.size() != cov_.matrix().rows()) {
    throw ShapeError("mean length " + std::to_string(mean_.size()) + " does not match 2*modes = " +
                     std::to_string(cov_.matrix().rows()));
  }
  if (!cov_.is_physical()) {
    throw PhysicalityError("covariance matrix violates the uncertainty relation");
  }
}

GaussianState::GaussianState(CovarianceMatrix cov)
    : mean_(Vector::Zero(cov.matrix().rows())), cov_(std::move(cov)) {
  if (!cov_.is_physical()) {
    throw PhysicalityError("covariance matrix violates the uncertainty relation");
  }
}

double g_entropy(double x) {
  if (!(x >= 0.0)) throw DomainError("g_entropy requires x >= 0, got " + sci(x));
  if (x == 0.0) return 0.0;
  return (x + 1.0) * std::log1p(x) - x * std::log(x);
}

Matrix symplectic_form(int modes) {
  Matrix omega = Matrix::Zero(2 * modes, 2 * modes);
  for (int k = 0; k < modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

SymplecticSpectrum symplectic_eigenvalues(const Matrix& cov) {
  require_shape(cov);
  return symplectic_eigenvalues(CovarianceMatrix(cov));
}

SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& cov) {
  const Matrix& lam = cov.matrix();
  const int m = cov.modes();
  const Matrix omega = symplectic_form(m);

  std::vector<double> magnitudes;
  magnitudes.reserve(2 * m);

  Eigen::SelfAdjointEigenSolver<Matrix> es(lam);
  if (es.eigenvalues().minCoeff() > 0.0) {
    // i Omega Lam is similar to the Hermitian i sqrt(Lam) Omega sqrt(Lam).
    const Matrix root = es.operatorSqrt();
    const Eigen::MatrixXcd h = std::complex<double>(0.0, 1.0) * (root * omega * root).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(h, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < hs.eigenvalues().size(); ++i) {
      magnitudes.push_back(std::abs(hs.eigenvalues()(i)));
    }
  } else {
    Eigen::EigenSolver<Matrix> gs(omega * lam, false);
    for (Eigen::Index i = 0; i < gs.eigenvalues().size(); ++i) {
      magnitudes.push_back(std::abs(gs.eigenvalues()(i)));
    }
  }
  return SymplecticSpectrum{pair_up(std::move(magnitudes))};
}

double entropy_from_cov(const CovarianceMatrix& cov) {
  const auto spectrum = symplectic_eigenvalues(cov);
  double s = 0.0;
  for (double nu : spectrum.values) {
    if (nu < 1.0 - kPhysicalTol) {
      throw PhysicalityError("symplectic eigenvalue " + sci(nu) + " below 1");
    }
    s += g_entropy(std::max(0.0, (nu - 1.0) / 2.0));
  }
  return s;
}

GaussianState schur_condition_heterodyne(const GaussianState& state, std::span<const int> measured,
                                         const Vector& outcome) {
  const int m = state.modes();
  if (measured.empty()) throw DomainError("heterodyne needs at least one measured mode");
  std::vector<bool> is_measured(m, false);
  for (int k : measured) {
    if (k < 0 || k >= m) throw ShapeError("measured mode index out of range");
    if (is_measured[k]) throw DomainError("measured mode listed twice");
    is_measured[k] = true;
  }
  std::vector<int> kept;
  for (int k = 0; k < m; ++k) {
    if (!is_measured[k]) kept.push_back(k);
  }
  if (kept.empty()) throw DomainError("heterodyne must leave at least one mode unmeasured");
  const auto nm = static_cast<Eigen::Index>(measured.size());
  const auto na = static_cast<Eigen::Index>(kept.size());
  if (outcome.size() != 2 * nm) {
    throw ShapeError("outcome length must be 2 * |measured modes|");
  }

  const Matrix& lam = state.cov().matrix();
  auto gather = [&](const std::vector<int>& rows, std::span<const int> cols) {
    Matrix out(2 * static_cast<Eigen::Index>(rows.size()), 2 * static_cast<Eigen::Index>(cols.size()));
    for (std::size_t a = 0; a < rows.size(); ++a) {
      for (std::size_t b = 0; b < cols.size(); ++b) {
        out.block(2 * a, 2 * b, 2, 2) = lam.block(2 * rows[a], 2 * cols[b], 2, 2);
      }
    }
    return out;
  };
  const std::vector<int> meas(measured.begin(), measured.end());
  const Matrix l_aa = gather(kept, kept);
  const Matrix l_am = gather(kept, meas);
  const Matrix l_mm = gather(meas, meas);

  Vector mu_a(2 * na), mu_m(2 * nm);
  for (Eigen::Index a = 0; a < na; ++a) mu_a.segment(2 * a, 2) = state.mean().segment(2 * kept[a], 2);
  for (Eigen::Index b = 0; b < nm; ++b) mu_m.segment(2 * b, 2) = state.mean().segment(2 * meas[b], 2);

  const Eigen::LLT<Matrix> llt(l_mm + Matrix::Identity(2 * nm, 2 * nm));
  if (llt.info() != Eigen::Success) {
    throw PhysicalityError("Lambda_MM + I is not positive definite");
  }
  const Matrix gain = llt.solve(l_am.transpose()).transpose();  // L_AM (L_MM + I)^-1
  Matrix cond = l_aa - gain * l_am.transpose();
  cond = 0.5 * (cond + cond.transpose()).eval();
  Vector mean = mu_a + gain * (outcome - mu_m);
  return GaussianState(std::move(mean), CovarianceMatrix(std::move(cond)));
}

GaussianState apply_gaussian_channel(const GaussianState& state, const Matrix& x, const Matrix& y) {
  const Eigen::Index in_dim = state.cov().matrix().rows();
  if (x.cols() != in_dim || x.rows() % 2 != 0 || x.rows() == 0) {
    throw ShapeError("X must be 2m' x 2m with 2m = " + std::to_string(in_dim));
  }
  if (y.rows() != x.rows() || y.cols() != x.rows()) throw ShapeError("Y must be 2m' x 2m'");
  if ((y - y.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
    throw ChannelValidityError("Y must be symmetric");
  }
  const int out_modes = static_cast<int>(x.rows() / 2);
  const Matrix defect = symplectic_form(out_modes) - x * symplectic_form(state.modes()) * x.transpose();
  const Eigen::MatrixXcd cp = y.cast<std::complex<double>>() +
                              std::complex<double>(0.0, 1.0) * defect.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cp, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPhysicalTol) {
    throw ChannelValidityError("Y + i(Omega - X Omega X^T) is not positive semidefinite (min eig " +
                               sci(es.eigenvalues().minCoeff()) + ")");
  }
  Matrix cov = x * state.cov().matrix() * x.transpose() + y;
  cov = 0.5 * (cov + cov.transpose()).eval();
  return GaussianState(x * state.mean(), CovarianceMatrix(std::move(cov)));
}

Matrix beamsplitter_symplectic(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("beamsplitter transmissivity must lie in [0, 1]");
  const double c = std::sqrt(t);
  const double s = std::sqrt(1.0 - t);
  Matrix bs = Matrix::Zero(4, 4);
  bs.block(0, 0, 2, 2) = c * Matrix::Identity(2, 2);
  bs.block(0, 2, 2, 2) = s * Matrix::Identity(2, 2);
  bs.block(2, 0, 2, 2) = -s * Matrix::Identity(2, 2);
  bs.block(2, 2, 2, 2) = c * Matrix::Identity(2, 2);
  return bs;
}

Matrix phase_rotation(double angle) {
  Matrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

}  // namespace eamac::gaussian
