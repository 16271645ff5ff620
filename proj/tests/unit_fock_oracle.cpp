#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "eamac/errors.hpp"
#include "eamac/fock_oracle.hpp"
#include "eamac/gaussian_core.hpp"
#include "eamac/mac_channel.hpp"

using namespace eamac;
using namespace eamac::fock;
using std::numbers::pi;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

FockDensity diag_density(const std::vector<double>& p) {
  FockDensity r;
  r.cutoff = static_cast<int>(p.size());
  r.modes = 1;
  r.matrix = CMatrix::Zero(r.cutoff, r.cutoff);
  for (int k = 0; k < r.cutoff; ++k) r.matrix(k, k) = p[k];
  return r;
}

FockDensity basis_density(int level, int d) {
  std::vector<double> p(d, 0.0);
  p[level] = 1.0;
  return diag_density(p);
}

double geometric(double n, int k) { return std::pow(n, k) / std::pow(n + 1.0, k + 1); }

// Closed-form KL divergence between geometric photon laws.
double geometric_kl(double a, double b) {
  return a * std::log(a / b) - (a + 1.0) * std::log((a + 1.0) / (b + 1.0));
}

}  // namespace

TEST_CASE("thermal cutoff") {
  for (double n : {0.1, 0.5, 1.0, 3.0}) {
    const int d = thermal_cutoff(n, 1e-8);
    const double r = n / (n + 1.0);
    CHECK(std::pow(r, d) <= 1e-8);
    CHECK(std::pow(r, d - 1) > 1e-8);
  }
  CHECK(thermal_cutoff(0.0, 1e-8) == 1);
}

TEST_CASE("tmsv amplitudes and tail") {
  const auto v0 = tmsv_fock(0.0, 4);
  CHECK(std::abs(v0.amplitudes(0) - cplx(1.0)) < 1e-15);
  CHECK(v0.amplitudes.norm() == doctest::Approx(1.0));

  const auto v = tmsv_fock(1.0, 20, 1e-5);
  CHECK(v.amplitudes.squaredNorm() == doctest::Approx(1.0 - std::pow(2.0, -20)).epsilon(1e-14));
  CHECK(v.tail == doctest::Approx(std::pow(2.0, -20)).epsilon(1e-10));
  for (int k = 0; k < 20; ++k) {
    CHECK(std::abs(v.amplitudes(k * 20 + k)) == doctest::Approx(std::sqrt(geometric(1.0, k))).epsilon(1e-13));
  }
  CHECK(std::abs(v.amplitudes(1)) == 0.0);

  try {
    tmsv_fock(1.0, 10);
    FAIL("expected a truncation error");
  } catch (const TruncationError& e) {
    CHECK(e.required_cutoff() == 27);
  }
}

TEST_CASE("reduced tmsv entropy matches the gaussian value") {
  for (double ns : {0.1, 0.5, 1.0}) {
    const auto rho = to_density(tmsv_fock(ns, 40));
    const std::vector<int> keep{0};
    const double s = entropy_fock(partial_trace(rho, keep));
    CHECK(std::abs(s - gaussian::entropy_from_cov(gaussian::CovarianceMatrix::thermal(ns))) < 1e-6);
    CHECK(std::abs(entropy_fock(rho)) < 1e-9);
  }
  CHECK(gaussian::g_entropy(0.5) == doctest::Approx(0.9547712).epsilon(1e-7));
}

TEST_CASE("phase rotation") {
  const auto v = tmsv_fock(0.3, 14);
  CHECK((phase_rotate_fock(v, 0.0, 0).amplitudes - v.amplitudes).norm() == 0.0);
  CHECK((phase_rotate_fock(v, pi, 1).amplitudes - v.amplitudes).norm() < 1e-14);
  FockVector one{3, 1, CVector::Zero(3), 0.0};
  one.amplitudes(1) = 1.0;
  CHECK(std::abs(phase_rotate_fock(one, pi / 2.0, 0).amplitudes(1) - cplx(-1.0)) < 1e-15);

  // Density rotation agrees with rotating the vector first.
  const auto a = phase_rotate_fock(to_density(v), 0.37, 1);
  const auto b = to_density(phase_rotate_fock(v, 0.37, 1));
  CHECK(max_abs(a.matrix - b.matrix) < 1e-14);
  // On a TMSV, rotating either mode gives the same state.
  const auto c = to_density(phase_rotate_fock(v, 0.37, 0));
  CHECK(max_abs(a.matrix - c.matrix) < 1e-14);
}

TEST_CASE("beamsplitter unitarity and interference") {
  const int d = 6;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nrm;
  FockVector v{d, 2, CVector::Zero(d * d), 0.0};
  // Total photon number below the cutoff keeps everything in range.
  for (int a = 0; a < d; ++a)
    for (int b = 0; a + b < d; ++b) v.amplitudes(a * d + b) = cplx(nrm(rng), nrm(rng));
  v.amplitudes.normalize();
  for (double t : {0.0, 0.2, 0.5, 1.0}) {
    const auto out = apply_beamsplitter(v, 0, 1, t);
    CHECK(out.amplitudes.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.tail < 1e-12);
  }
  CHECK((apply_beamsplitter(v, 0, 1, 1.0).amplitudes - v.amplitudes).norm() < 1e-12);

  FockVector one{d, 2, CVector::Zero(d * d), 0.0};
  one.amplitudes(1 * d + 0) = 1.0;
  const auto split = apply_beamsplitter(one, 0, 1, 0.3);
  CHECK(std::norm(split.amplitudes(1 * d + 0)) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(std::norm(split.amplitudes(0 * d + 1)) == doctest::Approx(0.7).epsilon(1e-12));

  // Hong-Ou-Mandel: |1,1> on a balanced splitter never leaves one photon per port.
  FockVector pair{d, 2, CVector::Zero(d * d), 0.0};
  pair.amplitudes(1 * d + 1) = 1.0;
  const auto hom = apply_beamsplitter(pair, 0, 1, 0.5);
  CHECK(std::abs(hom.amplitudes(1 * d + 1)) < 1e-12);
  CHECK(std::norm(hom.amplitudes(2 * d + 0)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("thermal loss special cases") {
  const int d = 6;
  const auto th = thermal_fock(0.4, 30);
  CHECK(max_abs(thermal_loss_fock(th, 1.0, 0.7).matrix - th.matrix) < 1e-12);
  CHECK(max_abs(thermal_loss_fock(basis_density(0, d), 0.3, 0.0).matrix - basis_density(0, d).matrix) < 1e-14);
  const auto lost = thermal_loss_fock(basis_density(1, d), 0.3, 0.0);
  CHECK(lost.matrix(0, 0).real() == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(lost.matrix(1, 1).real() == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(std::abs(lost.trace() - 1.0) < 1e-12);

  // Thermal in, thermal out with the mixed mean photon number.
  const auto out = thermal_loss_fock(th, 0.6, 0.5, 0, 0, 1e-9);
  for (int k = 0; k < 10; ++k)
    CHECK(out.matrix(k, k).real() == doctest::Approx(geometric(0.6 * 0.4 + 0.4 * 0.5, k)).epsilon(1e-7));

  CHECK_THROWS_AS(thermal_loss_fock(thermal_fock(1.0, 40, 1e-6), 0.5, 3.0, 0, 0, 1e-12), TruncationError);
}

TEST_CASE("thermal loss moments match the gaussian channel") {
  const double kappa = 0.6, nb = 0.4;
  const cplx alpha(0.5, -0.3);
  const auto rho = to_density(coherent_fock(alpha, 30, 1e-12));
  const auto out = thermal_loss_fock(rho, kappa, nb, 0, 0, 1e-10);
  const auto mom = quadrature_moments(out);

  gaussian::Vector mean(2);
  mean << 2.0 * alpha.real(), 2.0 * alpha.imag();
  const gaussian::GaussianState in(mean, gaussian::CovarianceMatrix::vacuum(1));
  const auto want = gaussian::apply_gaussian_channel(
      in, std::sqrt(kappa) * gaussian::Matrix::Identity(2, 2),
      (1.0 - kappa) * (2.0 * nb + 1.0) * gaussian::Matrix::Identity(2, 2));
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(mom.mean(i) - want.mean()(i)) < 1e-6);
    for (int j = 0; j < 2; ++j) CHECK(std::abs(mom.cov(i, j) - want.cov()(i, j)) < 1e-6);
  }

  // TMSV through the loss on the signal mode: both marginals.
  const mac::EffectiveChannel eff{0.25, 0.525, 0.1};
  const auto tm = thermal_loss_fock(to_density(tmsv_fock(0.1, 20)), eff.kappa_eff, eff.n_b_eff(), 0, 0);
  const auto cov = eff.covariance();
  for (int mode = 0; mode < 2; ++mode) {
    const auto m = quadrature_moments(tm, mode);
    CHECK(m.mean.norm() < 1e-12);
    CHECK(std::abs(m.cov(0, 0) - cov(2 * mode, 2 * mode)) < 1e-6);
    CHECK(std::abs(m.cov(1, 1) - cov(2 * mode + 1, 2 * mode + 1)) < 1e-6);
  }
}

TEST_CASE("mac mixing") {
  const int d = 12;
  const auto tx = thermal_fock(0.3, d, 1e-5);
  const auto ty = thermal_fock(0.05, d, 1e-5);
  // Truncated inputs: the discarded port carries the other state's trace.
  CHECK(max_abs(mac_mix_fock(tx, ty, 1.0).matrix - ty.trace() * tx.matrix) < 1e-12);
  CHECK(max_abs(mac_mix_fock(tx, ty, 0.0).matrix - tx.trace() * ty.matrix) < 1e-12);
  const auto vac = basis_density(0, d);
  for (double tau : {0.0, 0.4, 1.0}) CHECK(max_abs(mac_mix_fock(vac, vac, tau).matrix - vac.matrix) < 1e-14);
  // Two thermal states mix to a thermal state of the weighted mean.
  const auto mixed = mac_mix_fock(tx, ty, 0.4);
  for (int k = 0; k < 5; ++k)
    CHECK(mixed.matrix(k, k).real() == doctest::Approx(geometric(0.4 * 0.3 + 0.6 * 0.05, k)).epsilon(1e-6));
}

TEST_CASE("spectral quantities") {
  const auto pure = to_density(coherent_fock({0.4, 0.2}, 20));
  CHECK(std::abs(entropy_fock(pure)) < 1e-10);
  CHECK(trace_distance_fock(pure, pure) == doctest::Approx(0.0));
  CHECK(trace_distance_fock(basis_density(0, 3), basis_density(1, 3)) == doctest::Approx(1.0));

  const int d = 60;
  const auto a = thermal_fock(0.1, d, 1e-12);
  const auto b = thermal_fock(0.2, d, 1e-12);
  const double kl = rel_entropy_fock(a, b);
  double classical = 0.0;
  for (int k = 0; k < d; ++k) {
    const double p = a.matrix(k, k).real(), q = b.matrix(k, k).real();
    if (p > 0.0) classical += p * std::log(p / q);
  }
  CHECK(std::abs(kl - classical) < 1e-10);
  CHECK(std::abs(kl - geometric_kl(0.1, 0.2)) < 1e-9);
  CHECK_THROWS_AS(rel_entropy_fock(a, basis_density(0, d)), SupportError);
  CHECK(rel_entropy_fock(a, a) == doctest::Approx(0.0));
}

TEST_CASE("psk ensemble information") {
  const mac::EffectiveChannel eff{0.25, 0.525, 0.1};
  CHECK(psk_ensemble_mi(eff, 1, 24).mi == doctest::Approx(0.0));
  CHECK(psk_ensemble_mi({0.25, 0.525, 0.0}, 16, 24).mi == doctest::Approx(0.0));

  double prev = 0.0;
  for (int l : {2, 4, 8, 16, 32, 64}) {
    const double mi = psk_ensemble_mi(eff, l, 24).mi;
    CHECK(mi >= prev - 1e-12);
    prev = mi;
  }
  const auto r64 = psk_ensemble_mi(eff, 64, 24);
  const auto r128 = psk_ensemble_mi(eff, 128, 24);
  CHECK(std::abs(r64.mi - r128.mi) <= 1e-6);
  CHECK(r64.mi > 0.0);
  // Conditional entropy equals the Gaussian entropy of the effective state.
  CHECK(std::abs(r64.cond_entropy - gaussian::entropy_from_cov(eff.covariance())) < 1e-6);
  CHECK(r64.tail < 1e-7);
}

TEST_CASE("averaged state is dephased in the photon-number difference") {
  const mac::EffectiveChannel eff{0.4, 0.05, 0.1};
  const int d = 10;
  const auto avg = psk_average_state(eff, 16, d);
  for (int i = 0; i < avg.dim(); ++i) {
    for (int j = 0; j < avg.dim(); ++j) {
      const int di = i / d - i % d, dj = j / d - j % d;
      if (di != dj) CHECK(std::abs(avg.matrix(i, j)) < 1e-14);
    }
  }
}

TEST_CASE("chain rule over the two senders") {
  const double ns = 0.1, kappa = 0.5, tau = 0.5, nb = 0.2;
  const int d = 8, L = 8;
  const double tol = 1e-6;
  const mac::MacParams p(tau, kappa, nb);
  const mac::ModulationConfig m{ns, L};

  // Modes (A_X, I_X) then (A_Y, I_Y); reorder to (A_X, A_Y, I_X, I_Y).
  const auto tx = tmsv_fock(ns, d, tol);
  const auto ty = tmsv_fock(ns, d, tol);
  FockVector joint{d, 4, CVector::Zero(d * d * d * d), tx.tail + ty.tail};
  for (int ax = 0; ax < d; ++ax)
    for (int ay = 0; ay < d; ++ay)
      joint.amplitudes(((ax * d + ay) * d + ax) * d + ay) = tx.amplitudes(ax * d + ax) * ty.amplitudes(ay * d + ay);
  const auto mixed = apply_beamsplitter(joint, 0, 1, tau);
  const std::vector<int> keep{0, 2, 3};
  const auto bi = thermal_loss_fock(partial_trace(to_density(mixed), keep), kappa, nb, 0, 0, tol);

  FockDensity avg{d, 3, CMatrix::Zero(bi.dim(), bi.dim()), bi.tail};
  for (int jx = 0; jx < L; ++jx)
    for (int jy = 0; jy < L; ++jy)
      avg.matrix += phase_rotate_fock(phase_rotate_fock(bi, pi * jx / L, 1), pi * jy / L, 2).matrix;
  avg.matrix /= static_cast<double>(L * L);
  const double lhs = entropy_fock(avg) - entropy_fock(bi);

  const double mi_x = psk_ensemble_mi(mac::effective_params(p, m, mac::Sender::X, false), L, d, tol).mi;
  const double mi_y = psk_ensemble_mi(mac::effective_params(p, m, mac::Sender::Y, true), L, d, tol).mi;
  CHECK(lhs >= mi_x + mi_y - 1e-6);

  // Sender X alone, other idler discarded, against its effective channel.
  const std::vector<int> bx{0, 1};
  const auto sx = partial_trace(bi, bx);
  FockDensity avg_x{d, 2, CMatrix::Zero(sx.dim(), sx.dim()), sx.tail};
  for (int j = 0; j < L; ++j) avg_x.matrix += phase_rotate_fock(sx, pi * j / L, 1).matrix;
  avg_x.matrix /= static_cast<double>(L);
  CHECK(std::abs(entropy_fock(avg_x) - entropy_fock(sx) - mi_x) < 1e-4);
}

TEST_CASE("sparse-coding photon distributions") {
  const auto th = photon_distribution_thermal(0.7, 60);
  double sum = 0.0;
  for (double q : th.probs) sum += q;
  CHECK(sum == doctest::Approx(1.0 - th.tail).epsilon(1e-14));
  CHECK(th.tail == doctest::Approx(std::pow(0.7 / 1.7, 60)).epsilon(1e-10));
  CHECK(th.mean() == doctest::Approx(0.7).epsilon(1e-12));

  const mac::MacParams p(0.5, 0.5, 1.0);
  const auto idle = layer1_mode_distributions(p, 0.0, 0.0, 0.01, Receiver::Bob);
  REQUIRE(idle.size() == 1);
  CHECK(idle[0].weight == 1.0);
  CHECK(idle[0].mean == doctest::Approx(0.5));

  const auto w = layer1_mode_distributions(p, 0.2, 0.3, 0.01, Receiver::Willie);
  REQUIRE(w.size() == 4);
  double total = 0.0;
  for (const auto& c : w) {
    total += c.weight;
    if (c.x == 1 && c.y == 0) {
      CHECK(c.mean == doctest::Approx(0.5025).epsilon(1e-14));
      CHECK(c.weight == doctest::Approx(0.2 * 0.7));
    }
  }
  CHECK(total == doctest::Approx(1.0));
}
