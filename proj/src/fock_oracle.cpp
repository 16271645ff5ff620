#include "eamac/fock_oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "eamac/errors.hpp"
#include "eamac/kernels.hpp"

namespace eamac::fock {

namespace {

Eigen::Index ipow(int base, int exp) {
  Eigen::Index r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

void require_mode(int mode, int modes) {
  if (mode < 0 || mode >= modes) {
    throw ShapeError("mode index " + std::to_string(mode) + " out of range for " +
                     std::to_string(modes) + " modes");
  }
}

// Level of `mode` encoded in flat index i.
int level_of(Eigen::Index i, int d, int modes, int mode) {
  return static_cast<int>((i / ipow(d, modes - 1 - mode)) % d);
}

// Beamsplitter unitary restricted to the N-photon sector, basis indexed by
// the photon number n in the first port (second port holds N - n).
Eigen::MatrixXd sector_unitary(int total, double angle) {
  const int dim = total + 1;
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n + 1 < dim; ++n) {
    const double amp = angle * std::sqrt(static_cast<double>(n + 1) * (total - n));
    gen(n + 1, n) = amp;
    gen(n, n + 1) = -amp;
  }
  return gen.exp();
}

// Moves `mode` to the front, keeping the relative order of the others.
std::vector<int> front_order(int modes, int mode) {
  std::vector<int> order{mode};
  for (int k = 0; k < modes; ++k) {
    if (k != mode) order.push_back(k);
  }
  return order;
}

// out has modes in `order`: out mode j is input mode order[j].
FockDensity permute_modes(const FockDensity& rho, const std::vector<int>& order) {
  const int d = rho.cutoff;
  const int m = rho.modes;
  const Eigen::Index dim = rho.dim();
  std::vector<Eigen::Index> map(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    Eigen::Index out = 0;
    for (int j = 0; j < m; ++j) out = out * d + level_of(i, d, m, order[j]);
    map[i] = out;
  }
  FockDensity res{d, m, CMatrix(dim, dim), rho.tail};
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) res.matrix(map[r], map[c]) = rho.matrix(r, c);
  }
  return res;
}

std::vector<int> inverse(const std::vector<int>& order) {
  std::vector<int> inv(order.size());
  for (std::size_t j = 0; j < order.size(); ++j) inv[order[j]] = static_cast<int>(j);
  return inv;
}

double xlogx_neg(double x) { return x > 0.0 ? -x * std::log(x) : 0.0; }

// Groups indices into connected components of the |rho_ij| > 1e-15 graph.
std::vector<std::vector<Eigen::Index>> components(const CMatrix& m) {
  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (std::abs(m(r, c)) > 1e-15) parent[find(r)] = find(c);
    }
  }
  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<Eigen::Index> slot(n, -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Eigen::Index>(groups.size());
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  return groups;
}

// Eigenvalues of a Hermitian matrix, block by block.
std::vector<double> block_spectrum(const CMatrix& m) {
  std::vector<double> out;
  out.reserve(m.rows());
  for (const auto& g : components(m)) {
    const auto k = static_cast<Eigen::Index>(g.size());
    if (k == 1) {
      out.push_back(m(g[0], g[0]).real());
      continue;
    }
    CMatrix sub(k, k);
    for (Eigen::Index c = 0; c < k; ++c) {
      for (Eigen::Index r = 0; r < k; ++r) sub(r, c) = m(g[r], g[c]);
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sub, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < k; ++i) out.push_back(es.eigenvalues()(i));
  }
  return out;
}

void require_same_shape(const FockDensity& a, const FockDensity& b) {
  if (a.cutoff != b.cutoff || a.modes != b.modes || a.dim() != b.dim()) {
    throw ShapeError("density matrices differ in cutoff or mode count");
  }
}

}  // namespace

void FockDensity::validate() const {
  if (cutoff < 1 || modes < 1) throw ShapeError("cutoff and mode count must be positive");
  if (matrix.rows() != ipow(cutoff, modes) || matrix.cols() != matrix.rows()) {
    throw ShapeError("density matrix dimension must be cutoff^modes");
  }
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > kEigenTol) {
    throw PhysicalityError("density matrix is not Hermitian");
  }
}

double PhotonDistribution::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) m += static_cast<double>(k) * probs[k];
  return m;
}

int thermal_cutoff(double n_mean, double tail_tol) {
  if (!(n_mean >= 0.0)) throw DomainError("mean photon number must be >= 0");
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw DomainError("tail_tol must lie in (0, 1)");
  if (n_mean == 0.0) return 1;
  const double r = n_mean / (n_mean + 1.0);
  return std::max(1, static_cast<int>(std::ceil(std::log(tail_tol) / std::log(r))));
}

FockVector tmsv_fock(double n_s, int d, double tail_tol) {
  if (!(n_s >= 0.0)) throw DomainError("tmsv_fock requires n_s >= 0");
  if (d < 1) throw ShapeError("cutoff must be >= 1");
  const double r = n_s / (n_s + 1.0);
  const double tail = std::pow(r, d);
  if (tail > tail_tol) {
    throw TruncationError("TMSV tail " + sci(tail) + " exceeds budget at cutoff " +
                              std::to_string(d),
                          thermal_cutoff(n_s, tail_tol));
  }
  FockVector v{d, 2, CVector::Zero(ipow(d, 2)), tail};
  double amp = 1.0 / std::sqrt(n_s + 1.0);
  const double step = std::sqrt(r);
  for (int k = 0; k < d; ++k) {
    v.amplitudes(static_cast<Eigen::Index>(k) * d + k) = amp;
    amp *= step;
  }
  return v;
}

FockVector coherent_fock(cplx alpha, int d, double tail_tol) {
  if (d < 1) throw ShapeError("cutoff must be >= 1");
  FockVector v{d, 1, CVector::Zero(d), 0.0};
  cplx amp = std::exp(-0.5 * std::norm(alpha));
  double weight = 0.0;
  for (int k = 0; k < d; ++k) {
    v.amplitudes(k) = amp;
    weight += std::norm(amp);
    amp *= alpha / std::sqrt(static_cast<double>(k + 1));
  }
  v.tail = std::max(0.0, 1.0 - weight);
  if (v.tail > tail_tol) {
    throw TruncationError("coherent-state tail exceeds budget", d + 1);
  }
  return v;
}

FockDensity thermal_fock(double n_mean, int d, double tail_tol) {
  const auto dist = photon_distribution_thermal(n_mean, d);
  if (dist.tail > tail_tol) {
    throw TruncationError("thermal tail exceeds budget at cutoff " + std::to_string(d),
                          thermal_cutoff(n_mean, tail_tol));
  }
  FockDensity rho{d, 1, CMatrix::Zero(d, d), dist.tail};
  for (int k = 0; k < d; ++k) rho.matrix(k, k) = dist.probs[k];
  return rho;
}

FockVector phase_rotate_fock(const FockVector& state, double theta, int mode) {
  require_mode(mode, state.modes);
  FockVector out = state;
  std::vector<cplx> phase(state.cutoff);
  for (int k = 0; k < state.cutoff; ++k) phase[k] = std::polar(1.0, 2.0 * theta * k);
  for (Eigen::Index i = 0; i < out.dim(); ++i) {
    out.amplitudes(i) *= phase[level_of(i, state.cutoff, state.modes, mode)];
  }
  return out;
}

FockDensity phase_rotate_fock(const FockDensity& rho, double theta, int mode) {
  require_mode(mode, rho.modes);
  const Eigen::Index dim = rho.dim();
  std::vector<cplx> phase(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    phase[i] = std::polar(1.0, 2.0 * theta * level_of(i, rho.cutoff, rho.modes, mode));
  }
  std::vector<cplx> col(dim);
  FockDensity out = rho;
  for (Eigen::Index c = 0; c < dim; ++c) {
    const cplx pc = std::conj(phase[c]);
    for (Eigen::Index r = 0; r < dim; ++r) col[r] = phase[r] * pc;
    simd::cmul({out.matrix.col(c).data(), static_cast<std::size_t>(dim)}, col);
  }
  return out;
}

FockDensity to_density(const FockVector& v) {
  return FockDensity{v.cutoff, v.modes, v.amplitudes * v.amplitudes.adjoint(), v.tail};
}

FockDensity partial_trace(const FockDensity& rho, std::span<const int> keep) {
  const int d = rho.cutoff;
  const int m = rho.modes;
  std::vector<bool> kept(m, false);
  for (int k : keep) {
    require_mode(k, m);
    if (kept[k]) throw ShapeError("mode listed twice in partial trace");
    kept[k] = true;
  }
  if (keep.empty()) throw ShapeError("partial trace must keep at least one mode");
  std::vector<int> traced;
  for (int k = 0; k < m; ++k) {
    if (!kept[k]) traced.push_back(k);
  }
  std::vector<int> order(keep.begin(), keep.end());
  order.insert(order.end(), traced.begin(), traced.end());
  const FockDensity perm = permute_modes(rho, order);
  const Eigen::Index kd = ipow(d, static_cast<int>(keep.size()));
  const Eigen::Index td = ipow(d, static_cast<int>(traced.size()));
  FockDensity out{d, static_cast<int>(keep.size()), CMatrix::Zero(kd, kd), rho.tail};
  for (Eigen::Index t = 0; t < td; ++t) {
    for (Eigen::Index c = 0; c < kd; ++c) {
      for (Eigen::Index r = 0; r < kd; ++r) out.matrix(r, c) += perm.matrix(r * td + t, c * td + t);
    }
  }
  return out;
}

FockVector apply_beamsplitter(const FockVector& v, int mode_a, int mode_b, double t) {
  require_mode(mode_a, v.modes);
  require_mode(mode_b, v.modes);
  if (mode_a == mode_b) throw ShapeError("beamsplitter needs two distinct modes");
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("transmissivity must lie in [0, 1]");
  const int d = v.cutoff;
  const int m = v.modes;
  const double angle = std::acos(std::sqrt(t));
  std::vector<Eigen::MatrixXd> sectors;
  for (int n = 0; n <= 2 * (d - 1); ++n) sectors.push_back(sector_unitary(n, angle));

  const Eigen::Index sa = ipow(d, m - 1 - mode_a);
  const Eigen::Index sb = ipow(d, m - 1 - mode_b);
  FockVector out{d, m, CVector::Zero(v.dim()), v.tail};
  double kept = 0.0;
  for (Eigen::Index i = 0; i < v.dim(); ++i) {
    const cplx amp = v.amplitudes(i);
    if (amp == cplx(0.0)) continue;
    const int na = level_of(i, d, m, mode_a);
    const int nb = level_of(i, d, m, mode_b);
    const Eigen::Index base = i - na * sa - nb * sb;
    const int total = na + nb;
    const auto& u = sectors[total];
    for (int ja = std::max(0, total - (d - 1)); ja <= std::min(total, d - 1); ++ja) {
      out.amplitudes(base + ja * sa + (total - ja) * sb) += u(ja, na) * amp;
    }
  }
  kept = out.amplitudes.squaredNorm();
  out.tail = std::max(v.tail, 1.0 - kept);
  return out;
}

FockDensity thermal_loss_fock(const FockDensity& rho, double kappa, double n_b, int mode,
                              int d_env, double tail_tol) {
  require_mode(mode, rho.modes);
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw DomainError("kappa must lie in [0, 1]");
  if (!(n_b >= 0.0)) throw DomainError("n_b must be >= 0");
  if (kappa == 1.0) return rho;

  const double env_tail_budget = tail_tol;
  if (d_env <= 0) d_env = thermal_cutoff(n_b, env_tail_budget);
  const auto env = photon_distribution_thermal(n_b, d_env);
  if (env.tail > env_tail_budget) {
    throw TruncationError("environment cutoff too small for tail budget",
                          thermal_cutoff(n_b, env_tail_budget));
  }

  const int d = rho.cutoff;
  const double angle = std::acos(std::sqrt(kappa));
  std::vector<Eigen::MatrixXd> sectors;
  for (int n = 0; n <= (d - 1) + (d_env - 1); ++n) sectors.push_back(sector_unitary(n, angle));

  // W[sh][j, j2] = sum_m p_m U_{j-sh+m}[j, j-sh] U_{j2-sh+m}[j2, j2-sh], sh = j - i.
  const int sh_min = -(d - 1);
  const int sh_max = d_env - 1;
  std::vector<Eigen::MatrixXd> w(sh_max - sh_min + 1, Eigen::MatrixXd::Zero(d, d));
  for (int sh = sh_min; sh <= sh_max; ++sh) {
    auto& ws = w[sh - sh_min];
    for (int j = std::max(0, sh); j < std::min(d, d + sh); ++j) {
      for (int j2 = std::max(0, sh); j2 < std::min(d, d + sh); ++j2) {
        double acc = 0.0;
        for (int m = std::max(0, sh); m < d_env; ++m) {
          acc += env.probs[m] * sectors[j - sh + m](j, j - sh) * sectors[j2 - sh + m](j2, j2 - sh);
        }
        ws(j, j2) = acc;
      }
    }
  }

  const auto order = front_order(rho.modes, mode);
  const FockDensity front = permute_modes(rho, order);
  const Eigen::Index rest = ipow(d, rho.modes - 1);
  const Eigen::Index dim = front.dim();
  CMatrix out = CMatrix::Zero(dim, dim);
  const auto seg = static_cast<std::size_t>(2 * rest);
  for (int j2 = 0; j2 < d; ++j2) {
    for (int j = 0; j < d; ++j) {
      for (int sh = std::max(sh_min, std::max(j, j2) - (d - 1)); sh <= std::min({sh_max, j, j2}); ++sh) {
        const double coef = w[sh - sh_min](j, j2);
        if (coef == 0.0) continue;
        const Eigen::Index src_r = (j - sh) * rest;
        const Eigen::Index src_c = (j2 - sh) * rest;
        for (Eigen::Index c = 0; c < rest; ++c) {
          const double* x = reinterpret_cast<const double*>(&front.matrix(src_r, src_c + c));
          double* y = reinterpret_cast<double*>(&out(j * rest, j2 * rest + c));
          simd::axpy(coef, {x, seg}, {y, seg});
        }
      }
    }
  }
  FockDensity res{d, rho.modes, std::move(out), 0.0};
  res = permute_modes(res, inverse(order));
  const double lost = rho.trace() - res.trace();
  res.tail = rho.tail + std::max(0.0, lost);
  if (lost > 2.0 * tail_tol) {
    // Suggest the cutoff a thermal state with the output's mean would need.
    double n_in = 0.0;
    for (Eigen::Index i = 0; i < front.dim(); ++i) n_in += static_cast<double>(i / rest) * front.matrix(i, i).real();
    const double n_out = kappa * n_in + (1.0 - kappa) * n_b;
    throw TruncationError("thermal loss pushed " + sci(lost) + " of the trace past the cutoff",
                          std::max(d + 1, thermal_cutoff(n_out, tail_tol)));
  }
  return res;
}

FockDensity mac_mix_fock(const FockDensity& rho_x, const FockDensity& rho_y, double tau) {
  if (rho_x.modes != 1 || rho_y.modes != 1) throw ShapeError("mac_mix_fock takes single-mode states");
  if (rho_x.cutoff != rho_y.cutoff) throw ShapeError("mac_mix_fock needs equal cutoffs");
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("tau must lie in [0, 1]");
  const int d = rho_x.cutoff;
  const double angle = std::acos(std::sqrt(tau));
  std::vector<Eigen::MatrixXd> sectors;
  for (int n = 0; n <= 2 * (d - 1); ++n) sectors.push_back(sector_unitary(n, angle));

  // out[j, j2] = sum over input pairs (a, b), (a2, b2) and discarded level e
  // with j + e = a + b, j2 + e = a2 + b2.
  CMatrix out = CMatrix::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int a2 = 0; a2 < d; ++a2) {
        for (int b2 = 0; b2 < d; ++b2) {
          const cplx in = rho_x.matrix(a, a2) * rho_y.matrix(b, b2);
          if (in == cplx(0.0)) continue;
          const int n1 = a + b;
          const int n2 = a2 + b2;
          for (int e = 0; e <= std::min(n1, n2); ++e) {
            const int j = n1 - e;
            const int j2 = n2 - e;
            if (j >= d || j2 >= d) continue;
            out(j, j2) += sectors[n1](j, a) * in * sectors[n2](j2, a2);
          }
        }
      }
    }
  }
  FockDensity res{d, 1, std::move(out), 0.0};
  res.tail = std::max(rho_x.tail + rho_y.tail, rho_x.trace() * rho_y.trace() - res.trace());
  return res;
}

double entropy_fock(const FockDensity& rho) {
  double s = 0.0;
  for (double lam : block_spectrum(rho.matrix)) {
    if (lam < -kEigenTol) {
      throw PhysicalityError("density matrix eigenvalue " + sci(lam) + " below -1e-10");
    }
    s += xlogx_neg(lam);
  }
  return s;
}

double trace_distance_fock(const FockDensity& rho, const FockDensity& sigma) {
  require_same_shape(rho, sigma);
  double acc = 0.0;
  for (double lam : block_spectrum(rho.matrix - sigma.matrix)) acc += std::abs(lam);
  return 0.5 * acc;
}

double rel_entropy_fock(const FockDensity& rho, const FockDensity& sigma) {
  require_same_shape(rho, sigma);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sigma.matrix);
  double cross = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const auto v = es.eigenvectors().col(k);
    const double w = (v.adjoint() * rho.matrix * v)(0, 0).real();
    const double lam = es.eigenvalues()(k);
    if (lam <= kEigenTol) {
      if (w > kEigenTol) throw SupportError("rho has weight outside the support of sigma");
      continue;
    }
    cross += w * std::log(lam);
  }
  return -entropy_fock(rho) - cross;
}

namespace {

FockDensity received_state(const mac::EffectiveChannel& eff, int d, double tail_tol) {
  const FockDensity sent = to_density(tmsv_fock(eff.n_s, d, tail_tol));
  return thermal_loss_fock(sent, eff.kappa_eff, eff.n_b_eff(), 0, 0, tail_tol);
}

// Phase-covariance of the loss channel and the TMSV symmetry let the symbol
// phase act on the idler after the channel.
FockDensity phase_average(const FockDensity& rx, int psk_order) {
  FockDensity avg{rx.cutoff, rx.modes, CMatrix::Zero(rx.dim(), rx.dim()), rx.tail};
  for (int j = 0; j < psk_order; ++j) {
    avg.matrix += phase_rotate_fock(rx, std::numbers::pi * j / psk_order, 1).matrix;
  }
  avg.matrix /= static_cast<double>(psk_order);
  return avg;
}

}  // namespace

FockDensity psk_average_state(const mac::EffectiveChannel& eff, int psk_order, int d,
                              double tail_tol) {
  if (psk_order < 1) throw DomainError("PSK order must be >= 1");
  return phase_average(received_state(eff, d, tail_tol), psk_order);
}

HolevoResult psk_ensemble_mi(const mac::EffectiveChannel& eff, int psk_order, int d,
                             double tail_tol) {
  if (psk_order < 1) throw DomainError("PSK order must be >= 1");
  const FockDensity rx = received_state(eff, d, tail_tol);
  HolevoResult res;
  res.cond_entropy = entropy_fock(rx);
  res.tail = rx.tail;
  if (psk_order == 1) {
    res.avg_entropy = res.cond_entropy;
    return res;
  }
  res.avg_entropy = entropy_fock(phase_average(rx, psk_order));
  res.mi = res.avg_entropy - res.cond_entropy;
  return res;
}

PhotonDistribution photon_distribution_thermal(double n_mean, int d) {
  if (!(n_mean >= 0.0)) throw DomainError("mean photon number must be >= 0");
  if (d < 1) throw ShapeError("cutoff must be >= 1");
  PhotonDistribution dist;
  dist.probs.resize(d);
  const double r = n_mean / (n_mean + 1.0);
  double p = 1.0 / (n_mean + 1.0);
  for (int k = 0; k < d; ++k) {
    dist.probs[k] = p;
    p *= r;
  }
  dist.tail = std::pow(r, d);
  return dist;
}

std::vector<WeightedDistribution> layer1_mode_distributions(const mac::MacParams& p, double alpha,
                                                            double beta, double s, Receiver receiver,
                                                            int d, double tail_tol) {
  if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta >= 0.0 && beta <= 1.0)) {
    throw DomainError("sparsities must lie in [0, 1]");
  }
  if (!(s >= 0.0)) throw DomainError("pulse photon number must be >= 0");
  const bool bob = receiver == Receiver::Bob;
  const double gain = bob ? p.kappa() : 1.0 - p.kappa();
  const double background = bob ? p.n_t() : p.kappa() * p.n_b();
  const double peak = gain * s + background;
  if (d <= 0) d = thermal_cutoff(peak, tail_tol);
  std::vector<WeightedDistribution> out;
  for (int x = 0; x <= 1; ++x) {
    for (int y = 0; y <= 1; ++y) {
      const double w = (x ? alpha : 1.0 - alpha) * (y ? beta : 1.0 - beta);
      if (w == 0.0) continue;
      const double mean = gain * s * (p.tau() * x + (1.0 - p.tau()) * y) + background;
      out.push_back({x, y, w, mean, photon_distribution_thermal(mean, d)});
    }
  }
  return out;
}

QuadratureMoments quadrature_moments(const FockDensity& rho, int mode) {
  require_mode(mode, rho.modes);
  const std::vector<int> keep{mode};
  const FockDensity single = rho.modes == 1 ? rho : partial_trace(rho, keep);
  const int d = single.cutoff;
  CMatrix a = CMatrix::Zero(d, d);
  for (int k = 1; k < d; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const cplx ea = (single.matrix * a).trace();
  const cplx ea2 = (single.matrix * a * a).trace();
  const double n = (single.matrix * a.adjoint() * a).trace().real();
  QuadratureMoments mo;
  mo.mean << 2.0 * ea.real(), 2.0 * ea.imag();
  const double qq = 2.0 * ea2.real() + 2.0 * n + 1.0;
  const double pp = -2.0 * ea2.real() + 2.0 * n + 1.0;
  const double qp = 2.0 * ea2.imag();
  mo.cov << qq - mo.mean(0) * mo.mean(0), qp - mo.mean(0) * mo.mean(1),
      qp - mo.mean(0) * mo.mean(1), pp - mo.mean(1) * mo.mean(1);
  return mo;
}

}  // namespace eamac::fock
