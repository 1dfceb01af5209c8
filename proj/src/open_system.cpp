#include "magnon/open_system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace magnon {

std::string to_string(CouplingConvention c) { return c == CouplingConvention::Sqrt ? "sqrt" : "linear"; }

CouplingConvention parse_convention(std::string_view text) {
  if (text == "linear") return CouplingConvention::Linear;
  if (text == "sqrt") return CouplingConvention::Sqrt;
  throw std::invalid_argument("unknown coupling convention '" + std::string(text) + "' (linear|sqrt)");
}

BathConfig BathConfig::from(const ValidatedParams& params, double gamma, CouplingConvention convention) {
  return BathConfig{gamma, params.Gamma_c, convention};
}

double BathConfig::lindblad_coefficient() const {
  return convention == CouplingConvention::Sqrt ? std::sqrt(coupling_rate) : coupling_rate;
}

double BathConfig::matched_markov_rate() const {
  const double l = lindblad_coefficient();
  return 2.0 * kKernelAmplitude * l * l / gamma;
}

void validate_bath(const BathConfig& bath) {
  if (!(bath.gamma > 0.0)) throw std::invalid_argument("bath: gamma must be positive");
  if (!(bath.coupling_rate >= 0.0)) throw std::invalid_argument("bath: coupling rate must be non-negative");
}

namespace {

/// Evolves i d/dt psi = A psi for constant non-Hermitian A. Uses the
/// eigendecomposition when the eigenbasis is well conditioned, otherwise the
/// matrix exponential.
template <int N>
class NonHermitianPropagator {
 public:
  using Mat = Eigen::Matrix<cplx, N, N>;
  using Vec = Eigen::Matrix<cplx, N, 1>;

  NonHermitianPropagator(const Mat& A, const Vec& psi0) : A_(A), psi0_(psi0) {
    Eigen::ComplexEigenSolver<Mat> solver(A);
    if (solver.info() == Eigen::Success) {
      V_ = solver.eigenvectors();
      lambda_ = solver.eigenvalues();
      Eigen::PartialPivLU<Mat> lu(V_);
      const Mat Vinv = lu.inverse();
      const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
      const double recon = (V_ * lambda_.asDiagonal() * Vinv - A).cwiseAbs().maxCoeff();
      const double cond = V_.cwiseAbs().maxCoeff() * Vinv.cwiseAbs().maxCoeff();
      if (recon <= 1e-12 * scale && cond < 1e6) {
        coeff_ = Vinv * psi0;
        use_eigen_ = true;
      }
    }
  }

  Vec at(double t) const {
    if (use_eigen_) {
      Vec phased;
      for (int k = 0; k < N; ++k) phased(k) = std::exp(cplx(0.0, -1.0) * lambda_(k) * t) * coeff_(k);
      return V_ * phased;
    }
    const Mat generator = cplx(0.0, -t) * A_;
    return generator.exp() * psi0_;
  }

  bool spectral() const { return use_eigen_; }

 private:
  Mat A_;
  Vec psi0_;
  Mat V_;
  Vec lambda_;
  Vec coeff_;
  bool use_eigen_ = false;
};

using Mat8c = Eigen::Matrix<cplx, kModes + 2, kModes + 2>;

constexpr std::array<int, 2> kCavities = {index(Mode::c1), index(Mode::c2)};

double spectral_radius(const Mat6c& H) {
  Eigen::SelfAdjointEigenSolver<Mat6c> eig(H, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

struct Hierarchy {
  std::vector<std::array<int, 2>> k;
  std::vector<std::array<int, 2>> plus;   // index of k + e_j, -1 beyond truncation
  std::vector<std::array<int, 2>> minus;  // index of k - e_j, -1 when k_j = 0

  explicit Hierarchy(int depth) {
    // Ordered by level so that levels 0..L occupy the first count(L) slots.
    for (int level = 0; level <= depth; ++level) {
      for (int a = level; a >= 0; --a) k.push_back({a, level - a});
    }
    const auto find = [&](int a, int b) -> int {
      for (std::size_t i = 0; i < k.size(); ++i) {
        if (k[i][0] == a && k[i][1] == b) return static_cast<int>(i);
      }
      return -1;
    };
    for (const auto& kk : k) {
      plus.push_back({find(kk[0] + 1, kk[1]), find(kk[0], kk[1] + 1)});
      minus.push_back({kk[0] > 0 ? find(kk[0] - 1, kk[1]) : -1, kk[1] > 0 ? find(kk[0], kk[1] - 1) : -1});
    }
  }

  std::size_t size() const { return k.size(); }
  static std::size_t count(int level) { return static_cast<std::size_t>((level + 1) * (level + 2) / 2); }
  int depth() const { return k.back()[0] + k.back()[1]; }
};

class HierarchyRhs {
 public:
  HierarchyRhs(const Mat6c& H, double gamma, double l, int depth)
      : minus_iH_(cplx(0.0, -1.0) * H), gamma_(gamma), l_(l), h_(depth) {}

  std::size_t size() const { return h_.size(); }
  const Hierarchy& hierarchy() const { return h_; }

  /// Only the first `active` auxiliary states are evaluated; the rest are
  /// identically zero and have zero derivative.
  void operator()(const std::vector<Vec7c>& in, std::array<cplx, 2> noise, std::vector<Vec7c>& out,
                  std::size_t active) const {
    for (std::size_t s = 0; s < active; ++s) {
      const Vec7c& p = in[s];
      Vec7c& d = out[s];
      for (int r = 0; r < kModes; ++r) {
        double re = 0.0, im = 0.0;
        for (int c = 0; c < kModes; ++c) {
          const cplx a = minus_iH_(r, c), x = p(c);
          re += a.real() * x.real() - a.imag() * x.imag();
          im += a.real() * x.imag() + a.imag() * x.real();
        }
        d(r) = cplx(re, im);
      }
      d(kVacuum) = 0.0;
      const int level = h_.k[s][0] + h_.k[s][1];
      if (level > 0) d -= static_cast<double>(level) * gamma_ * p;
      for (int j = 0; j < 2; ++j) {
        const int c = kCavities[static_cast<std::size_t>(j)];
        d(kVacuum) += l_ * cmul(noise[static_cast<std::size_t>(j)], p(c));
        if (const int m = h_.minus[s][static_cast<std::size_t>(j)]; m >= 0) {
          d(kVacuum) += static_cast<double>(h_.k[s][static_cast<std::size_t>(j)]) * kKernelAmplitude * l_ *
                        in[static_cast<std::size_t>(m)](c);
        }
        if (const int q = h_.plus[s][static_cast<std::size_t>(j)]; q >= 0) {
          d(c) -= l_ * in[static_cast<std::size_t>(q)](kVacuum);
        }
      }
    }
  }

 private:
  Mat6c minus_iH_;
  double gamma_;
  double l_;
  Hierarchy h_;
};

}  // namespace

std::size_t qsd_substeps(const ValidatedParams& params, const BathConfig& bath, const TimeGrid& grid,
                         const QsdOptions& opts) {
  if (grid.n < 2) return 1;
  double h_max = opts.max_step;
  if (!(h_max > 0.0)) {
    const double rate = std::max(spectral_radius(build_hamiltonian(params).H), bath.lindblad_coefficient());
    h_max = 1.0 / (20.0 * bath.gamma);
    if (rate > 0.0) h_max = std::min(h_max, 1.0 / (20.0 * rate));
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(grid.dt / h_max - 1e-9)));
}

TimeGrid qsd_noise_grid(const TimeGrid& grid, std::size_t substeps) {
  TimeGrid g;
  g.t0 = grid.t0;
  g.dt = grid.dt / (2.0 * static_cast<double>(substeps));
  g.n = grid.n < 2 ? 1 : 2 * substeps * (grid.n - 1) + 1;
  return g;
}

QsdTrajectory qsd_trajectory(const ValidatedParams& params, const BathConfig& bath, const NoisePath& noise,
                             const PureState& psi0, const TimeGrid& grid, const QsdOptions& opts) {
  validate_bath(bath);
  if (grid.empty()) throw std::invalid_argument("qsd_trajectory: empty grid");
  if (opts.depth < 1) throw std::invalid_argument("qsd_trajectory: hierarchy depth must be >= 1");
  if (noise.z.size() != 2) throw std::invalid_argument("qsd_trajectory: need one noise process per bath");

  const std::size_t m = qsd_substeps(params, bath, grid, opts);
  const TimeGrid ng = qsd_noise_grid(grid, m);
  if (noise.grid.n != ng.n || std::abs(noise.grid.dt - ng.dt) > 1e-12 * std::abs(ng.dt) + 1e-300) {
    throw std::invalid_argument("qsd_trajectory: noise grid does not match the integration grid");
  }

  const HierarchyRhs rhs(build_hamiltonian(params).H, bath.gamma, bath.lindblad_coefficient(), opts.depth);
  // Levels above the highest non-zero one stay zero until their neighbour
  // below becomes non-zero, so evaluating one level past it is exact.
  int top = 0;
  std::size_t S = Hierarchy::count(std::min(top + 1, opts.depth));
  const std::size_t full = rhs.size();
  std::vector<Vec7c> y(full, Vec7c::Zero()), k1(full), k2(full), k3(full), k4(full), tmp(full);
  y[0].head<kModes>() = psi0.amp;
  y[0](kVacuum) = 0.0;

  QsdTrajectory out;
  out.grid = grid;
  out.depth = opts.depth;
  out.substeps = m;
  out.psi.reserve(grid.n);
  out.psi.push_back(y[0]);

  const double h = grid.n < 2 ? 0.0 : grid.dt / static_cast<double>(m);
  const auto noise_at = [&](std::size_t idx) -> std::array<cplx, 2> { return {noise.z[0][idx], noise.z[1][idx]}; };

  for (std::size_t i = 1; i < grid.n; ++i) {
    for (std::size_t s = 0; s < m; ++s) {
      const std::size_t g = 2 * ((i - 1) * m + s);
      rhs(y, noise_at(g), k1, S);
      for (std::size_t q = 0; q < S; ++q) tmp[q] = y[q] + 0.5 * h * k1[q];
      rhs(tmp, noise_at(g + 1), k2, S);
      for (std::size_t q = 0; q < S; ++q) tmp[q] = y[q] + 0.5 * h * k2[q];
      rhs(tmp, noise_at(g + 1), k3, S);
      for (std::size_t q = 0; q < S; ++q) tmp[q] = y[q] + h * k3[q];
      rhs(tmp, noise_at(g + 2), k4, S);
      for (std::size_t q = 0; q < S; ++q) y[q] += (h / 6.0) * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
      if (top < opts.depth) {
        bool nonzero = false;
        for (std::size_t q = Hierarchy::count(top); q < S; ++q) nonzero = nonzero || !y[q].isZero(0.0);
        if (nonzero) {
          ++top;
          S = Hierarchy::count(std::min(top + 1, opts.depth));
        }
      }
    }
    out.psi.push_back(y[0]);
  }
  return out;
}

StateTrajectory to_state_trajectory(const QsdTrajectory& traj) {
  StateTrajectory out;
  out.grid = traj.grid;
  out.states.resize(traj.psi.size());
  for (std::size_t i = 0; i < traj.psi.size(); ++i) {
    out.states[i].t = traj.grid.at(i);
    out.states[i].amp = traj.psi[i].head<kModes>();
    out.states[i].vacuum_weight = std::norm(traj.psi[i](kVacuum));
  }
  return out;
}

ConvergenceReport check_hierarchy_convergence(const ValidatedParams& params, const BathConfig& bath,
                                              const PureState& psi0, const TimeGrid& grid, std::uint64_t seed,
                                              std::size_t probes, const QsdOptions& opts) {
  ConvergenceReport report;
  report.depth = opts.depth;
  report.probes = probes;
  const std::size_t m = qsd_substeps(params, bath, grid, opts);
  const TimeGrid ng = qsd_noise_grid(grid, m);
  QsdOptions deeper = opts;
  deeper.depth = opts.depth + 1;
  for (std::size_t p = 0; p < probes; ++p) {
    const NoisePath noise = ou_noise_path(bath.gamma, ng, seed, p);
    const QsdTrajectory a = qsd_trajectory(params, bath, noise, psi0, grid, opts);
    const QsdTrajectory b = qsd_trajectory(params, bath, noise, psi0, grid, deeper);
    for (std::size_t i = 0; i < a.psi.size(); ++i) {
      const double scale = std::max(1.0, a.psi[i].norm());
      report.max_difference = std::max(report.max_difference, (a.psi[i] - b.psi[i]).norm() / scale);
    }
  }
  report.converged = report.max_difference <= opts.convergence_tol;
  return report;
}

EnsembleAccumulator::EnsembleAccumulator(const TimeGrid& grid)
    : grid_(grid), sum_(grid.n, Mat7c::Zero()), sum_abs2_(grid.n, Mat7d::Zero()) {}

void EnsembleAccumulator::add(const QsdTrajectory& traj) {
  if (traj.grid.n != grid_.n || traj.grid.t0 != grid_.t0 || traj.grid.dt != grid_.dt ||
      traj.psi.size() != grid_.n) {
    throw std::invalid_argument("ensemble_density: trajectories must share one time grid");
  }
  for (std::size_t i = 0; i < grid_.n; ++i) {
    const Mat7c outer = traj.psi[i] * traj.psi[i].adjoint();
    sum_[i] += outer;
    sum_abs2_[i] += outer.cwiseAbs2();
  }
  ++count_;
}

DensityTrajectory EnsembleAccumulator::finish() const {
  if (count_ == 0) throw std::invalid_argument("ensemble_density: no trajectories");
  const double n = static_cast<double>(count_);
  DensityTrajectory out;
  out.grid = grid_;
  out.states.resize(grid_.n);
  out.std_error.resize(grid_.n);
  for (std::size_t i = 0; i < grid_.n; ++i) {
    const Mat7c mean = sum_[i] / n;
    out.states[i].t = grid_.at(i);
    out.states[i].rho = 0.5 * (mean + mean.adjoint());
    if (count_ > 1) {
      const Mat7d var = ((sum_abs2_[i] / n - mean.cwiseAbs2()) * (n / (n - 1.0))).cwiseMax(0.0);
      out.std_error[i] = (var / n).cwiseSqrt();
    } else {
      out.std_error[i].setZero();
    }
  }
  return out;
}

DensityTrajectory ensemble_density(std::span<const QsdTrajectory> trajectories) {
  if (trajectories.empty()) throw std::invalid_argument("ensemble_density: no trajectories");
  EnsembleAccumulator acc(trajectories.front().grid);
  for (const auto& t : trajectories) acc.add(t);
  return acc.finish();
}

ExtendedTrajectory pseudomode_extended(const ValidatedParams& params, const BathConfig& bath,
                                       const TimeGrid& grid, const PureState& psi0) {
  validate_bath(bath);
  if (grid.empty()) throw std::invalid_argument("pseudomode_solve: empty grid");

  Mat8c A = Mat8c::Zero();
  A.topLeftCorner<kModes, kModes>() = build_hamiltonian(params).H;
  const double coupling = std::sqrt(kKernelAmplitude) * bath.lindblad_coefficient();
  for (int j = 0; j < 2; ++j) {
    const int c = kCavities[static_cast<std::size_t>(j)];
    const int p = kModes + j;
    A(c, p) = A(p, c) = coupling;
    A(p, p) = cplx(0.0, -bath.gamma);
  }

  Vec8c start = Vec8c::Zero();
  start.head<kModes>() = psi0.amp;
  const NonHermitianPropagator<kModes + 2> prop(A, start);

  ExtendedTrajectory out;
  out.grid = grid;
  out.amp.reserve(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double t = grid.at(i) - psi0.t;
    out.amp.push_back(t == 0.0 ? start : prop.at(t));
  }
  return out;
}

namespace {

DensityTrajectory sector_densities(const TimeGrid& grid, const std::vector<Vec6c>& amps) {
  DensityTrajectory out;
  out.grid = grid;
  out.states.resize(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    PureState s;
    s.t = grid.at(i);
    s.amp = amps[i];
    s.vacuum_weight = 1.0 - s.amp.squaredNorm();
    out.states[i] = to_density(s);
  }
  return out;
}

}  // namespace

DensityTrajectory pseudomode_solve(const ValidatedParams& params, const BathConfig& bath, const TimeGrid& grid,
                                   const PureState& psi0) {
  const ExtendedTrajectory ext = pseudomode_extended(params, bath, grid, psi0);
  std::vector<Vec6c> amps;
  amps.reserve(ext.amp.size());
  for (const auto& a : ext.amp) amps.push_back(a.head<kModes>());
  return sector_densities(grid, amps);
}

DensityTrajectory lindblad_solve(const ValidatedParams& params, double Gamma_eff, const TimeGrid& grid,
                                 const PureState& psi0) {
  if (!(Gamma_eff >= 0.0)) throw std::invalid_argument("lindblad_solve: Gamma_eff must be non-negative");
  if (grid.empty()) throw std::invalid_argument("lindblad_solve: empty grid");

  Mat6c A = build_hamiltonian(params).H;
  for (int c : kCavities) A(c, c) -= cplx(0.0, 0.5 * Gamma_eff);
  const NonHermitianPropagator<kModes> prop(A, psi0.amp);

  std::vector<Vec6c> amps;
  amps.reserve(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double t = grid.at(i) - psi0.t;
    amps.push_back(t == 0.0 ? psi0.amp : prop.at(t));
  }
  return sector_densities(grid, amps);
}

}  // namespace magnon
