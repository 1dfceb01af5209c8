#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "magnon/density.hpp"
#include "magnon/noise.hpp"

namespace magnon {

/// How the cavity decay rate enters the system-bath operator L_j = l a_j.
/// Linear: l = Gamma_c (as written); Sqrt: l = sqrt(Gamma_c).
enum class CouplingConvention { Linear, Sqrt };

std::string to_string(CouplingConvention c);
CouplingConvention parse_convention(std::string_view text);

/// Zero-temperature local baths with memory kernel alpha(t, s) = exp(-gamma |t - s|) / 2,
/// centred at zero frequency in the rotating frame at omega_q.
struct BathConfig {
  double gamma = 1.0;
  double coupling_rate = 0.0;  // Gamma_c in internal units
  CouplingConvention convention = CouplingConvention::Linear;

  static BathConfig from(const ValidatedParams& params, double gamma,
                         CouplingConvention convention = CouplingConvention::Linear);

  /// l in L_j = l a_j.
  double lindblad_coefficient() const;
  /// Population decay rate of a cavity mode in the gamma -> infinity limit:
  /// 2 (1/2) l^2 / gamma.
  double matched_markov_rate() const;
};

/// Throws std::invalid_argument on gamma <= 0 or coupling_rate < 0.
void validate_bath(const BathConfig& bath);

struct QsdOptions {
  int depth = 4;              // hierarchy truncation k1 + k2 <= depth
  double max_step = 0.0;      // 0: min(1 / (20 max rate), 1 / (20 gamma))
  double convergence_tol = 1e-8;
};

/// One realisation of the linear stochastic state, vacuum amplitude last.
struct QsdTrajectory {
  TimeGrid grid;
  std::vector<Vec7c> psi;
  int depth = 0;
  std::size_t substeps = 0;  // integrator steps per output interval
};

/// Integrator step count per output interval for the given grid.
std::size_t qsd_substeps(const ValidatedParams& params, const BathConfig& bath, const TimeGrid& grid,
                         const QsdOptions& opts = {});
/// Grid on which a noise path must be sampled (half-step resolution).
TimeGrid qsd_noise_grid(const TimeGrid& grid, std::size_t substeps);

/// Linear non-Markovian stochastic Schroedinger equation solved by the
/// exponential-kernel hierarchy of auxiliary states psi^(k1,k2):
///   d/dt psi^(k) = (-i H - (k1 + k2) gamma + sum_j z*_j(t) L_j) psi^(k)
///                  + sum_j k_j (1/2) L_j psi^(k - e_j) - sum_j L_j^dag psi^(k + e_j)
/// with fixed-step RK4. The noise must live on qsd_noise_grid(grid, substeps).
QsdTrajectory qsd_trajectory(const ValidatedParams& params, const BathConfig& bath, const NoisePath& noise,
                             const PureState& psi0, const TimeGrid& grid, const QsdOptions& opts = {});

/// Drops the vacuum coherence, keeping |vacuum amplitude|^2 as vacuum_weight.
StateTrajectory to_state_trajectory(const QsdTrajectory& traj);

struct ConvergenceReport {
  bool converged = true;
  double max_difference = 0.0;  // max over probes and times of |psi_d - psi_{d+1}|
  int depth = 0;
  std::size_t probes = 0;
};

/// Runs `probes` trajectories at depth and depth + 1 on identical noise
/// (streams 0..probes-1 of `seed`) and compares them.
ConvergenceReport check_hierarchy_convergence(const ValidatedParams& params, const BathConfig& bath,
                                              const PureState& psi0, const TimeGrid& grid,
                                              std::uint64_t seed, std::size_t probes = 10,
                                              const QsdOptions& opts = {});

/// Ordered accumulation of |psi><psi| over trajectories.
class EnsembleAccumulator {
 public:
  explicit EnsembleAccumulator(const TimeGrid& grid);
  void add(const QsdTrajectory& traj);
  std::size_t count() const { return count_; }
  const TimeGrid& grid() const { return grid_; }
  /// Hermitised mean with per-entry standard error of the mean.
  DensityTrajectory finish() const;

 private:
  TimeGrid grid_;
  std::vector<Mat7c> sum_;
  std::vector<Mat7d> sum_abs2_;
  std::size_t count_ = 0;
};

/// rho(t) = (1/N) sum_i |psi_i(t)><psi_i(t)|. Throws on mismatched grids or empty input.
DensityTrajectory ensemble_density(std::span<const QsdTrajectory> trajectories);

using Vec8c = Eigen::Matrix<cplx, kModes + 2, 1>;

/// Extended single-excitation amplitudes: six system modes then one
/// pseudomode per cavity.
struct ExtendedTrajectory {
  TimeGrid grid;
  std::vector<Vec8c> amp;
};

/// System plus one damped pseudomode per bath (coupling sqrt(1/2) l to a_j,
/// amplitude damping gamma, i.e. population decay 2 gamma, zero detuning).
ExtendedTrajectory pseudomode_extended(const ValidatedParams& params, const BathConfig& bath,
                                       const TimeGrid& grid, const PureState& psi0);

/// Reduced system density of the pseudomode embedding; vacuum = 1 - sector norm.
DensityTrajectory pseudomode_solve(const ValidatedParams& params, const BathConfig& bath,
                                   const TimeGrid& grid, const PureState& psi0);

/// Markovian reference: H_eff = H - (i/2) Gamma_eff sum_j a_j^dag a_j on the
/// single-excitation sector; lost norm accumulates in the vacuum.
DensityTrajectory lindblad_solve(const ValidatedParams& params, double Gamma_eff, const TimeGrid& grid,
                                 const PureState& psi0);

}  // namespace magnon
