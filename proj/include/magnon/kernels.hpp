#pragma once

#include <cstdint>
#include <vector>

#include "magnon/analytics.hpp"
#include "magnon/open_system.hpp"

// Data-parallel kernels behind the sweep commands. Each kernel has a serial
// reference and an OpenMP version; both write into preassigned slots and
// fold in index order, so their outputs are bit-identical.
namespace magnon::kernels {

struct JtLandscape {
  std::vector<double> J;
  std::vector<double> t;
  std::vector<double> c;  // row-major, c[iJ * t.size() + it]

  double at(std::size_t iJ, std::size_t it) const { return c[iJ * t.size() + it]; }
};

/// Concurrence of `pair` over the (J, t) grid with every other parameter
/// taken from `base`; the initial state is q1.
JtLandscape sweep_jt_serial(const ValidatedParams& base, ModePair pair, const std::vector<double>& J,
                            const TimeGrid& grid);
JtLandscape sweep_jt_parallel(const ValidatedParams& base, ModePair pair, const std::vector<double>& J,
                              const TimeGrid& grid);

/// simulated_peak for every r_q.
std::vector<OptimalPeak> peak_curve_serial(PairKind kind, const std::vector<double>& r_q, double g_m);
std::vector<OptimalPeak> peak_curve_parallel(PairKind kind, const std::vector<double>& r_q, double g_m);

struct EnsembleRequest {
  std::size_t trajectories = 2000;
  std::uint64_t seed = 1;
  std::size_t batches = 20;  // contiguous groups for batch-means errors of derived quantities
  QsdOptions options;
};

struct EnsembleResult {
  DensityTrajectory density;
  std::vector<DensityTrajectory> batches;
  std::size_t substeps = 0;
};

/// Trajectory i uses Philox stream i of `seed`.
EnsembleResult qsd_ensemble_serial(const ValidatedParams& params, const BathConfig& bath, const PureState& psi0,
                                   const TimeGrid& grid, const EnsembleRequest& request);
EnsembleResult qsd_ensemble_parallel(const ValidatedParams& params, const BathConfig& bath,
                                     const PureState& psi0, const TimeGrid& grid, const EnsembleRequest& request);

int max_threads();

}  // namespace magnon::kernels
