#pragma once

#include <vector>

#include "magnon/hilbert_dynamics.hpp"

namespace magnon {

/// Single-excitation sector plus the global vacuum, vacuum last so that
/// indices 0..5 coincide with Mode.
inline constexpr int kDim = kModes + 1;
inline constexpr int kVacuum = kModes;
using Vec7c = Eigen::Matrix<cplx, kDim, 1>;
using Mat7c = Eigen::Matrix<cplx, kDim, kDim>;
using Mat7d = Eigen::Matrix<double, kDim, kDim>;

struct DensityState {
  Mat7c rho = Mat7c::Zero();
  double t = 0.0;

  double sector_norm() const { return rho.topLeftCorner<kModes, kModes>().trace().real(); }
  double vacuum_weight() const { return rho(kVacuum, kVacuum).real(); }
  double trace() const { return rho.trace().real(); }
};

/// Reduced system density operators on a uniform grid. `std_error` is empty
/// for deterministic solvers and holds the per-entry standard error of the
/// mean (modulus, complex entries) for trajectory ensembles.
struct DensityTrajectory {
  TimeGrid grid;
  std::vector<DensityState> states;
  std::vector<Mat7d> std_error;

  std::size_t size() const { return states.size(); }
};

/// |psi><psi| on the sector with the vacuum weight on the diagonal.
inline DensityState to_density(const PureState& psi) {
  DensityState d;
  d.t = psi.t;
  d.rho.topLeftCorner<kModes, kModes>() = psi.amp * psi.amp.adjoint();
  d.rho(kVacuum, kVacuum) = psi.vacuum_weight;
  return d;
}

}  // namespace magnon
