#pragma once

#include <vector>

#include "magnon/density.hpp"

namespace magnon {

using Mat4c = Eigen::Matrix<cplx, 4, 4>;

/// Two-mode density in basis {|00>, |01>, |10>, |11>}; the first label of the
/// pair (mode a) is the left tensor factor, so |10> means a excited.
struct TwoQubitDensity {
  Mat4c rho = Mat4c::Zero();
  Mode a = Mode::m1;
  Mode b = Mode::m2;
};

namespace basis2 {
inline constexpr int k00 = 0;
inline constexpr int k01 = 1;
inline constexpr int k10 = 2;
inline constexpr int k11 = 3;
}  // namespace basis2

inline constexpr double kPsdTolerance = 1e-10;

TwoQubitDensity reduce_two_mode(const PureState& psi, Mode a, Mode b);
TwoQubitDensity reduce_two_mode(const DensityState& state, Mode a, Mode b);

/// Wootters concurrence max(0, l1 - l2 - l3 - l4). The l_i are obtained as
/// singular values of B^T (sy x sy) B with rho = B B^dagger, which equal the
/// square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy).
/// Throws std::invalid_argument for non-Hermitian, non-unit-trace or non-PSD input.
double concurrence_wootters(const Mat4c& rho);
inline double concurrence_wootters(const TwoQubitDensity& d) { return concurrence_wootters(d.rho); }

/// True when only diagonal and anti-diagonal entries exceed `tol`.
bool is_x_state(const Mat4c& rho, double tol = 1e-10);

/// Closed form for X-states: 2 max(0, |r_{10,01}| - sqrt(r_00 r_11), |r_{00,11}| - sqrt(r_01 r_10)).
/// Throws std::invalid_argument when rho is not X-shaped to 1e-10.
double concurrence_x_state(const Mat4c& rho);

/// 2 |a_A| |a_B|, valid for any (possibly sub-normalized) single-excitation state.
double concurrence_single_excitation(const PureState& psi, Mode a, Mode b);

struct ConcurrenceSeries {
  Mode a = Mode::m1;
  Mode b = Mode::m2;
  std::vector<double> t;
  std::vector<double> c;

  std::size_t size() const { return c.size(); }
};

struct ModePair {
  Mode a;
  Mode b;
};

/// Parses "m1-m2", "q1-q2", ... ; throws std::invalid_argument.
ModePair parse_pair(std::string_view text);
std::string pair_label(ModePair pair);

ConcurrenceSeries concurrence_series(const StateTrajectory& traj, Mode a, Mode b);
/// Mixed states always go through the Wootters route.
ConcurrenceSeries concurrence_series(const DensityTrajectory& traj, Mode a, Mode b);

}  // namespace magnon
