#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "magnon/core_model.hpp"

namespace magnon {

using cplx = std::complex<double>;

/// Complex product in plain real arithmetic, without the NaN recovery path
/// of the library operator. Used in hot loops.
inline cplx cmul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline constexpr int kModes = 6;
using Vec6c = Eigen::Matrix<cplx, kModes, 1>;
using Mat6c = Eigen::Matrix<cplx, kModes, kModes>;
using Vec6d = Eigen::Matrix<double, kModes, 1>;

/// Single-excitation basis order |c1 m1 q1, c2 m2 q2>: index i carries the
/// excitation in mode i.
enum class Mode : int { c1 = 0, m1 = 1, q1 = 2, c2 = 3, m2 = 4, q2 = 5 };

inline constexpr std::array<Mode, kModes> kAllModes = {Mode::c1, Mode::m1, Mode::q1,
                                                      Mode::c2, Mode::m2, Mode::q2};

constexpr int index(Mode m) { return static_cast<int>(m); }
std::string_view mode_name(Mode m);
/// Accepts "c1", "m2", ... ; throws std::invalid_argument otherwise.
Mode parse_mode(std::string_view name);

enum class Frame { Lab, RotatingAtOmegaQ };

struct HamiltonianMatrix {
  Mat6c H = Mat6c::Zero();
  Frame frame = Frame::RotatingAtOmegaQ;
};

struct Spectrum {
  Vec6d values;   // ascending
  Mat6c vectors;  // columns, orthonormal
};

/// Amplitudes over the single-excitation basis. In open dynamics the state
/// may be sub-normalized; the missing weight sits in the vacuum.
struct PureState {
  Vec6c amp = Vec6c::Zero();
  double vacuum_weight = 0.0;
  double t = 0.0;

  cplx operator[](Mode m) const { return amp(index(m)); }
};

/// Uniform grid t_i = t0 + i*dt, i = 0..n-1.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t n = 0;

  static TimeGrid uniform(double t_start, double t_end, std::size_t points);
  double at(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  double end() const { return n == 0 ? t0 : at(n - 1); }
  bool empty() const { return n == 0; }
};

inline constexpr std::size_t kDefaultGridPoints = 2001;

struct StateTrajectory {
  TimeGrid grid;
  std::vector<PureState> states;

  std::size_t size() const { return states.size(); }
};

/// Hamiltonian of two identical cavities, each with one magnon and one qubit,
/// linked by the channel coupling J, restricted to one excitation.
/// Rotating frame subtracts omega_q from the diagonal.
HamiltonianMatrix build_hamiltonian(const ValidatedParams& params,
                                    Frame frame = Frame::RotatingAtOmegaQ);

/// Throws std::invalid_argument if H is not Hermitian to 1e-12.
Spectrum spectrum(const HamiltonianMatrix& H);

PureState initial_state(Mode excited);

/// Exact evolution psi(t) = sum_k exp(-i lambda_k t) v_k <v_k|psi0>.
StateTrajectory propagate(const HamiltonianMatrix& H, const PureState& psi0, const TimeGrid& grid);

/// Sum of |a_i|^2 over the single-excitation sector (vacuum weight excluded).
double total_excitation(const PureState& psi);

/// Caches the eigendecomposition so amplitudes can be evaluated at arbitrary
/// times without rebuilding anything. Used by the sweep kernels.
class SpectralPropagator {
 public:
  SpectralPropagator(const HamiltonianMatrix& H, const PureState& psi0);

  Vec6c state_at(double t) const;
  cplx amplitude(Mode m, double t) const;
  const Spectrum& eigen() const { return spec_; }

 private:
  Spectrum spec_;
  Vec6c overlap_;  // <v_k|psi0>
  double t0_;
};

}  // namespace magnon
