#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "magnon/hilbert_dynamics.hpp"

namespace magnon {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// `block(counter, key)` is a pure function; streams are carved out by
/// fixing the upper counter words.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key);
};

/// Sequential draws from the Philox stream identified by (seed, stream).
/// Trajectory i of an ensemble uses stream i, so its noise does not depend on
/// which thread runs it or in which order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next_u32();
  /// Uniform on (0, 1), 53-bit resolution, never exactly 0.
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();
  /// Circular complex Gaussian with E|w|^2 = variance.
  cplx complex_normal(double variance);

 private:
  void refill();

  Philox4x32::Key key_;
  std::uint64_t block_ = 0;
  std::uint64_t stream_;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Complex colored noise for each bath on a uniform grid. Samples are the
/// process that multiplies L_j in the stochastic equation (z*_j(t)); its
/// stationary covariance is M[z(t) conj(z(s))] = exp(-gamma |t - s|) / 2.
struct NoisePath {
  TimeGrid grid;
  std::vector<std::vector<cplx>> z;  // z[bath][sample]
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double gamma = 0.0;
};

inline constexpr double kKernelAmplitude = 0.5;

/// Exact discretisation of the complex Ornstein-Uhlenbeck process:
/// z_0 ~ CN(0, 1/2), z_{n+1} = z_n e^{-gamma dt} + w_n, w_n ~ CN(0, (1 - e^{-2 gamma dt}) / 2).
/// Throws std::invalid_argument for gamma <= 0 or an empty grid.
NoisePath ou_noise_path(double gamma, const TimeGrid& grid, std::uint64_t seed,
                        std::uint64_t stream = 0, int baths = 2);

}  // namespace magnon
