#include "magnon/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace magnon {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

void CounterRng::refill() {
  const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                   static_cast<std::uint32_t>(stream_),
                                   static_cast<std::uint32_t>(stream_ >> 32)};
  buffer_ = Philox4x32::block(ctr, key_);
  ++block_;
  used_ = 0;
}

std::uint32_t CounterRng::next_u32() {
  if (used_ == 4) refill();
  return buffer_[static_cast<std::size_t>(used_++)];
}

double CounterRng::uniform() {
  const std::uint64_t hi = next_u32() >> 5;  // 27 bits
  const std::uint64_t lo = next_u32() >> 6;  // 26 bits
  const double u = static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
  return u + 0x1.0p-54;
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

cplx CounterRng::complex_normal(double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

NoisePath ou_noise_path(double gamma, const TimeGrid& grid, std::uint64_t seed, std::uint64_t stream,
                        int baths) {
  if (!(gamma > 0.0)) throw std::invalid_argument("ou_noise_path: gamma must be positive");
  if (grid.empty()) throw std::invalid_argument("ou_noise_path: empty grid");
  if (baths < 1) throw std::invalid_argument("ou_noise_path: need at least one bath");

  NoisePath path;
  path.grid = grid;
  path.seed = seed;
  path.stream = stream;
  path.gamma = gamma;
  path.z.assign(static_cast<std::size_t>(baths), std::vector<cplx>(grid.n));

  CounterRng rng(seed, stream);
  const double decay = std::exp(-gamma * grid.dt);
  const double innovation = kKernelAmplitude * -std::expm1(-2.0 * gamma * grid.dt);
  for (auto& z : path.z) {
    z[0] = rng.complex_normal(kKernelAmplitude);
    for (std::size_t i = 1; i < grid.n; ++i) {
      z[i] = z[i - 1] * decay + rng.complex_normal(innovation);
    }
  }
  return path;
}

}  // namespace magnon
