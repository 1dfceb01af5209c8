#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "magnon/noise.hpp"

using namespace magnon;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("counter streams are reproducible and distinct") {
  CounterRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  std::set<std::uint32_t> seen;
  for (int i = 0; i < 100; ++i) {
    const std::uint32_t x = a.next_u32();
    CHECK(x == b.next_u32());
    seen.insert(x);
    seen.insert(c.next_u32());
    seen.insert(d.next_u32());
  }
  CHECK(seen.size() > 295);
}

TEST_CASE("uniform and normal draws") {
  CounterRng rng(1, 0);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK((u > 0.0 && u < 1.0));
    s += u;
  }
  CHECK(std::abs(s / n - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
  s = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / n) < 5 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 5 * std::sqrt(2.0 / n));
  double v = 0;
  for (int i = 0; i < n; ++i) v += std::norm(rng.complex_normal(0.5));
  CHECK(std::abs(v / n - 0.5) < 5 * 0.5 / std::sqrt(n));
}

TEST_CASE("OU path: stationary variance from one long path") {
  const double gamma = 1.0;
  const std::size_t n = 100000;
  const TimeGrid grid = TimeGrid::uniform(0.0, static_cast<double>(n - 1), n);  // gamma dt = 1
  const NoisePath p = ou_noise_path(gamma, grid, 99, 0, 1);
  double v = 0;
  cplx m = 0;
  for (const cplx& z : p.z[0]) {
    v += std::norm(z);
    m += z;
  }
  v /= static_cast<double>(n);
  m /= static_cast<double>(n);
  // |z|^2 has variance 1/4 and lag-k correlation exp(-2 gamma dt k)
  const double rho = std::exp(-2.0 * gamma * grid.dt);
  const double sigma = std::sqrt(0.25 / n * (1 + rho) / (1 - rho));
  CHECK(std::abs(v - 0.5) < 3 * sigma);
  const double rz = std::exp(-gamma * grid.dt);
  CHECK(std::abs(m) < 4 * std::sqrt(0.5 / n * (1 + rz) / (1 - rz)));
}

TEST_CASE("OU path: ensemble covariance structure") {
  const double gamma = 0.7;
  const TimeGrid grid = TimeGrid::uniform(0.0, 0.05, 6);  // small gamma dt
  const std::size_t N = 40000;
  std::vector<cplx> lag1, lag5, same_conj;
  for (std::size_t s = 0; s < N; ++s) {
    const NoisePath p = ou_noise_path(gamma, grid, 5, s, 1);
    lag1.push_back(p.z[0][1] * std::conj(p.z[0][0]));
    lag5.push_back(p.z[0][5] * std::conj(p.z[0][0]));
    same_conj.push_back(p.z[0][3] * p.z[0][0]);
  }
  const auto mean_se = [](const std::vector<cplx>& x) {
    cplx m = 0;
    for (const auto& v : x) m += v;
    m /= static_cast<double>(x.size());
    double var = 0;
    for (const auto& v : x) var += std::norm(v - m);
    var /= static_cast<double>(x.size() - 1);
    return std::pair{m, std::sqrt(var / static_cast<double>(x.size()))};
  };
  const auto [m1, se1] = mean_se(lag1);
  CHECK(std::abs(m1 - 0.5 * std::exp(-gamma * grid.dt)) < 4 * se1);
  const auto [m5, se5] = mean_se(lag5);
  CHECK(std::abs(m5 - 0.5 * std::exp(-gamma * 5 * grid.dt)) < 4 * se5);
  const auto [mz, sez] = mean_se(same_conj);
  CHECK(std::abs(mz) < 4 * sez);
}

TEST_CASE("OU path determinism, baths and errors") {
  const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 101);
  const NoisePath a = ou_noise_path(0.7, grid, 1234, 9);
  const NoisePath b = ou_noise_path(0.7, grid, 1234, 9);
  const NoisePath c = ou_noise_path(0.7, grid, 1234, 10);
  REQUIRE(a.z.size() == 2);
  CHECK(a.z == b.z);
  CHECK(a.z != c.z);
  CHECK(a.z[0] != a.z[1]);
  CHECK(a.seed == 1234);
  CHECK(a.stream == 9);
  CHECK_THROWS_AS(ou_noise_path(0.0, grid, 1), std::invalid_argument);
  CHECK_THROWS_AS(ou_noise_path(-1.0, grid, 1), std::invalid_argument);
  CHECK_THROWS_AS(ou_noise_path(1.0, TimeGrid{}, 1), std::invalid_argument);
}
