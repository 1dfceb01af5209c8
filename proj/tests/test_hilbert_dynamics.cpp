#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "magnon/entanglement.hpp"
#include "magnon/hilbert_dynamics.hpp"

using namespace magnon;

namespace {

ValidatedParams resonant(double gm, double gq, double J, double omega = 1.0) {
  return validate_params(SystemParams::resonant(gm, gq, J, omega));
}

ValidatedParams si_set(double gq_mhz) {
  SystemParams p;
  p.omega_c = Quantity::mhz(183.0);
  p.omega_m = Quantity::mhz(0.0);
  p.omega_q = Quantity::mhz(0.0);
  p.g_m = Quantity::mhz(21.0);
  p.g_q = Quantity::mhz(gq_mhz);
  p.J = Quantity::rad_per_s(9.23e7);
  p.Gamma_c = Quantity::mhz(1.8);
  return validate_params(p);
}

// Oracle: Pade matrix exponential, independent of the eigensolver path.
Vec6c expm_state(const Mat6c& H, const Vec6c& psi0, double t) {
  const Mat6c A = cplx(0.0, -t) * H;
  return A.exp() * psi0;
}

double max_abs(const Mat6c& M) { return M.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("Hamiltonian entries, resonant unit couplings") {
  const HamiltonianMatrix h = build_hamiltonian(resonant(1, 1, 1));
  Mat6c expect = Mat6c::Zero();
  const auto set = [&](Mode a, Mode b, double v) {
    expect(index(a), index(b)) = v;
    expect(index(b), index(a)) = v;
  };
  set(Mode::c1, Mode::m1, 1);
  set(Mode::c1, Mode::q1, 1);
  set(Mode::c2, Mode::m2, 1);
  set(Mode::c2, Mode::q2, 1);
  set(Mode::c1, Mode::c2, 1);
  CHECK(max_abs(h.H - expect) == 0.0);
}

TEST_CASE("Hamiltonian entries, Fig. 2 couplings") {
  const Mat6c H = build_hamiltonian(resonant(0.4, 0.3, 0.35)).H;
  CHECK(H(0, 1) == cplx(0.4));
  CHECK(H(0, 2) == cplx(0.3));
  CHECK(H(3, 4) == cplx(0.4));
  CHECK(H(3, 5) == cplx(0.3));
  CHECK(H(0, 3) == cplx(0.35));
  // no direct m-q or cross-cavity m/q coupling
  CHECK(H(1, 2) == cplx(0.0));
  CHECK(H(1, 4) == cplx(0.0));
  CHECK(H(2, 5) == cplx(0.0));
  CHECK(H(1, 3) == cplx(0.0));
  CHECK(H(2, 3) == cplx(0.0));
  for (int i = 0; i < kModes; ++i) CHECK(H(i, i) == cplx(0.0));
  CHECK(max_abs(H - H.adjoint()) <= 1e-12);
}

TEST_CASE("Hamiltonian diagonal, SI set in both frames") {
  const ValidatedParams p = si_set(117.0);
  const Mat6c H = build_hamiltonian(p).H;
  const double delta = 183.0 * kRadPerSecPerMHz;
  const double expect[] = {delta, 0, 0, delta, 0, 0};
  for (int i = 0; i < kModes; ++i) CHECK(H(i, i).real() == doctest::Approx(expect[i]).epsilon(1e-15));
  const Mat6c L = build_hamiltonian(p, Frame::Lab).H;
  CHECK(max_abs(L - H) <= 1e-6);  // omega_q = 0 here
  const Mat6c L2 = build_hamiltonian(resonant(0.4, 0.3, 0.35, 5.0), Frame::Lab).H;
  for (int i = 0; i < kModes; ++i) CHECK(L2(i, i) == cplx(5.0));
}

TEST_CASE("spectrum examples") {
  const Spectrum s1 = spectrum(build_hamiltonian(resonant(1, 1, 1)));
  const double e1[] = {-2, -1, 0, 0, 1, 2};
  for (int i = 0; i < kModes; ++i) CHECK(std::abs(s1.values(i) - e1[i]) < 1e-12);
  const Spectrum s2 = spectrum(build_hamiltonian(resonant(2, 2, 2)));
  for (int i = 0; i < kModes; ++i) CHECK(std::abs(s2.values(i) - 2 * e1[i]) < 1e-12);
  const Spectrum s0 = spectrum(build_hamiltonian(resonant(0, 0, 0)));
  CHECK(s0.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spectrum reconstruction and orthonormality on random parameters") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    SystemParams sp = SystemParams::resonant(u(rng), u(rng), u(rng), 1.0);
    sp.omega_c = Quantity::bare(1.0 + u(rng));
    sp.omega_m = Quantity::bare(1.0 - u(rng));
    const HamiltonianMatrix H = build_hamiltonian(validate_params(sp));
    const Spectrum s = spectrum(H);
    for (int i = 1; i < kModes; ++i) CHECK(s.values(i) >= s.values(i - 1));
    CHECK(max_abs(s.vectors.adjoint() * s.vectors - Mat6c::Identity()) < 1e-10);
    const Mat6c recon = s.vectors * s.values.cast<cplx>().asDiagonal() * s.vectors.adjoint();
    CHECK(max_abs(recon - H.H) < 1e-10);
    for (int k = 0; k < kModes; ++k) {
      CHECK((H.H * s.vectors.col(k) - s.values(k) * s.vectors.col(k)).norm() < 1e-10);
    }
  }
}

TEST_CASE("spectrum rejects non-Hermitian input") {
  HamiltonianMatrix H = build_hamiltonian(resonant(1, 1, 1));
  H.H(0, 1) = cplx(1.0, 0.5);
  CHECK_THROWS_AS(spectrum(H), std::invalid_argument);
}

TEST_CASE("degenerate zero eigenspace compared through its projector") {
  // Dark states of each cavity: g_q m - g_m q, with c = 0; for g_m = g_q = J both have energy 0.
  const Spectrum s = spectrum(build_hamiltonian(resonant(1, 1, 1)));
  Mat6c P = s.vectors.col(2) * s.vectors.col(2).adjoint() + s.vectors.col(3) * s.vectors.col(3).adjoint();
  Vec6c d1 = Vec6c::Zero(), d2 = Vec6c::Zero();
  d1(1) = 1 / std::sqrt(2.0);
  d1(2) = -1 / std::sqrt(2.0);
  d2(4) = 1 / std::sqrt(2.0);
  d2(5) = -1 / std::sqrt(2.0);
  const Mat6c Q = d1 * d1.adjoint() + d2 * d2.adjoint();
  CHECK(max_abs(P - Q) < 1e-10);
}

TEST_CASE("equal spacing with doubly degenerate zero for g_m = g_q = J") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double J = u(rng);
    const Spectrum s = spectrum(build_hamiltonian(resonant(J, J, J)));
    CHECK(std::abs(s.values(2)) < 1e-10);
    CHECK(std::abs(s.values(3)) < 1e-10);
    for (int i = 0; i < kModes - 1; ++i) {
      if (i == 2) continue;  // the degenerate pair
      CHECK(std::abs(s.values(i + 1) - s.values(i) - J) < 1e-10);
    }
  }
}

TEST_CASE("initial states") {
  const PureState q1 = initial_state(Mode::q1);
  CHECK(q1.amp == Vec6c::Unit(2));
  CHECK(initial_state(Mode::c1).amp == Vec6c::Unit(0));
  CHECK(initial_state(Mode::m2).amp == Vec6c::Unit(4));
  CHECK(total_excitation(q1) == 1.0);
  CHECK(parse_mode("m2") == Mode::m2);
  CHECK(mode_name(Mode::q1) == "q1");
  CHECK_THROWS_AS(parse_mode("x9"), std::invalid_argument);
}

TEST_CASE("propagate against the matrix exponential oracle") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    SystemParams sp = SystemParams::resonant(u(rng), u(rng), u(rng));
    sp.omega_c = Quantity::bare(1.0 + u(rng));
    const HamiltonianMatrix H = build_hamiltonian(validate_params(sp));
    const TimeGrid grid = TimeGrid::uniform(0.0, 20.0, 41);
    const StateTrajectory tr = propagate(H, initial_state(Mode::q1), grid);
    REQUIRE(tr.size() == 41);
    for (std::size_t i = 0; i < tr.size(); ++i) {
      CHECK(tr.states[i].t == grid.at(i));
      CHECK((tr.states[i].amp - expm_state(H.H, Vec6c::Unit(2), grid.at(i))).norm() < 1e-10);
      CHECK(std::abs(total_excitation(tr.states[i]) - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("propagate special cases") {
  const TimeGrid grid = TimeGrid::uniform(0.0, 30.0, 301);
  // q1 decoupled when g_q = 0
  const StateTrajectory still = propagate(build_hamiltonian(resonant(0.4, 0.0, 0.35)), initial_state(Mode::q1), grid);
  for (const auto& s : still.states) CHECK((s.amp - Vec6c::Unit(2)).norm() < 1e-12);

  const HamiltonianMatrix H = build_hamiltonian(resonant(1, 1, 1));
  const StateTrajectory t0 = propagate(H, initial_state(Mode::m1), TimeGrid::uniform(0.0, 1.0, 2));
  CHECK((t0.states[0].amp - Vec6c::Unit(1)).norm() < 1e-15);

  // integer spectrum: psi(2 pi) equals psi0 up to a global phase
  const StateTrajectory per = propagate(H, initial_state(Mode::q1), TimeGrid::uniform(0.0, 2 * std::numbers::pi, 3));
  CHECK(std::abs(std::abs(per.states[2].amp(2)) - 1.0) < 1e-10);

  CHECK_THROWS_AS(propagate(H, initial_state(Mode::q1), TimeGrid{}), std::invalid_argument);
}

TEST_CASE("composition of evolutions") {
  const HamiltonianMatrix H = build_hamiltonian(resonant(0.4, 0.3, 0.35));
  const double t1 = 3.7, t2 = 8.1;
  const StateTrajectory a = propagate(H, initial_state(Mode::q1), TimeGrid::uniform(0.0, t1 + t2, 2));
  const StateTrajectory b = propagate(H, initial_state(Mode::q1), TimeGrid::uniform(0.0, t1, 2));
  PureState mid = b.states[1];
  mid.t = 0.0;
  const StateTrajectory c = propagate(H, mid, TimeGrid::uniform(0.0, t2, 2));
  CHECK((a.states[1].amp - c.states[1].amp).norm() < 1e-9);
}

TEST_CASE("SpectralPropagator agrees with propagate") {
  const HamiltonianMatrix H = build_hamiltonian(si_set(30.0));
  const TimeGrid grid = TimeGrid::uniform(0.0, 200e-9, 101);
  const StateTrajectory tr = propagate(H, initial_state(Mode::q1), grid);
  const SpectralPropagator prop(H, initial_state(Mode::q1));
  for (std::size_t i = 0; i < grid.n; ++i) {
    CHECK((prop.state_at(grid.at(i)) - tr.states[i].amp).norm() < 1e-10);
    CHECK(std::abs(prop.amplitude(Mode::m2, grid.at(i)) - tr.states[i].amp(4)) < 1e-10);
  }
}

TEST_CASE("frame invariance of concurrence in the resonant case") {
  const ValidatedParams p = resonant(0.4, 0.3, 0.35, 3.0);
  const TimeGrid grid = TimeGrid::uniform(0.0, 40.0, 401);
  const StateTrajectory rot = propagate(build_hamiltonian(p), initial_state(Mode::q1), grid);
  const StateTrajectory lab = propagate(build_hamiltonian(p, Frame::Lab), initial_state(Mode::q1), grid);
  for (const auto& [a, b] : {std::pair{Mode::m1, Mode::m2}, std::pair{Mode::q1, Mode::q2},
                             std::pair{Mode::q1, Mode::m2}, std::pair{Mode::c1, Mode::c2}}) {
    const ConcurrenceSeries r = concurrence_series(rot, a, b);
    const ConcurrenceSeries l = concurrence_series(lab, a, b);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(std::abs(r.c[i] - l.c[i]) < 1e-10);
  }
}

TEST_CASE("time grid") {
  const TimeGrid g = TimeGrid::uniform(1.0, 3.0, 5);
  CHECK(g.n == 5);
  CHECK(g.at(4) == doctest::Approx(3.0));
  CHECK(g.dt == doctest::Approx(0.5));
  CHECK(TimeGrid{}.empty());
}
