#include "magnon/hilbert_dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace magnon {

namespace {

constexpr std::array<std::string_view, kModes> kModeNames = {"c1", "m1", "q1", "c2", "m2", "q2"};

}  // namespace

std::string_view mode_name(Mode m) { return kModeNames[static_cast<std::size_t>(index(m))]; }

Mode parse_mode(std::string_view name) {
  for (Mode m : kAllModes) {
    if (mode_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown mode '" + std::string(name) + "' (expected c1 m1 q1 c2 m2 q2)");
}

TimeGrid TimeGrid::uniform(double t_start, double t_end, std::size_t points) {
  if (points == 0) throw std::invalid_argument("time grid must contain at least one point");
  if (points > 1 && !(t_end > t_start)) throw std::invalid_argument("time grid needs t_end > t_start");
  TimeGrid g;
  g.t0 = t_start;
  g.n = points;
  g.dt = points > 1 ? (t_end - t_start) / static_cast<double>(points - 1) : 0.0;
  return g;
}

HamiltonianMatrix build_hamiltonian(const ValidatedParams& p, Frame frame) {
  HamiltonianMatrix out;
  out.frame = frame;
  Mat6c& H = out.H;
  H.setZero();

  const double shift = frame == Frame::RotatingAtOmegaQ ? p.omega_q : 0.0;
  for (int cavity : {0, 3}) {
    const int c = cavity, m = cavity + 1, q = cavity + 2;
    H(c, c) = p.omega_c - shift;
    H(m, m) = p.omega_m - shift;
    H(q, q) = p.omega_q - shift;
    H(c, m) = H(m, c) = p.g_m;
    H(c, q) = H(q, c) = p.g_q;
  }
  H(index(Mode::c1), index(Mode::c2)) = p.J;
  H(index(Mode::c2), index(Mode::c1)) = p.J;
  return out;
}

Spectrum spectrum(const HamiltonianMatrix& H) {
  const double asym = (H.H - H.H.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) throw std::invalid_argument("spectrum: Hamiltonian is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Mat6c> solver(H.H);
  if (solver.info() != Eigen::Success) throw std::runtime_error("spectrum: eigensolver failed");
  return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

PureState initial_state(Mode excited) {
  PureState psi;
  psi.amp(index(excited)) = 1.0;
  return psi;
}

double total_excitation(const PureState& psi) { return psi.amp.squaredNorm(); }

SpectralPropagator::SpectralPropagator(const HamiltonianMatrix& H, const PureState& psi0)
    : spec_(spectrum(H)), overlap_(spec_.vectors.adjoint() * psi0.amp), t0_(psi0.t) {}

Vec6c SpectralPropagator::state_at(double t) const {
  const double tau = t - t0_;
  Vec6c phased;
  for (int k = 0; k < kModes; ++k) {
    phased(k) = std::polar(1.0, -spec_.values(k) * tau) * overlap_(k);
  }
  return spec_.vectors * phased;
}

cplx SpectralPropagator::amplitude(Mode m, double t) const {
  const double tau = t - t0_;
  const int row = index(m);
  cplx acc = 0.0;
  for (int k = 0; k < kModes; ++k) {
    acc += spec_.vectors(row, k) * std::polar(1.0, -spec_.values(k) * tau) * overlap_(k);
  }
  return acc;
}

StateTrajectory propagate(const HamiltonianMatrix& H, const PureState& psi0, const TimeGrid& grid) {
  if (grid.empty()) throw std::invalid_argument("propagate: empty time grid");

  const SpectralPropagator prop(H, psi0);
  StateTrajectory traj;
  traj.grid = grid;
  traj.states.resize(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double t = grid.at(i);
    PureState& s = traj.states[i];
    s.t = t;
    s.amp = t == psi0.t ? psi0.amp : prop.state_at(t);
  }
  return traj;
}

}  // namespace magnon
