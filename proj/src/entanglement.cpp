#include "magnon/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace magnon {

namespace {

using namespace basis2;

void require_distinct(Mode a, Mode b) {
  if (a == b) throw std::invalid_argument("reduce_two_mode: modes of a pair must differ");
}

// sigma_y (x) sigma_y in the {00, 01, 10, 11} basis.
Mat4c spin_flip() {
  Mat4c y = Mat4c::Zero();
  y(k00, k11) = -1.0;
  y(k11, k00) = -1.0;
  y(k01, k10) = 1.0;
  y(k10, k01) = 1.0;
  return y;
}

}  // namespace

TwoQubitDensity reduce_two_mode(const PureState& psi, Mode a, Mode b) {
  require_distinct(a, b);
  const cplx aa = psi[a];
  const cplx ab = psi[b];
  TwoQubitDensity d{Mat4c::Zero(), a, b};
  d.rho(k10, k10) = std::norm(aa);
  d.rho(k01, k01) = std::norm(ab);
  d.rho(k10, k01) = aa * std::conj(ab);
  d.rho(k01, k10) = std::conj(d.rho(k10, k01));
  d.rho(k00, k00) = 1.0 - std::norm(aa) - std::norm(ab);
  return d;
}

TwoQubitDensity reduce_two_mode(const DensityState& state, Mode a, Mode b) {
  require_distinct(a, b);
  const Mat7c& r = state.rho;
  const int ia = index(a), ib = index(b);
  TwoQubitDensity d{Mat4c::Zero(), a, b};
  d.rho(k10, k10) = r(ia, ia).real();
  d.rho(k01, k01) = r(ib, ib).real();
  d.rho(k10, k01) = r(ia, ib);
  d.rho(k01, k10) = r(ib, ia);
  d.rho(k00, k10) = r(kVacuum, ia);
  d.rho(k10, k00) = r(ia, kVacuum);
  d.rho(k00, k01) = r(kVacuum, ib);
  d.rho(k01, k00) = r(ib, kVacuum);
  d.rho(k00, k00) = 1.0 - r(ia, ia).real() - r(ib, ib).real();
  return d;
}

double concurrence_wootters(const Mat4c& rho_in) {
  if ((rho_in - rho_in.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("concurrence: density matrix is not Hermitian");
  }
  if (std::abs(rho_in.trace() - 1.0) > 1e-10) {
    throw std::invalid_argument("concurrence: density matrix trace differs from 1");
  }
  const Mat4c rho = 0.5 * (rho_in + rho_in.adjoint());

  Eigen::SelfAdjointEigenSolver<Mat4c> eig(rho);
  const auto& mu = eig.eigenvalues();
  if (mu.minCoeff() < -kPsdTolerance) {
    throw std::invalid_argument("concurrence: density matrix is not positive semidefinite");
  }

  Mat4c B = eig.eigenvectors();
  for (int k = 0; k < 4; ++k) B.col(k) *= std::sqrt(std::max(mu(k), 0.0));

  const Mat4c S = B.transpose() * spin_flip() * B;
  Eigen::JacobiSVD<Mat4c> svd(S);
  const auto& s = svd.singularValues();  // descending
  return std::max(0.0, s(0) - s(1) - s(2) - s(3));
}

bool is_x_state(const Mat4c& rho, double tol) {
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i == j || i + j == 3) continue;
      if (std::abs(rho(i, j)) > tol) return false;
    }
  }
  return true;
}

double concurrence_x_state(const Mat4c& rho) {
  if (!is_x_state(rho, 1e-10)) throw std::invalid_argument("concurrence_x_state: not an X-state");
  const double p00 = rho(k00, k00).real(), p01 = rho(k01, k01).real();
  const double p10 = rho(k10, k10).real(), p11 = rho(k11, k11).real();
  const double c1 = std::abs(rho(k10, k01)) - std::sqrt(std::max(p00 * p11, 0.0));
  const double c2 = std::abs(rho(k00, k11)) - std::sqrt(std::max(p01 * p10, 0.0));
  return 2.0 * std::max({0.0, c1, c2});
}

double concurrence_single_excitation(const PureState& psi, Mode a, Mode b) {
  return 2.0 * std::abs(psi[a]) * std::abs(psi[b]);
}

ModePair parse_pair(std::string_view text) {
  const auto dash = text.find('-');
  if (dash == std::string_view::npos) {
    throw std::invalid_argument("pair '" + std::string(text) + "' must look like m1-m2");
  }
  ModePair p{parse_mode(text.substr(0, dash)), parse_mode(text.substr(dash + 1))};
  if (p.a == p.b) throw std::invalid_argument("pair '" + std::string(text) + "' repeats a mode");
  return p;
}

std::string pair_label(ModePair pair) {
  return std::string(mode_name(pair.a)) + "-" + std::string(mode_name(pair.b));
}

ConcurrenceSeries concurrence_series(const StateTrajectory& traj, Mode a, Mode b) {
  require_distinct(a, b);
  ConcurrenceSeries out{a, b, {}, {}};
  out.t.reserve(traj.size());
  out.c.reserve(traj.size());
  for (const auto& s : traj.states) {
    out.t.push_back(s.t);
    out.c.push_back(std::min(1.0, concurrence_single_excitation(s, a, b)));
  }
  return out;
}

ConcurrenceSeries concurrence_series(const DensityTrajectory& traj, Mode a, Mode b) {
  require_distinct(a, b);
  ConcurrenceSeries out{a, b, {}, {}};
  out.t.reserve(traj.size());
  out.c.reserve(traj.size());
  for (const auto& s : traj.states) {
    out.t.push_back(s.t);
    out.c.push_back(concurrence_wootters(reduce_two_mode(s, a, b)));
  }
  return out;
}

}  // namespace magnon
