#include "magnon/kernels.hpp"

#include <algorithm>
#include <stdexcept>

#include <omp.h>

namespace magnon::kernels {

namespace {

void fill_row(const ValidatedParams& base, ModePair pair, double J, const TimeGrid& grid, double* row) {
  ValidatedParams p = base;
  p.J = J;
  const SpectralPropagator prop(build_hamiltonian(p), initial_state(Mode::q1));
  for (std::size_t it = 0; it < grid.n; ++it) {
    const Vec6c psi = prop.state_at(grid.at(it));
    row[it] = 2.0 * std::abs(psi(index(pair.a))) * std::abs(psi(index(pair.b)));
  }
}

JtLandscape make_landscape(const std::vector<double>& J, const TimeGrid& grid) {
  if (J.empty() || grid.empty()) throw std::invalid_argument("sweep_jt: empty grid");
  JtLandscape out;
  out.J = J;
  out.t.resize(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) out.t[i] = grid.at(i);
  out.c.assign(J.size() * grid.n, 0.0);
  return out;
}

struct EnsembleFold {
  EnsembleAccumulator total;
  std::vector<EnsembleAccumulator> batches;
  std::size_t per_batch;

  EnsembleFold(const TimeGrid& grid, const EnsembleRequest& req)
      : total(grid), per_batch(1) {
    const std::size_t b = std::min(req.batches, req.trajectories);
    if (b > 0) {
      per_batch = (req.trajectories + b - 1) / b;
      batches.assign(b, EnsembleAccumulator(grid));
    }
  }

  void add(std::size_t index, const QsdTrajectory& traj) {
    total.add(traj);
    if (!batches.empty()) batches[std::min(index / per_batch, batches.size() - 1)].add(traj);
  }

  EnsembleResult finish(std::size_t substeps) const {
    EnsembleResult r;
    r.density = total.finish();
    for (const auto& b : batches) {
      if (b.count() > 0) r.batches.push_back(b.finish());
    }
    r.substeps = substeps;
    return r;
  }
};

void check_request(const BathConfig& bath, const TimeGrid& grid, const EnsembleRequest& req) {
  validate_bath(bath);
  if (req.trajectories == 0) throw std::invalid_argument("qsd ensemble: need at least one trajectory");
  if (grid.empty()) throw std::invalid_argument("qsd ensemble: empty grid");
}

QsdTrajectory run_one(const ValidatedParams& params, const BathConfig& bath, const PureState& psi0,
                      const TimeGrid& grid, const TimeGrid& noise_grid, const EnsembleRequest& req,
                      std::size_t i) {
  const NoisePath noise = ou_noise_path(bath.gamma, noise_grid, req.seed, i);
  return qsd_trajectory(params, bath, noise, psi0, grid, req.options);
}

constexpr std::size_t kBlock = 64;

}  // namespace

int max_threads() { return omp_get_max_threads(); }

JtLandscape sweep_jt_serial(const ValidatedParams& base, ModePair pair, const std::vector<double>& J,
                            const TimeGrid& grid) {
  JtLandscape out = make_landscape(J, grid);
  for (std::size_t iJ = 0; iJ < J.size(); ++iJ) fill_row(base, pair, J[iJ], grid, &out.c[iJ * grid.n]);
  return out;
}

JtLandscape sweep_jt_parallel(const ValidatedParams& base, ModePair pair, const std::vector<double>& J,
                              const TimeGrid& grid) {
  JtLandscape out = make_landscape(J, grid);
  const auto rows = static_cast<std::ptrdiff_t>(J.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t iJ = 0; iJ < rows; ++iJ) {
    const auto r = static_cast<std::size_t>(iJ);
    fill_row(base, pair, J[r], grid, &out.c[r * grid.n]);
  }
  return out;
}

std::vector<OptimalPeak> peak_curve_serial(PairKind kind, const std::vector<double>& r_q, double g_m) {
  std::vector<OptimalPeak> out(r_q.size());
  for (std::size_t i = 0; i < r_q.size(); ++i) out[i] = simulated_peak(kind, r_q[i], g_m);
  return out;
}

std::vector<OptimalPeak> peak_curve_parallel(PairKind kind, const std::vector<double>& r_q, double g_m) {
  std::vector<OptimalPeak> out(r_q.size());
  const auto n = static_cast<std::ptrdiff_t>(r_q.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = simulated_peak(kind, r_q[k], g_m);
  }
  return out;
}

EnsembleResult qsd_ensemble_serial(const ValidatedParams& params, const BathConfig& bath, const PureState& psi0,
                                   const TimeGrid& grid, const EnsembleRequest& req) {
  check_request(bath, grid, req);
  const std::size_t m = qsd_substeps(params, bath, grid, req.options);
  const TimeGrid ng = qsd_noise_grid(grid, m);
  EnsembleFold fold(grid, req);
  for (std::size_t i = 0; i < req.trajectories; ++i) fold.add(i, run_one(params, bath, psi0, grid, ng, req, i));
  return fold.finish(m);
}

EnsembleResult qsd_ensemble_parallel(const ValidatedParams& params, const BathConfig& bath,
                                     const PureState& psi0, const TimeGrid& grid, const EnsembleRequest& req) {
  check_request(bath, grid, req);
  const std::size_t m = qsd_substeps(params, bath, grid, req.options);
  const TimeGrid ng = qsd_noise_grid(grid, m);
  EnsembleFold fold(grid, req);

  std::vector<QsdTrajectory> block(kBlock);
  for (std::size_t start = 0; start < req.trajectories; start += kBlock) {
    const std::size_t count = std::min(kBlock, req.trajectories - start);
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      block[k] = run_one(params, bath, psi0, grid, ng, req, start + k);
    }
    for (std::size_t k = 0; k < count; ++k) fold.add(start + k, block[k]);
  }
  return fold.finish(m);
}

}  // namespace magnon::kernels
