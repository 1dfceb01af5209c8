#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "magnon/entanglement.hpp"

namespace magnon {

/// The four remote pairings whose peak concurrence has a closed form.
enum class PairKind { mm, qq, q1m2, m1q2 };

inline constexpr std::array<PairKind, 4> kAllPairKinds = {PairKind::mm, PairKind::qq, PairKind::q1m2,
                                                          PairKind::m1q2};

ModePair pair_modes(PairKind kind);
std::string_view pair_kind_name(PairKind kind);
/// Accepts "mm", "qq", "q1m2", "m1q2" or the mode spelling "m1-m2" etc.
PairKind parse_pair_kind(std::string_view text);

struct ResonantOptimum {
  double G0 = 0.0;      // 4 (g_m^2 + g_q^2) + J^2
  double J = 0.0;       // coupling at which G0 and t_peak were evaluated
  int n = 1;
  double t_peak = 0.0;  // 2 n pi / sqrt(G0)
  double J_opt = 0.0;   // sqrt((g_m^2 + g_q^2) / 2)
  double t_opt = 0.0;   // 2 pi / (3 J_opt)
};

/// Resonant-case optimum. If `J` is not given it defaults to J_opt.
/// Throws std::domain_error when both couplings vanish or n < 1.
ResonantOptimum resonant_optimum(double g_m, double g_q, int n = 1, std::optional<double> J = {});

double eta(double r_q);
double peak_concurrence_mm(double r_q);
double peak_concurrence_qq(double r_q);
/// Throws std::domain_error at r_q = 0.
double peak_concurrence_q1m2(double r_q);
double peak_concurrence_m1q2(double r_q);
double peak_concurrence(PairKind kind, double r_q);

struct GoldenResult {
  double x = 0.0;
  double fx = 0.0;
};

/// Golden-section maximisation of a unimodal function on [a, b].
GoldenResult golden_section_max(const std::function<double(double)>& f, double a, double b,
                                double tol);

struct RqMaximum {
  bool interior = false;  // false when the maximum sits on the bracket boundary
  double r_q = 0.0;
  double c_peak = 0.0;
};

RqMaximum maximize_over_rq(PairKind kind, double lo, double hi, double tol = 1e-10);

struct PeakResult {
  double t = 0.0;
  double c = 0.0;
};

struct PeakSearchOptions {
  double points_per_period = 1000.0;
  double time_tolerance = 1e-10;  // relative to the fastest period
  double tie_tolerance = 1e-9;    // peaks within this of the best count as equal
};

/// Maximum of the closed-system concurrence C_ab(t) over [t_begin, t_end],
/// starting from q1 excited. Grid scan at `points_per_period` samples of the
/// fastest Bohr period, then golden-section refinement of every competitive
/// local maximum. Equal peaks resolve to the earliest one.
/// Throws std::invalid_argument for an empty window.
PeakResult numeric_peak_search(const ValidatedParams& params, ModePair pair, double t_begin,
                               double t_end, const PeakSearchOptions& opts = {});
PeakResult numeric_peak_search(const ValidatedParams& params, PairKind kind, double t_begin,
                               double t_end, const PeakSearchOptions& opts = {});

/// Same search against an already-built propagator.
PeakResult peak_search(const SpectralPropagator& prop, ModePair pair, double t_begin, double t_end,
                       const PeakSearchOptions& opts = {});

struct OptimalPeak {
  double J = 0.0;
  double t = 0.0;
  double c = 0.0;
};

/// Simulated peak concurrence for the resonant system with g_m and
/// g_q = r_q g_m. For mm the channel coupling is fixed at J_opt; for the other
/// pairs J is optimised numerically over (0, 4 g_m (1 + r_q)] by a grid scan
/// followed by golden-section refinement, with a nested time search over one
/// and a half periods 2 pi / sqrt(G0).
OptimalPeak simulated_peak(PairKind kind, double r_q, double g_m = 1.0, std::size_t j_points = 200);

}  // namespace magnon
