#include "magnon/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace magnon {

namespace {

constexpr double kInvPhi = 0.6180339887498949;  // 1 / golden ratio

struct Scan {
  std::vector<double> t;
  std::vector<double> c;
};

}  // namespace

ModePair pair_modes(PairKind kind) {
  switch (kind) {
    case PairKind::mm: return {Mode::m1, Mode::m2};
    case PairKind::qq: return {Mode::q1, Mode::q2};
    case PairKind::q1m2: return {Mode::q1, Mode::m2};
    case PairKind::m1q2: return {Mode::m1, Mode::q2};
  }
  throw std::logic_error("unreachable");
}

std::string_view pair_kind_name(PairKind kind) {
  switch (kind) {
    case PairKind::mm: return "mm";
    case PairKind::qq: return "qq";
    case PairKind::q1m2: return "q1m2";
    case PairKind::m1q2: return "m1q2";
  }
  throw std::logic_error("unreachable");
}

PairKind parse_pair_kind(std::string_view text) {
  for (PairKind k : kAllPairKinds) {
    if (pair_kind_name(k) == text || pair_label(pair_modes(k)) == text) return k;
  }
  throw std::invalid_argument("unknown pair '" + std::string(text) + "' (expected mm, qq, q1m2, m1q2)");
}

ResonantOptimum resonant_optimum(double g_m, double g_q, int n, std::optional<double> J) {
  const double g2 = g_m * g_m + g_q * g_q;
  if (!(g2 > 0.0)) throw std::domain_error("resonant_optimum: g_m and g_q cannot both vanish");
  if (n < 1) throw std::domain_error("resonant_optimum: n must be a positive integer");

  ResonantOptimum r;
  r.n = n;
  r.J_opt = std::sqrt(g2 / 2.0);
  r.t_opt = 2.0 * std::numbers::pi / (3.0 * r.J_opt);
  r.J = J.value_or(r.J_opt);
  r.G0 = 4.0 * g2 + r.J * r.J;
  r.t_peak = 2.0 * n * std::numbers::pi / std::sqrt(r.G0);
  return r;
}

double eta(double r_q) { return std::sqrt(8.0 * std::pow(r_q, 4) + 1.0); }

double peak_concurrence_mm(double r_q) {
  const double r2 = r_q * r_q;
  return 3.0 * std::sqrt(3.0) * r2 / (2.0 * (r2 + 1.0) * (r2 + 1.0));
}

double peak_concurrence_qq(double r_q) {
  const double e = eta(r_q);
  const double r2 = r_q * r_q;
  return std::sqrt((e - 1.0) * std::pow(e + 3.0, 3)) / (8.0 * (r2 + 1.0) * (r2 + 1.0));
}

double peak_concurrence_q1m2(double r_q) {
  if (!(r_q > 0.0)) throw std::domain_error("peak_concurrence_q1m2: r_q must be positive");
  return peak_concurrence_qq(r_q) / r_q;
}

double peak_concurrence_m1q2(double r_q) { return r_q * peak_concurrence_mm(r_q); }

double peak_concurrence(PairKind kind, double r_q) {
  switch (kind) {
    case PairKind::mm: return peak_concurrence_mm(r_q);
    case PairKind::qq: return peak_concurrence_qq(r_q);
    case PairKind::q1m2: return peak_concurrence_q1m2(r_q);
    case PairKind::m1q2: return peak_concurrence_m1q2(r_q);
  }
  throw std::logic_error("unreachable");
}

GoldenResult golden_section_max(const std::function<double(double)>& f, double a, double b,
                                double tol) {
  if (b < a) std::swap(a, b);
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
    if (x1 == x2) break;
  }
  GoldenResult best = f1 >= f2 ? GoldenResult{x1, f1} : GoldenResult{x2, f2};
  // The endpoints are never sampled by the bracketing loop.
  const double fa = f(a), fb = f(b);
  if (fa > best.fx) best = {a, fa};
  if (fb > best.fx) best = {b, fb};
  return best;
}

RqMaximum maximize_over_rq(PairKind kind, double lo, double hi, double tol) {
  if (!(hi > lo) || !(lo >= 0.0)) throw std::invalid_argument("maximize_over_rq: invalid bracket");
  if (kind == PairKind::q1m2 && lo == 0.0) lo = std::min(1e-12, hi / 2);
  const auto f = [kind](double r) { return peak_concurrence(kind, r); };
  const GoldenResult g = golden_section_max(f, lo, hi, tol);
  const double edge = std::max(1e3 * tol, 1e-8 * (hi - lo));
  RqMaximum out;
  out.r_q = g.x;
  out.c_peak = g.fx;
  out.interior = g.x - lo > edge && hi - g.x > edge;
  return out;
}

PeakResult peak_search(const SpectralPropagator& prop, ModePair pair, double t_begin, double t_end,
                       const PeakSearchOptions& opts) {
  if (!(t_end > t_begin)) throw std::invalid_argument("numeric_peak_search: empty time window");

  const Spectrum& sp = prop.eigen();
  const double width = sp.values(kModes - 1) - sp.values(0);
  const auto conc = [&](double t) {
    return 2.0 * std::abs(prop.amplitude(pair.a, t)) * std::abs(prop.amplitude(pair.b, t));
  };
  if (!(width > 0.0)) return {t_begin, conc(t_begin)};

  const double period = 2.0 * std::numbers::pi / width;
  const double dt_target = period / opts.points_per_period;
  const auto steps = static_cast<std::size_t>(std::ceil((t_end - t_begin) / dt_target));
  if (steps > 50'000'000) throw std::invalid_argument("numeric_peak_search: window too long for grid");
  const std::size_t n = std::max<std::size_t>(steps, 2) + 1;
  const double dt = (t_end - t_begin) / static_cast<double>(n - 1);

  // Grid scan with recursive phase stepping: z_k(t + dt) = z_k(t) exp(-i lambda_k dt).
  const Vec6c start = prop.state_at(t_begin);
  const Vec6c overlap = sp.vectors.adjoint() * start;
  Vec6c z = overlap;
  Vec6c step;
  for (int k = 0; k < kModes; ++k) step(k) = std::polar(1.0, -sp.values(k) * dt);
  const auto row_a = sp.vectors.row(index(pair.a));
  const auto row_b = sp.vectors.row(index(pair.b));

  Scan scan;
  scan.t.resize(n);
  scan.c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    scan.t[i] = t_begin + static_cast<double>(i) * dt;
    cplx amp_a = 0.0, amp_b = 0.0;
    for (int k = 0; k < kModes; ++k) {
      amp_a += cmul(row_a(k), z(k));
      amp_b += cmul(row_b(k), z(k));
    }
    scan.c[i] = 2.0 * std::sqrt(std::norm(amp_a) * std::norm(amp_b));
    for (int k = 0; k < kModes; ++k) z(k) = cmul(z(k), step(k));
    if ((i & 1023) == 1023) {  // resynchronise to bound phase drift
      const double tn = t_begin + static_cast<double>(i + 1) * dt - t_begin;
      for (int k = 0; k < kModes; ++k) z(k) = std::polar(1.0, -sp.values(k) * tn) * overlap(k);
    }
  }

  const double cmax = *std::max_element(scan.c.begin(), scan.c.end());
  if (!(cmax > 1e-300)) return {t_begin, 0.0};

  std::vector<std::size_t> candidates;
  const double threshold = cmax * (1.0 - 1e-3);
  for (std::size_t i = 0; i < n; ++i) {
    const bool left = i == 0 || scan.c[i] >= scan.c[i - 1];
    const bool right = i + 1 == n || scan.c[i] >= scan.c[i + 1];
    if (left && right && scan.c[i] >= threshold) candidates.push_back(i);
  }
  if (candidates.size() > 64) {
    std::partial_sort(candidates.begin(), candidates.begin() + 64, candidates.end(),
                      [&](std::size_t x, std::size_t y) { return scan.c[x] > scan.c[y]; });
    candidates.resize(64);
    std::sort(candidates.begin(), candidates.end());
  }

  const double tol = opts.time_tolerance * period;
  std::vector<PeakResult> refined;
  refined.reserve(candidates.size());
  for (std::size_t i : candidates) {
    const double lo = scan.t[i == 0 ? 0 : i - 1];
    const double hi = scan.t[i + 1 == n ? n - 1 : i + 1];
    const GoldenResult g = golden_section_max(conc, lo, hi, tol);
    refined.push_back({g.x, g.fx});
  }

  double best = 0.0;
  for (const auto& p : refined) best = std::max(best, p.c);
  for (const auto& p : refined) {
    if (p.c >= best - opts.tie_tolerance) return {p.t, p.c};
  }
  return refined.front();
}

PeakResult numeric_peak_search(const ValidatedParams& params, ModePair pair, double t_begin,
                               double t_end, const PeakSearchOptions& opts) {
  if (!(t_end > t_begin)) throw std::invalid_argument("numeric_peak_search: empty time window");
  PureState psi0 = initial_state(Mode::q1);
  psi0.t = 0.0;
  const SpectralPropagator prop(build_hamiltonian(params), psi0);
  return peak_search(prop, pair, t_begin, t_end, opts);
}

PeakResult numeric_peak_search(const ValidatedParams& params, PairKind kind, double t_begin,
                               double t_end, const PeakSearchOptions& opts) {
  return numeric_peak_search(params, pair_modes(kind), t_begin, t_end, opts);
}

namespace {

ValidatedParams resonant_params(double g_m, double g_q, double J) {
  ValidatedParams p;
  p.g_m = g_m;
  p.g_q = g_q;
  p.J = J;
  return p;
}

PeakResult first_period_peak(PairKind kind, double g_m, double g_q, double J) {
  const double G0 = 4.0 * (g_m * g_m + g_q * g_q) + J * J;
  const double window = 1.5 * 2.0 * std::numbers::pi / std::sqrt(G0);
  return numeric_peak_search(resonant_params(g_m, g_q, J), kind, 0.0, window);
}

}  // namespace

OptimalPeak simulated_peak(PairKind kind, double r_q, double g_m, std::size_t j_points) {
  if (!(r_q > 0.0) || !(g_m > 0.0)) throw std::domain_error("simulated_peak: need r_q > 0 and g_m > 0");
  const double g_q = r_q * g_m;

  if (kind == PairKind::mm) {
    const double J = resonant_optimum(g_m, g_q).J_opt;
    const PeakResult p = first_period_peak(kind, g_m, g_q, J);
    return {J, p.t, p.c};
  }

  const double j_max = 4.0 * g_m * (1.0 + r_q);
  const double dj = j_max / static_cast<double>(j_points);
  std::size_t best_i = 0;
  double best_c = -1.0;
  for (std::size_t i = 1; i <= j_points; ++i) {
    const double c = first_period_peak(kind, g_m, g_q, dj * static_cast<double>(i)).c;
    if (c > best_c) {
      best_c = c;
      best_i = i;
    }
  }
  const double lo = dj * static_cast<double>(best_i - 1) + (best_i == 1 ? 1e-3 * dj : 0.0);
  const double hi = dj * static_cast<double>(std::min(best_i + 1, j_points));
  const auto f = [&](double J) { return first_period_peak(kind, g_m, g_q, J).c; };
  const GoldenResult g = golden_section_max(f, lo, hi, 1e-10 * j_max);
  const PeakResult p = first_period_peak(kind, g_m, g_q, g.x);
  return {g.x, p.t, p.c};
}

}  // namespace magnon
