#include "magnon/core_model.hpp"

#include <cmath>
#include <initializer_list>
#include <sstream>
#include <utility>

namespace magnon {

std::string to_string(UnitMode mode) {
  return mode == UnitMode::SiMHz ? "si_mhz" : "dimensionless";
}

SystemParams SystemParams::resonant(double g_m, double g_q, double J, double omega) {
  SystemParams p;
  p.omega_c = p.omega_m = p.omega_q = Quantity::bare(omega);
  p.g_m = Quantity::bare(g_m);
  p.g_q = Quantity::bare(g_q);
  p.J = Quantity::bare(J);
  p.Gamma_c = Quantity::bare(0.0);
  return p;
}

CouplingRatio::CouplingRatio(double r_q, bool allow_zero) : r_q_(r_q) {
  if (!std::isfinite(r_q) || r_q < 0.0 || (r_q == 0.0 && !allow_zero)) {
    throw std::domain_error("coupling ratio r_q must be positive");
  }
}

bool ValidatedParams::resonant(double tol) const {
  return std::abs(omega_c - omega_q) <= tol && std::abs(omega_m - omega_q) <= tol;
}

double fiber_coupling_rate(double L, double Gamma_c) {
  if (!(L > 0.0)) throw std::domain_error("fiber length L must be positive");
  if (Gamma_c < 0.0) throw std::domain_error("cavity decay rate Gamma_c must be non-negative");
  return std::sqrt(8.0 * std::numbers::pi * kSpeedOfLight * Gamma_c / L);
}

double channel_coupling(double xi, double J_f) {
  if (!(xi >= 0.0 && xi <= 1.0)) throw std::domain_error("conversion efficiency xi must lie in [0, 1]");
  if (J_f < 0.0) throw std::domain_error("fiber coupling J_f must be non-negative");
  return xi * xi * J_f;
}

void validate_channel(const ChannelSpec& channel) {
  std::vector<std::string> bad;
  if (!(channel.xi >= 0.0 && channel.xi <= 1.0)) bad.emplace_back("xi");
  if (!(channel.L > 0.0)) bad.emplace_back("L");
  if (!bad.empty()) {
    std::ostringstream os;
    os << "invalid channel fields:";
    for (const auto& f : bad) os << ' ' << f;
    throw ValidationError(os.str(), std::move(bad));
  }
}

ValidatedParams validate_params(const SystemParams& params) {
  const std::pair<const char*, const Quantity*> fields[] = {
      {"omega_c", &params.omega_c}, {"omega_m", &params.omega_m}, {"omega_q", &params.omega_q},
      {"g_m", &params.g_m},         {"g_q", &params.g_q},         {"J", &params.J},
      {"Gamma_c", &params.Gamma_c},
  };

  std::vector<std::string> bad;
  std::ostringstream why;

  for (const auto& [name, q] : fields) {
    if (!std::isfinite(q->value)) {
      bad.emplace_back(name);
      why << ' ' << name << " (not finite)";
    }
  }
  for (const auto& [name, q] : std::initializer_list<std::pair<const char*, const Quantity*>>{
           {"g_m", &params.g_m}, {"g_q", &params.g_q}, {"J", &params.J}, {"Gamma_c", &params.Gamma_c}}) {
    if (q->value < 0.0) {
      bad.emplace_back(name);
      why << ' ' << name << " (negative)";
    }
  }

  const UnitMode mode = params.omega_c.unit;
  std::vector<std::string> mixed;
  for (const auto& [name, q] : fields) {
    if (q->unit != mode) mixed.emplace_back(name);
  }
  if (!mixed.empty()) {
    why << " mixed unit modes (omega_c is " << to_string(mode) << "; differing:";
    for (const auto& f : mixed) {
      why << ' ' << f;
      bad.push_back(f);
    }
    why << ')';
  }

  if (!bad.empty()) throw ValidationError("invalid system parameters:" + why.str(), std::move(bad));

  ValidatedParams v;
  v.omega_c = params.omega_c.internal();
  v.omega_m = params.omega_m.internal();
  v.omega_q = params.omega_q.internal();
  v.g_m = params.g_m.internal();
  v.g_q = params.g_q.internal();
  v.J = params.J.internal();
  v.Gamma_c = params.Gamma_c.internal();
  v.unit_mode = mode;
  return v;
}

}  // namespace magnon
