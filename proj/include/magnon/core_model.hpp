#pragma once

#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace magnon {

/// Unit convention for every frequency-like quantity in a parameter set.
///
/// Dimensionless: bare numbers, time measured in inverse coupling units.
/// SiMHz: inputs are ν/2π in MHz; internally converted to rad/s, time in s.
enum class UnitMode { Dimensionless, SiMHz };

std::string to_string(UnitMode mode);

inline constexpr double kSpeedOfLight = 2.998e8;  // m/s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kRadPerSecPerMHz = kTwoPi * 1.0e6;

/// A frequency-like value tagged with the unit it was supplied in.
struct Quantity {
  double value = 0.0;
  UnitMode unit = UnitMode::Dimensionless;

  static Quantity bare(double v) { return {v, UnitMode::Dimensionless}; }
  static Quantity mhz(double v) { return {v, UnitMode::SiMHz}; }
  /// Angular frequency already in rad/s, stored as its ν/2π MHz equivalent.
  static Quantity rad_per_s(double v) { return {v / kRadPerSecPerMHz, UnitMode::SiMHz}; }

  /// Value in internal units (bare, or rad/s for SiMHz).
  double internal() const { return unit == UnitMode::SiMHz ? value * kRadPerSecPerMHz : value; }
};

struct SystemParams {
  Quantity omega_c;
  Quantity omega_m;
  Quantity omega_q;
  Quantity g_m;
  Quantity g_q;
  Quantity J;
  Quantity Gamma_c;
  UnitMode unit_mode = UnitMode::Dimensionless;

  /// Dimensionless resonant set: all frequencies `omega`, Gamma_c = 0.
  static SystemParams resonant(double g_m, double g_q, double J, double omega = 1.0);
};

struct ChannelSpec {
  double xi = 1.0;   // conversion efficiency
  double L = 10.0;   // fiber length [m]
};

/// r_q = g_q / g_m.
class CouplingRatio {
 public:
  explicit CouplingRatio(double r_q, bool allow_zero = false);
  double value() const { return r_q_; }

 private:
  double r_q_;
};

/// Parameters in internal units after validation. All rates share `unit_mode`.
struct ValidatedParams {
  double omega_c = 0.0;
  double omega_m = 0.0;
  double omega_q = 0.0;
  double g_m = 0.0;
  double g_q = 0.0;
  double J = 0.0;
  double Gamma_c = 0.0;
  UnitMode unit_mode = UnitMode::Dimensionless;

  bool resonant(double tol = 0.0) const;
};

class ValidationError : public std::invalid_argument {
 public:
  ValidationError(const std::string& what, std::vector<std::string> fields)
      : std::invalid_argument(what), fields_(std::move(fields)) {}
  const std::vector<std::string>& fields() const { return fields_; }

 private:
  std::vector<std::string> fields_;
};

/// J_f = sqrt(8 pi c Gamma_c / L). L in metres, Gamma_c in rad/s.
double fiber_coupling_rate(double L, double Gamma_c);

/// J = xi^2 J_f.
double channel_coupling(double xi, double J_f);

/// Checks sign and unit-consistency invariants and converts to internal units.
/// Throws ValidationError naming every offending field.
ValidatedParams validate_params(const SystemParams& params);

void validate_channel(const ChannelSpec& channel);

}  // namespace magnon
