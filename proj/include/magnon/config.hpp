#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "magnon/entanglement.hpp"
#include "magnon/open_system.hpp"

namespace magnon {

using ojson = nlohmann::ordered_json;

/// Any malformed, unknown, or inconsistent configuration input (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TimeSection {
  double t_start = 0.0;  // internal units (s in SI mode)
  double t_end = 1.0;
  std::size_t points = kDefaultGridPoints;
  UnitMode unit = UnitMode::Dimensionless;

  TimeGrid grid() const { return TimeGrid::uniform(t_start, t_end, points); }
};

struct BathSection {
  std::optional<Quantity> gamma;
  CouplingConvention convention = CouplingConvention::Linear;
  int depth = 4;
  std::size_t trajectories = 2000;
  std::uint64_t seed = 1;
  std::size_t probes = 10;
  std::size_t batches = 20;
};

struct SweepJtSection {
  Quantity J_min = Quantity::bare(0.05);
  Quantity J_max = Quantity::bare(1.2);
  std::size_t J_count = 116;
};

struct SweepRqSection {
  double rq_min = 0.1;
  double rq_max = 10.0;
  std::size_t rq_count = 200;
  std::vector<double> include;
};

struct OutputSection {
  std::string dir;
  std::string basename;
  std::vector<std::string> formats{"csv"};
  bool plot = false;
};

/// A fully resolved run: defaults, then --config sections, then --key=value
/// overrides. `resolved` is the merged document; feeding it back through
/// --config reproduces the run.
struct RunConfig {
  SystemParams system;
  ValidatedParams params;
  std::optional<ChannelSpec> channel;
  bool J_from_channel = false;
  BathSection bath;
  TimeSection time;
  std::vector<ModePair> pairs;
  Mode initial = Mode::q1;
  Frame frame = Frame::RotatingAtOmegaQ;
  SweepJtSection sweep_jt;
  SweepRqSection sweep_rq;
  OutputSection output;
  ojson resolved;

  BathConfig bath_config() const;
};

/// Built-in defaults: the reference parameter set of each command.
ojson default_config(const std::string& command);

/// Replaces whole sections of `base` by those present in `file_doc`.
/// Unknown sections or keys raise ConfigError.
ojson merge_config_file(ojson base, const ojson& file_doc);

/// Applies "key=value" or "section.key=value" overrides. A bare key must name
/// exactly one schema entry. Setting g_q on a document that holds g_q_mhz
/// leaves both in place, so validation rejects the unit mixture.
ojson apply_overrides(ojson doc, const std::vector<std::string>& overrides);

/// Strict schema check and conversion to typed sections.
RunConfig parse_config(const ojson& doc);

/// Directory for outputs: explicit value, else $MAGNON_ENT_OUTPUT_DIR, else ".".
std::string resolve_output_dir(const std::string& configured);

}  // namespace magnon
