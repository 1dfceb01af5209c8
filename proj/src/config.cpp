#include "magnon/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace magnon {

namespace {

enum class Kind { Number, Integer, Boolean, String, StringList, NumberList };

struct KeySpec {
  const char* section;
  const char* key;
  Kind kind;
};

// clang-format off
constexpr KeySpec kSchema[] = {
    {"system", "omega_c", Kind::Number}, {"system", "omega_c_mhz", Kind::Number},
    {"system", "omega_m", Kind::Number}, {"system", "omega_m_mhz", Kind::Number},
    {"system", "omega_q", Kind::Number}, {"system", "omega_q_mhz", Kind::Number},
    {"system", "g_m", Kind::Number},     {"system", "g_m_mhz", Kind::Number},
    {"system", "g_q", Kind::Number},     {"system", "g_q_mhz", Kind::Number},
    {"system", "J", Kind::Number},       {"system", "J_mhz", Kind::Number},
    {"system", "Gamma_c", Kind::Number}, {"system", "Gamma_c_mhz", Kind::Number},

    {"channel", "xi", Kind::Number},
    {"channel", "L", Kind::Number},

    {"bath", "gamma", Kind::Number},     {"bath", "gamma_mhz", Kind::Number},
    {"bath", "convention", Kind::String},
    {"bath", "depth", Kind::Integer},
    {"bath", "trajectories", Kind::Integer},
    {"bath", "seed", Kind::Integer},
    {"bath", "probes", Kind::Integer},
    {"bath", "batches", Kind::Integer},

    {"time", "t_start", Kind::Number},   {"time", "t_start_ns", Kind::Number},
    {"time", "t_end", Kind::Number},     {"time", "t_end_ns", Kind::Number},
    {"time", "points", Kind::Integer},

    {"run", "pairs", Kind::StringList},
    {"run", "initial", Kind::String},
    {"run", "frame", Kind::String},

    {"sweep_jt", "J_min", Kind::Number}, {"sweep_jt", "J_min_mhz", Kind::Number},
    {"sweep_jt", "J_max", Kind::Number}, {"sweep_jt", "J_max_mhz", Kind::Number},
    {"sweep_jt", "J_count", Kind::Integer},

    {"sweep_rq", "rq_min", Kind::Number},
    {"sweep_rq", "rq_max", Kind::Number},
    {"sweep_rq", "rq_count", Kind::Integer},
    {"sweep_rq", "include", Kind::NumberList},

    {"output", "dir", Kind::String},
    {"output", "basename", Kind::String},
    {"output", "formats", Kind::StringList},
    {"output", "plot", Kind::Boolean},
};
// clang-format on

const KeySpec* find_key(const std::string& section, const std::string& key) {
  for (const auto& s : kSchema) {
    if (section == s.section && key == s.key) return &s;
  }
  return nullptr;
}

bool known_section(const std::string& section) {
  return std::any_of(std::begin(kSchema), std::end(kSchema),
                     [&](const KeySpec& s) { return section == s.section; });
}

void check_value(const KeySpec& spec, const ojson& v) {
  const std::string where = std::string(spec.section) + "." + spec.key;
  bool ok = false;
  switch (spec.kind) {
    case Kind::Number: ok = v.is_number(); break;
    case Kind::Integer: ok = v.is_number_integer() || (v.is_number() && v.get<double>() == std::floor(v.get<double>())); break;
    case Kind::Boolean: ok = v.is_boolean(); break;
    case Kind::String: ok = v.is_string(); break;
    case Kind::StringList:
      ok = v.is_array() && std::all_of(v.begin(), v.end(), [](const ojson& e) { return e.is_string(); });
      break;
    case Kind::NumberList:
      ok = v.is_array() && std::all_of(v.begin(), v.end(), [](const ojson& e) { return e.is_number(); });
      break;
  }
  if (!ok) throw ConfigError("config: wrong value type for " + where);
}

void check_document(const ojson& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& [section, body] : doc.items()) {
    if (!known_section(section)) throw ConfigError("config: unknown section '" + section + "'");
    if (!body.is_object()) throw ConfigError("config: section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      const KeySpec* spec = find_key(section, key);
      if (!spec) throw ConfigError("config: unknown key '" + section + "." + key + "'");
      check_value(*spec, value);
    }
  }
}

ojson parse_scalar(const KeySpec& spec, const std::string& text) {
  const std::string where = std::string(spec.section) + "." + spec.key;
  const auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw ConfigError("config: '" + s + "' is not a number for " + where);
    return v;
  };
  const auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) parts.push_back(item);
    }
    return parts;
  };

  switch (spec.kind) {
    case Kind::Number: return number(text);
    case Kind::Integer: {
      const double v = number(text);
      if (v != std::floor(v)) throw ConfigError("config: " + where + " must be an integer");
      return static_cast<long long>(v);
    }
    case Kind::Boolean:
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw ConfigError("config: " + where + " must be true or false");
    case Kind::String: return text;
    case Kind::StringList: {
      ojson arr = ojson::array();
      for (const auto& p : split(text)) arr.push_back(p);
      return arr;
    }
    case Kind::NumberList: {
      ojson arr = ojson::array();
      for (const auto& p : split(text)) arr.push_back(number(p));
      return arr;
    }
  }
  throw std::logic_error("unreachable");
}

/// Reads `base` or `base_mhz` from a section; both present is a conflict.
std::optional<Quantity> quantity(const ojson& section, const std::string& base, const std::string& where) {
  const bool bare = section.contains(base);
  const bool mhz = section.contains(base + "_mhz");
  if (bare && mhz) {
    throw ValidationError("invalid system parameters: mixed unit modes (" + where + "." + base + " and " + where +
                              "." + base + "_mhz both given)",
                          {base});
  }
  if (bare) return Quantity::bare(section.at(base).get<double>());
  if (mhz) return Quantity::mhz(section.at(base + "_mhz").get<double>());
  return std::nullopt;
}

template <typename T>
T get_or(const ojson& section, const char* key, T fallback) {
  return section.contains(key) ? section.at(key).get<T>() : fallback;
}

std::size_t positive_count(const ojson& section, const char* key, std::size_t fallback, std::size_t minimum) {
  const long long v = section.contains(key) ? section.at(key).get<long long>() : static_cast<long long>(fallback);
  if (v < static_cast<long long>(minimum)) {
    throw ConfigError(std::string("config: ") + key + " must be at least " + std::to_string(minimum));
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

BathConfig RunConfig::bath_config() const {
  if (!bath.gamma) throw ConfigError("config: bath.gamma (or bath.gamma_mhz) is required");
  return BathConfig{bath.gamma->internal(), params.Gamma_c, bath.convention};
}

ojson default_config(const std::string& command) {
  ojson output = {{"dir", ""}, {"basename", command}, {"formats", {"csv"}}, {"plot", false}};

  if (command == "sweep-jt") {
    return {
        {"system", {{"omega_c", 1.0}, {"omega_m", 1.0}, {"omega_q", 1.0}, {"g_m", 0.4}, {"g_q", 0.3}, {"J", 0.35},
                    {"Gamma_c", 0.0}}},
        {"time", {{"t_start", 0.0}, {"t_end", 40.0}, {"points", 401}}},
        {"run", {{"pairs", {"m1-m2"}}, {"initial", "q1"}, {"frame", "rotating"}}},
        {"sweep_jt", {{"J_min", 0.05}, {"J_max", 1.2}, {"J_count", 116}}},
        {"output", output},
    };
  }
  if (command == "sweep-rq") {
    return {
        {"system", {{"omega_c", 1.0}, {"omega_m", 1.0}, {"omega_q", 1.0}, {"g_m", 1.0}, {"g_q", 1.0}, {"J", 1.0},
                    {"Gamma_c", 0.0}}},
        {"sweep_rq", {{"rq_min", 0.1}, {"rq_max", 10.0}, {"rq_count", 200},
                      {"include", {0.6896, 1.0, 1.7320508075688772}}}},
        {"output", output},
    };
  }
  // evolve, open and fiber share the hybrid-device parameter set; only
  // frequency differences matter in the rotating frame.
  ojson doc = {
      {"system", {{"omega_c_mhz", 183.0}, {"omega_m_mhz", 0.0}, {"omega_q_mhz", 0.0}, {"g_m_mhz", 21.0},
                  {"g_q_mhz", 117.0}, {"Gamma_c_mhz", 1.8}}},
      {"channel", {{"xi", 1.0}, {"L", 10.0}}},
      {"time", {{"t_start_ns", 0.0}, {"t_end_ns", 200.0}, {"points", 2001}}},
      {"run", {{"pairs", {"m1-m2"}}, {"initial", "q1"}, {"frame", "rotating"}}},
      {"output", output},
  };
  if (command == "open") {
    doc["bath"] = {{"gamma_mhz", 0.7}, {"convention", "linear"}, {"depth", 4}, {"trajectories", 2000},
                   {"seed", 1},        {"probes", 10},           {"batches", 20}};
    doc["time"]["points"] = 401;
  }
  if (command == "fiber") {
    doc.erase("time");
    doc.erase("run");
  }
  return doc;
}

ojson merge_config_file(ojson base, const ojson& file_doc) {
  check_document(file_doc);
  for (const auto& [section, body] : file_doc.items()) base[section] = body;
  return base;
}

ojson apply_overrides(ojson doc, const std::vector<std::string>& overrides) {
  for (std::string item : overrides) {
    if (item.rfind("--", 0) == 0) item.erase(0, 2);
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + item + "' must have the form key=value");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);

    const KeySpec* spec = nullptr;
    if (const auto dot = key.find('.'); dot != std::string::npos) {
      spec = find_key(key.substr(0, dot), key.substr(dot + 1));
    } else {
      for (const auto& s : kSchema) {
        if (key == s.key) {
          if (spec) throw ConfigError("override key '" + key + "' is ambiguous; use section.key");
          spec = &s;
        }
      }
    }
    if (!spec) throw ConfigError("unknown override key '" + key + "'");
    doc[spec->section][spec->key] = parse_scalar(*spec, value);
  }
  return doc;
}

RunConfig parse_config(const ojson& doc) {
  check_document(doc);
  RunConfig cfg;
  cfg.resolved = doc;

  const ojson empty = ojson::object();
  const ojson& sys = doc.contains("system") ? doc.at("system") : empty;

  std::vector<std::string> missing;
  const auto required = [&](const char* name) {
    auto q = quantity(sys, name, "system");
    if (!q) missing.emplace_back(name);
    return q.value_or(Quantity{});
  };
  cfg.system.omega_c = required("omega_c");
  cfg.system.omega_m = required("omega_m");
  cfg.system.omega_q = required("omega_q");
  cfg.system.g_m = required("g_m");
  cfg.system.g_q = required("g_q");
  if (!missing.empty()) {
    std::string msg = "config: missing system keys:";
    for (const auto& m : missing) msg += " " + m;
    throw ConfigError(msg);
  }
  const UnitMode mode = cfg.system.omega_c.unit;
  cfg.system.unit_mode = mode;
  cfg.system.Gamma_c = quantity(sys, "Gamma_c", "system").value_or(Quantity{0.0, mode});

  if (doc.contains("channel")) {
    const ojson& ch = doc.at("channel");
    ChannelSpec spec;
    spec.xi = get_or(ch, "xi", 1.0);
    spec.L = get_or(ch, "L", 10.0);
    validate_channel(spec);
    cfg.channel = spec;
  }

  if (auto J = quantity(sys, "J", "system")) {
    cfg.system.J = *J;
  } else if (cfg.channel) {
    if (cfg.system.Gamma_c.unit != UnitMode::SiMHz) {
      throw ConfigError("config: the fiber channel estimate needs Gamma_c_mhz (SI units)");
    }
    const double J_f = fiber_coupling_rate(cfg.channel->L, cfg.system.Gamma_c.internal());
    cfg.system.J = Quantity::rad_per_s(channel_coupling(cfg.channel->xi, J_f));
    cfg.J_from_channel = true;
  } else {
    throw ConfigError("config: system.J is required unless a channel section provides the fiber estimate");
  }

  cfg.params = validate_params(cfg.system);

  if (doc.contains("bath")) {
    const ojson& b = doc.at("bath");
    if (auto g = quantity(b, "gamma", "bath")) {
      if (g->unit != mode) {
        throw ValidationError("invalid bath parameters: mixed unit modes (gamma differs from system)", {"gamma"});
      }
      if (!(g->value > 0.0)) throw ValidationError("invalid bath parameters: gamma must be positive", {"gamma"});
      cfg.bath.gamma = g;
    }
    cfg.bath.convention = parse_convention(get_or<std::string>(b, "convention", "linear"));
    cfg.bath.depth = static_cast<int>(positive_count(b, "depth", 4, 1));
    cfg.bath.trajectories = positive_count(b, "trajectories", 2000, 1);
    const long long seed = get_or<long long>(b, "seed", 1);
    if (seed < 0) throw ConfigError("config: bath.seed must be non-negative");
    cfg.bath.seed = static_cast<std::uint64_t>(seed);
    cfg.bath.probes = positive_count(b, "probes", 10, 0);
    cfg.bath.batches = positive_count(b, "batches", 20, 1);
  }

  if (doc.contains("time")) {
    const ojson& t = doc.at("time");
    const bool si = t.contains("t_start_ns") || t.contains("t_end_ns");
    const bool bare = t.contains("t_start") || t.contains("t_end");
    if (si && bare) throw ValidationError("invalid time window: mixed unit modes", {"t_start", "t_end"});
    const UnitMode tmode = si ? UnitMode::SiMHz : UnitMode::Dimensionless;
    if ((si || bare) && tmode != mode) {
      throw ValidationError("invalid time window: unit mode differs from the system parameters", {"time"});
    }
    const double scale = tmode == UnitMode::SiMHz ? 1e-9 : 1.0;
    const char* k0 = si ? "t_start_ns" : "t_start";
    const char* k1 = si ? "t_end_ns" : "t_end";
    cfg.time.unit = mode;
    cfg.time.t_start = get_or(t, k0, 0.0) * scale;
    if (!t.contains(k1)) throw ConfigError(std::string("config: time.") + k1 + " is required");
    cfg.time.t_end = t.at(k1).get<double>() * scale;
    cfg.time.points = positive_count(t, "points", kDefaultGridPoints, 2);
    if (!(cfg.time.t_end > cfg.time.t_start)) throw ConfigError("config: time window must have t_end > t_start");
  }

  const ojson& run = doc.contains("run") ? doc.at("run") : empty;
  try {
    for (const auto& p : get_or<std::vector<std::string>>(run, "pairs", {"m1-m2"})) cfg.pairs.push_back(parse_pair(p));
    cfg.initial = parse_mode(get_or<std::string>(run, "initial", "q1"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.pairs.empty()) throw ConfigError("config: run.pairs must name at least one pair");
  const std::string frame = get_or<std::string>(run, "frame", "rotating");
  if (frame == "rotating") {
    cfg.frame = Frame::RotatingAtOmegaQ;
  } else if (frame == "lab") {
    cfg.frame = Frame::Lab;
  } else {
    throw ConfigError("config: run.frame must be 'rotating' or 'lab'");
  }

  if (doc.contains("sweep_jt")) {
    const ojson& s = doc.at("sweep_jt");
    auto lo = quantity(s, "J_min", "sweep_jt");
    auto hi = quantity(s, "J_max", "sweep_jt");
    if (!lo || !hi) throw ConfigError("config: sweep_jt needs J_min and J_max");
    if (lo->unit != mode || hi->unit != mode) {
      throw ValidationError("invalid sweep: J range unit differs from the system parameters", {"J_min", "J_max"});
    }
    cfg.sweep_jt.J_min = *lo;
    cfg.sweep_jt.J_max = *hi;
    cfg.sweep_jt.J_count = positive_count(s, "J_count", 116, 2);
    if (!(hi->value > lo->value) || lo->value < 0.0) throw ConfigError("config: sweep_jt needs 0 <= J_min < J_max");
  }

  if (doc.contains("sweep_rq")) {
    const ojson& s = doc.at("sweep_rq");
    cfg.sweep_rq.rq_min = get_or(s, "rq_min", 0.1);
    cfg.sweep_rq.rq_max = get_or(s, "rq_max", 10.0);
    cfg.sweep_rq.rq_count = positive_count(s, "rq_count", 200, 2);
    cfg.sweep_rq.include = get_or<std::vector<double>>(s, "include", {});
    if (!(cfg.sweep_rq.rq_min > 0.0) || !(cfg.sweep_rq.rq_max > cfg.sweep_rq.rq_min)) {
      throw ConfigError("config: sweep_rq needs 0 < rq_min < rq_max");
    }
    for (double r : cfg.sweep_rq.include) {
      if (!(r > 0.0)) throw ConfigError("config: sweep_rq.include values must be positive");
    }
  }

  const ojson& out = doc.contains("output") ? doc.at("output") : empty;
  cfg.output.dir = get_or<std::string>(out, "dir", "");
  cfg.output.basename = get_or<std::string>(out, "basename", "result");
  cfg.output.formats = get_or<std::vector<std::string>>(out, "formats", {"csv"});
  cfg.output.plot = get_or(out, "plot", false);
  for (const auto& f : cfg.output.formats) {
    if (f != "csv" && f != "json") throw ConfigError("config: output format '" + f + "' (expected csv or json)");
  }
  if (cfg.output.basename.empty()) throw ConfigError("config: output.basename must not be empty");
  return cfg;
}

std::string resolve_output_dir(const std::string& configured) {
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv("MAGNON_ENT_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

}  // namespace magnon
