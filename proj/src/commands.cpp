#include "magnon/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "magnon/analytics.hpp"
#include "magnon/kernels.hpp"

namespace magnon {

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  std::vector<double> v = linspace(std::log10(lo), std::log10(hi), n);
  for (double& x : v) x = std::pow(10.0, x);
  return v;
}

bool si(const RunConfig& cfg) { return cfg.params.unit_mode == UnitMode::SiMHz; }

std::string time_column(const RunConfig& cfg) { return si(cfg) ? "t_ns" : "t"; }
double time_value(const RunConfig& cfg, double t) { return si(cfg) ? t * 1e9 : t; }

ojson params_meta(const ValidatedParams& p) {
  return {{"omega_c", p.omega_c}, {"omega_m", p.omega_m}, {"omega_q", p.omega_q}, {"g_m", p.g_m},
          {"g_q", p.g_q},         {"J", p.J},             {"Gamma_c", p.Gamma_c}};
}

void common_meta(ResultTable& t, const std::string& command, const RunConfig* cfg) {
  t.meta()["tool"] = kToolName;
  t.meta()["version"] = kToolVersion;
  t.meta()["command"] = command;
  if (cfg) {
    t.meta()["units"] = to_string(cfg->params.unit_mode);
    t.meta()["internal_units"] = si(*cfg) ? "rad/s, s" : "dimensionless";
    t.meta()["params"] = params_meta(cfg->params);
    if (cfg->J_from_channel) {
      t.meta()["channel"] = {{"xi", cfg->channel->xi}, {"L_m", cfg->channel->L}, {"J_from_fiber_estimate", true}};
    }
  }
}

std::string c_column(ModePair p, const std::string& suffix = "") {
  return "C_" + pair_label(p) + suffix;
}

/// First local maximum reaching half of the series maximum.
std::pair<double, double> first_peak(const ConcurrenceSeries& s) {
  const double top = *std::max_element(s.c.begin(), s.c.end());
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s.c[i] > s.c[i - 1] && s.c[i] >= s.c[i + 1] && s.c[i] >= 0.5 * top) return {s.t[i], s.c[i]};
  }
  return {s.t.empty() ? 0.0 : s.t.front(), s.c.empty() ? 0.0 : s.c.front()};
}

}  // namespace

CommandResult cmd_evolve(const RunConfig& cfg) {
  const TimeGrid grid = cfg.time.grid();
  const HamiltonianMatrix H = build_hamiltonian(cfg.params, cfg.frame);
  const StateTrajectory traj = propagate(H, initial_state(cfg.initial), grid);

  std::vector<Column> cols{{time_column(cfg)}};
  std::vector<ConcurrenceSeries> series;
  for (const auto& p : cfg.pairs) {
    cols.push_back({c_column(p)});
    series.push_back(concurrence_series(traj, p.a, p.b));
  }
  cols.push_back({"sector_norm"});

  ResultTable table(cols);
  common_meta(table, "evolve", &cfg);
  table.meta()["initial"] = std::string(mode_name(cfg.initial));
  table.meta()["frame"] = cfg.frame == Frame::Lab ? "lab" : "rotating";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const auto top = std::max_element(s.c.begin(), s.c.end());
    const auto [t1, c1] = first_peak(s);
    table.meta()["max_" + c_column(cfg.pairs[k])] = *top;
    table.meta()["first_peak_" + c_column(cfg.pairs[k])] = {{"t", time_value(cfg, t1)}, {"C", c1}};
  }

  for (std::size_t i = 0; i < grid.n; ++i) {
    std::vector<double> row{time_value(cfg, grid.at(i))};
    for (const auto& s : series) row.push_back(s.c[i]);
    row.push_back(total_excitation(traj.states[i]));
    table.add_row(std::move(row));
  }

  CommandResult r;
  r.tables.emplace_back("", std::move(table));
  r.plot = PlotKind::TimeSeries;
  r.title = "closed-system concurrence";
  return r;
}

CommandResult cmd_sweep_jt(const RunConfig& cfg) {
  const ModePair pair = cfg.pairs.front();
  const TimeGrid grid = cfg.time.grid();
  const std::vector<double> Js = linspace(cfg.sweep_jt.J_min.internal(), cfg.sweep_jt.J_max.internal(),
                                          cfg.sweep_jt.J_count);
  const kernels::JtLandscape land = kernels::sweep_jt_parallel(cfg.params, pair, Js, grid);

  const double j_scale = si(cfg) ? 1.0 / kRadPerSecPerMHz : 1.0;
  const std::string j_name = si(cfg) ? "J_mhz" : "J";

  ResultTable table({{j_name}, {time_column(cfg)}, {c_column(pair)}});
  common_meta(table, "sweep-jt", &cfg);
  for (std::size_t iJ = 0; iJ < Js.size(); ++iJ) {
    for (std::size_t it = 0; it < grid.n; ++it) {
      table.add_row({Js[iJ] * j_scale, time_value(cfg, land.t[it]), land.at(iJ, it)});
    }
  }

  // Refined earliest highest peak per J row.
  std::vector<PeakResult> ridge(Js.size());
  for (std::size_t iJ = 0; iJ < Js.size(); ++iJ) {
    ValidatedParams p = cfg.params;
    p.J = Js[iJ];
    const SpectralPropagator prop(build_hamiltonian(p), initial_state(Mode::q1));
    ridge[iJ] = peak_search(prop, pair, grid.t0, grid.end());
  }

  ResultTable ridge_table({{j_name}, {"t_peak" + std::string(si(cfg) ? "_ns" : "")}, {"C_peak"}});
  common_meta(ridge_table, "sweep-jt", &cfg);
  for (std::size_t iJ = 0; iJ < Js.size(); ++iJ) {
    ridge_table.add_row({Js[iJ] * j_scale, time_value(cfg, ridge[iJ].t), ridge[iJ].c});
  }

  // Shortest-time optimum: among rows whose peak is within 1% of the best and
  // locally maximal in J, take the earliest and refine J there.
  double best = 0.0;
  for (const auto& pr : ridge) best = std::max(best, pr.c);
  std::size_t pick = 0;
  double pick_t = INFINITY;
  for (std::size_t i = 0; i < ridge.size(); ++i) {
    const bool left = i == 0 || ridge[i].c >= ridge[i - 1].c;
    const bool right = i + 1 == ridge.size() || ridge[i].c >= ridge[i + 1].c;
    if (left && right && ridge[i].c >= 0.99 * best && ridge[i].t < pick_t) {
      pick = i;
      pick_t = ridge[i].t;
    }
  }
  ojson optimum = ojson::object();
  if (best > 0.0) {
    const double t_cap = grid.t0 + 1.5 * (ridge[pick].t - grid.t0);
    const auto peak_at = [&](double J) {
      ValidatedParams p = cfg.params;
      p.J = J;
      return numeric_peak_search(p, pair, grid.t0, std::min(t_cap, grid.end()));
    };
    const double lo = Js[pick == 0 ? 0 : pick - 1];
    const double hi = Js[std::min(pick + 1, Js.size() - 1)];
    const GoldenResult g = golden_section_max([&](double J) { return peak_at(J).c; }, lo, hi,
                                              1e-10 * (Js.back() - Js.front()));
    const PeakResult pr = peak_at(g.x);
    optimum = {{"J", g.x * j_scale}, {"t", time_value(cfg, pr.t)}, {"C", pr.c}};
  }
  table.meta()["shortest_time_optimum"] = optimum;
  ridge_table.meta()["shortest_time_optimum"] = optimum;
  if (cfg.params.resonant() && cfg.params.g_m > 0.0) {
    const ResonantOptimum ro = resonant_optimum(cfg.params.g_m, cfg.params.g_q);
    const ojson closed = {{"J_opt", ro.J_opt * j_scale},
                          {"t_opt", time_value(cfg, ro.t_opt)},
                          {"C_mm_peak", peak_concurrence_mm(cfg.params.g_q / cfg.params.g_m)}};
    table.meta()["closed_form"] = closed;
    ridge_table.meta()["closed_form"] = closed;
  }

  CommandResult r;
  r.tables.emplace_back("", std::move(table));
  r.tables.emplace_back("_ridge", std::move(ridge_table));
  r.plot = PlotKind::Heatmap;
  r.title = "concurrence landscape over channel coupling and time";
  return r;
}

CommandResult cmd_sweep_rq(const RunConfig& cfg) {
  if (!(cfg.params.g_m > 0.0)) throw ConfigError("sweep-rq: system g_m must be positive");
  std::vector<double> r = logspace(cfg.sweep_rq.rq_min, cfg.sweep_rq.rq_max, cfg.sweep_rq.rq_count);
  r.insert(r.end(), cfg.sweep_rq.include.begin(), cfg.sweep_rq.include.end());
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());

  std::vector<Column> cols{{"r_q"}};
  for (PairKind k : kAllPairKinds) cols.push_back({"C_" + std::string(pair_kind_name(k))});
  for (PairKind k : kAllPairKinds) cols.push_back({"C_" + std::string(pair_kind_name(k)) + "_sim"});
  for (PairKind k : kAllPairKinds) cols.push_back({"J_" + std::string(pair_kind_name(k)) + "_sim"});

  std::vector<std::vector<OptimalPeak>> sim;
  for (PairKind k : kAllPairKinds) sim.push_back(kernels::peak_curve_parallel(k, r, cfg.params.g_m));

  ResultTable table(cols);
  common_meta(table, "sweep-rq", &cfg);
  ojson maxima = ojson::object();
  for (PairKind k : kAllPairKinds) {
    const RqMaximum m = maximize_over_rq(k, cfg.sweep_rq.rq_min, cfg.sweep_rq.rq_max);
    maxima[std::string(pair_kind_name(k))] =
        m.interior ? ojson{{"r_q", m.r_q}, {"C", m.c_peak}} : ojson{{"interior", false}, {"C_sup_on_range", m.c_peak}};
  }
  table.meta()["closed_form_maxima"] = maxima;
  table.meta()["J_search"] = "mm: J_opt; others: grid of 200 over (0, 4 g_m (1 + r_q)] then golden section";

  for (std::size_t i = 0; i < r.size(); ++i) {
    std::vector<double> row{r[i]};
    for (PairKind k : kAllPairKinds) row.push_back(peak_concurrence(k, r[i]));
    for (const auto& s : sim) row.push_back(s[i].c);
    for (const auto& s : sim) row.push_back(s[i].J);
    table.add_row(std::move(row));
  }

  CommandResult res;
  res.tables.emplace_back("", std::move(table));
  res.plot = PlotKind::Curves;
  res.title = "peak concurrence versus coupling ratio";
  return res;
}

CommandResult cmd_open(const RunConfig& cfg) {
  const BathConfig bath = cfg.bath_config();
  validate_bath(bath);
  if (cfg.frame != Frame::RotatingAtOmegaQ) {
    throw ConfigError("open: the bath kernel is defined in the rotating frame; use run.frame=rotating");
  }
  const TimeGrid grid = cfg.time.grid();
  const PureState psi0 = initial_state(cfg.initial);

  const StateTrajectory closed = propagate(build_hamiltonian(cfg.params), psi0, grid);
  const DensityTrajectory pm = pseudomode_solve(cfg.params, bath, grid, psi0);

  QsdOptions opts;
  opts.depth = cfg.bath.depth;
  ConvergenceReport conv;
  conv.depth = opts.depth;
  if (cfg.bath.probes > 0) {
    conv = check_hierarchy_convergence(cfg.params, bath, psi0, grid, cfg.bath.seed, cfg.bath.probes, opts);
  }

  kernels::EnsembleRequest req;
  req.trajectories = cfg.bath.trajectories;
  req.seed = cfg.bath.seed;
  req.batches = cfg.bath.batches;
  req.options = opts;
  const kernels::EnsembleResult ens = kernels::qsd_ensemble_parallel(cfg.params, bath, psi0, grid, req);

  std::vector<Column> cols{{time_column(cfg)}};
  for (const auto& p : cfg.pairs) {
    cols.push_back({c_column(p, "_closed")});
    cols.push_back({c_column(p, "_pseudomode")});
    cols.push_back({c_column(p, "_qsd")});
    cols.push_back({c_column(p, "_qsd_se")});
  }
  cols.push_back({"sector_norm_pseudomode"});
  cols.push_back({"sector_norm_qsd"});
  cols.push_back({"trace_qsd"});

  ResultTable table(cols);
  common_meta(table, "open", &cfg);
  table.meta()["bath"] = {{"gamma", bath.gamma},
                          {"convention", to_string(bath.convention)},
                          {"lindblad_coefficient", bath.lindblad_coefficient()},
                          {"kernel", "exp(-gamma|t-s|)/2"},
                          {"matched_markov_rate", bath.matched_markov_rate()}};
  table.meta()["seed"] = cfg.bath.seed;
  table.meta()["trajectories"] = cfg.bath.trajectories;
  table.meta()["depth"] = opts.depth;
  table.meta()["substeps"] = ens.substeps;
  table.meta()["batches"] = ens.batches.size();
  table.meta()["convergence"] = {{"converged", conv.converged},
                                 {"max_difference", conv.max_difference},
                                 {"probes", conv.probes},
                                 {"tolerance", opts.convergence_tol}};

  std::vector<ConcurrenceSeries> c_closed, c_pm, c_qsd;
  std::vector<std::vector<ConcurrenceSeries>> c_batch;
  for (const auto& p : cfg.pairs) {
    c_closed.push_back(concurrence_series(closed, p.a, p.b));
    c_pm.push_back(concurrence_series(pm, p.a, p.b));
    c_qsd.push_back(concurrence_series(ens.density, p.a, p.b));
    std::vector<ConcurrenceSeries> per;
    for (const auto& b : ens.batches) per.push_back(concurrence_series(b, p.a, p.b));
    c_batch.push_back(std::move(per));
  }

  for (std::size_t i = 0; i < grid.n; ++i) {
    std::vector<double> row{time_value(cfg, grid.at(i))};
    for (std::size_t k = 0; k < cfg.pairs.size(); ++k) {
      row.push_back(c_closed[k].c[i]);
      row.push_back(c_pm[k].c[i]);
      row.push_back(c_qsd[k].c[i]);
      const auto& per = c_batch[k];
      double se = 0.0;
      if (per.size() > 1) {
        double mean = 0.0;
        for (const auto& s : per) mean += s.c[i];
        mean /= static_cast<double>(per.size());
        double var = 0.0;
        for (const auto& s : per) var += (s.c[i] - mean) * (s.c[i] - mean);
        var /= static_cast<double>(per.size() - 1);
        se = std::sqrt(var / static_cast<double>(per.size()));
      }
      row.push_back(se);
    }
    row.push_back(pm.states[i].sector_norm());
    row.push_back(ens.density.states[i].sector_norm());
    row.push_back(ens.density.states[i].trace());
    table.add_row(std::move(row));
  }

  for (std::size_t k = 0; k < cfg.pairs.size(); ++k) {
    const auto [t0, c0] = first_peak(c_closed[k]);
    const auto [t1, c1] = first_peak(c_pm[k]);
    table.meta()["first_peak_" + c_column(cfg.pairs[k])] = {
        {"closed", {{"t", time_value(cfg, t0)}, {"C", c0}}}, {"pseudomode", {{"t", time_value(cfg, t1)}, {"C", c1}}}};
  }

  CommandResult r;
  r.tables.emplace_back("", std::move(table));
  r.plot = PlotKind::TimeSeries;
  r.title = "open-system concurrence";
  if (!conv.converged) {
    r.exit_code = kExitNumeric;
    r.message = "hierarchy truncation did not converge (depth " + std::to_string(conv.depth) +
                ", max difference " + std::to_string(conv.max_difference) + ")";
  }
  return r;
}

CommandResult cmd_fiber(const RunConfig& cfg) {
  if (!cfg.channel) throw ConfigError("fiber: a channel section (xi, L) is required");
  if (cfg.system.Gamma_c.unit != UnitMode::SiMHz) throw ConfigError("fiber: Gamma_c must be given as Gamma_c_mhz");
  const double J_f = fiber_coupling_rate(cfg.channel->L, cfg.params.Gamma_c);
  const double J = channel_coupling(cfg.channel->xi, J_f);
  ResultTable table({{"L_m"}, {"Gamma_c_rad_per_s"}, {"xi"}, {"J_f_rad_per_s"}, {"J_f_Mrad_per_s"},
                     {"J_rad_per_s"}, {"J_Mrad_per_s"}});
  common_meta(table, "fiber", nullptr);
  table.meta()["speed_of_light_m_per_s"] = kSpeedOfLight;
  table.add_row({cfg.channel->L, cfg.params.Gamma_c, cfg.channel->xi, J_f, J_f * 1e-6, J, J * 1e-6});
  CommandResult r;
  r.tables.emplace_back("", std::move(table));
  return r;
}

std::vector<std::string> analytic_quantities() {
  return {"g0", "tpeak", "jopt", "topt", "eta", "cpeak-mm", "cpeak-qq", "cpeak-q1m2", "cpeak-m1q2",
          "maximize", "fiber", "channel"};
}

CommandResult cmd_analytic(const std::vector<std::string>& query) {
  const auto names = analytic_quantities();
  const auto list = [&] {
    std::string s;
    for (const auto& n : names) s += (s.empty() ? "" : ", ") + n;
    return s;
  };
  if (query.empty()) throw ConfigError("analytic: missing quantity; valid names: " + list());
  const std::string what = query.front();
  if (std::find(names.begin(), names.end(), what) == names.end()) {
    throw ConfigError("analytic: unknown quantity '" + what + "'; valid names: " + list());
  }

  std::map<std::string, std::string> args;
  for (std::size_t i = 1; i < query.size(); ++i) {
    std::string item = query[i];
    if (item.rfind("--", 0) == 0) item.erase(0, 2);
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("analytic: argument '" + item + "' must be key=value");
    args[item.substr(0, eq)] = item.substr(eq + 1);
  }
  std::vector<std::string> used;
  const auto num = [&](const std::string& key) -> double {
    const auto it = args.find(key);
    if (it == args.end()) throw ConfigError("analytic " + what + ": missing " + key + "=<value>");
    used.push_back(key);
    std::size_t n = 0;
    double v = 0.0;
    try {
      v = std::stod(it->second, &n);
    } catch (const std::exception&) {
      n = 0;
    }
    if (n != it->second.size() || it->second.empty()) {
      throw ConfigError("analytic " + what + ": " + key + " is not a number");
    }
    return v;
  };
  const auto opt = [&](const std::string& key, double fallback) { return args.count(key) ? num(key) : fallback; };

  std::vector<Column> cols;
  std::vector<double> row;
  const auto put = [&](const std::string& name, double v, ColumnType type = ColumnType::Real) {
    cols.push_back({name, type});
    row.push_back(v);
  };

  if (what == "g0" || what == "tpeak" || what == "jopt" || what == "topt") {
    const double gm = num("g_m"), gq = num("g_q");
    const int n = static_cast<int>(opt("n", 1.0));
    std::optional<double> J;
    if (args.count("J")) J = num("J");
    const ResonantOptimum r = resonant_optimum(gm, gq, n, J);
    if (what == "g0") put("G0", r.G0);
    if (what == "tpeak") {
      put("n", r.n, ColumnType::Integer);
      put("t_peak", r.t_peak);
    }
    if (what == "jopt") {
      put("J_opt", r.J_opt);
      put("t_opt", r.t_opt);
    }
    if (what == "topt") put("t_opt", r.t_opt);
  } else if (what == "eta") {
    put("eta", eta(num("r_q")));
  } else if (what.rfind("cpeak-", 0) == 0) {
    const PairKind k = parse_pair_kind(what.substr(6));
    const double r = num("r_q");
    put("r_q", r);
    put("C_" + std::string(pair_kind_name(k)), peak_concurrence(k, r));
  } else if (what == "maximize") {
    const auto it = args.find("pair");
    if (it == args.end()) throw ConfigError("analytic maximize: missing pair=<mm|qq|q1m2|m1q2>");
    used.push_back("pair");
    const PairKind k = parse_pair_kind(it->second);
    const RqMaximum m = maximize_over_rq(k, opt("lo", 0.1), opt("hi", 10.0));
    put("interior", m.interior ? 1.0 : 0.0, ColumnType::Integer);
    put("r_q", m.r_q);
    put("C", m.c_peak);
  } else if (what == "fiber") {
    const double L = num("L");
    double gamma_c = 0.0;
    if (args.count("Gamma_c_mhz")) {
      gamma_c = num("Gamma_c_mhz") * kRadPerSecPerMHz;
    } else {
      gamma_c = num("Gamma_c");
    }
    const double J_f = fiber_coupling_rate(L, gamma_c);
    const double xi = opt("xi", 1.0);
    put("J_f_Mrad_per_s", J_f * 1e-6);
    put("J_f_rad_per_s", J_f);
    put("J_rad_per_s", channel_coupling(xi, J_f));
  } else if (what == "channel") {
    put("J", channel_coupling(num("xi"), num("J_f")));
  }

  for (const auto& [k, v] : args) {
    if (std::find(used.begin(), used.end(), k) == used.end()) {
      throw ConfigError("analytic " + what + ": unexpected argument '" + k + "'");
    }
  }

  ResultTable table(cols);
  common_meta(table, "analytic", nullptr);
  table.meta()["quantity"] = what;
  ojson in = ojson::object();
  for (const auto& [k, v] : args) in[k] = v;
  table.meta()["arguments"] = in;
  table.add_row(row);
  CommandResult r;
  r.tables.emplace_back("", std::move(table));
  return r;
}

namespace {

const std::vector<std::string> kCommands = {"evolve", "sweep-jt", "sweep-rq", "open", "analytic", "fiber"};

ojson load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file '" + path + "'");
  try {
    return ojson::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

void write_tables(const CommandResult& result, const RunConfig* cfg, const std::string& command,
                  const EmitRequest& base, std::ostream& out) {
  for (const auto& [suffix, table] : result.tables) {
    EmitRequest req = base;
    req.basename = base.basename + suffix;
    if (!suffix.empty()) req.plot = PlotKind::None;
    for (const auto& path : emit_outputs(table, req)) out << "wrote " << path << '\n';
  }
  if (cfg) {
    const std::filesystem::path p =
        std::filesystem::path(base.dir.empty() ? "." : base.dir) / (base.basename + ".config.json");
    write_text_file(p.string(), cfg->resolved.dump(2) + "\n");
    out << "wrote " << p.string() << '\n';
  }
  (void)command;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Remote magnon/qubit entanglement simulator", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

  std::map<std::string, CLI::App*> subs;
  std::map<std::string, std::string> config_paths;
  std::vector<std::string> query;
  const std::map<std::string, std::string> help = {
      {"evolve", "closed-system concurrence time series (device parameter set)"},
      {"sweep-jt", "concurrence landscape over channel coupling J and time t"},
      {"sweep-rq", "peak concurrence versus r_q = g_q/g_m, closed form and simulated"},
      {"open", "open-system dynamics: closed, pseudomode and stochastic ensemble"},
      {"analytic", "closed-form quantities, e.g. 'analytic jopt g_m=0.4 g_q=0.3'"},
      {"fiber", "fiber channel coupling estimate"},
  };
  for (const auto& name : kCommands) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->allow_extras();
    if (name == "analytic") {
      sub->add_option("query", query, "quantity followed by key=value arguments");
    } else {
      sub->add_option("--config", config_paths[name], "JSON config file (sections replace the defaults)");
    }
    subs[name] = sub;
  }

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolName << ' ' << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::string command;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) command = name;
  }
  CLI::App* sub = subs.at(command);
  std::vector<std::string> extras = sub->remaining();

  try {
    if (command == "analytic") {
      std::vector<std::string> q = query;
      q.insert(q.end(), extras.begin(), extras.end());
      std::string dir;
      std::vector<std::string> formats{"csv"};
      std::vector<std::string> rest;
      for (const auto& a : q) {
        if (a.rfind("--dir=", 0) == 0) {
          dir = a.substr(6);
        } else if (a.rfind("--formats=", 0) == 0) {
          formats = {a.substr(10)};
        } else {
          rest.push_back(a);
        }
      }
      const CommandResult r = cmd_analytic(rest);
      write_csv(r.main(), out);
      if (!dir.empty()) write_tables(r, nullptr, command, {dir, "analytic", formats, PlotKind::None, ""}, out);
      return kExitOk;
    }

    ojson doc = default_config(command);
    if (!config_paths[command].empty()) doc = merge_config_file(doc, load_json_file(config_paths[command]));
    doc = apply_overrides(doc, extras);
    if (command == "fiber") {
      // only system.Gamma_c and the channel section matter here
      doc.erase("time");
    }
    const RunConfig cfg = parse_config(doc);

    CommandResult result;
    if (command == "evolve") result = cmd_evolve(cfg);
    if (command == "sweep-jt") result = cmd_sweep_jt(cfg);
    if (command == "sweep-rq") result = cmd_sweep_rq(cfg);
    if (command == "open") result = cmd_open(cfg);
    if (command == "fiber") result = cmd_fiber(cfg);

    EmitRequest req{resolve_output_dir(cfg.output.dir), cfg.output.basename, cfg.output.formats,
                    cfg.output.plot ? result.plot : PlotKind::None, result.title};
    if (req.plot != PlotKind::None &&
        std::find(req.formats.begin(), req.formats.end(), "csv") == req.formats.end()) {
      req.formats.push_back("csv");
    }
    if (command == "fiber") write_csv(result.main(), out);
    write_tables(result, &cfg, command, req, out);
    if (result.exit_code != kExitOk) err << "error: " << result.message << '\n';
    return result.exit_code;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    err << "error: config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace magnon
