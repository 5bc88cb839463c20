#include "lsmc/cli.hpp"

#include <CLI11.hpp>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "lsmc/error.hpp"

namespace lsmc {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return kExitConfig;
  if (dynamic_cast<const IoError*>(&e) != nullptr || dynamic_cast<const DataError*>(&e) != nullptr) return kExitIo;
  return kExitNumeric;
}

MarketSetup prepare_market(const RunConfig& c, bool need_oos) {
  MarketSetup m;
  if (c.data.rfind("synthetic:", 0) == 0) {
    m.table = synthetic_returns(synthetic_preset_from_string(c.data.substr(10)), c.data_periods, c.data_seed);
  } else {
    fs::path path = c.data;
    if (path.is_relative() && !c.base_dir.empty()) path = c.base_dir / path;
    IngestOptions opt;
    opt.columns = c.columns;
    opt.price_columns = c.price_columns;
    opt.all_prices = c.all_prices;
    opt.returns_are_log = c.returns_log;
    opt.drop_gaps = c.drop_gaps;
    m.table = ingest_csv(path, opt);
  }
  m.model = calibrate_var1(m.table, c.investable);
  m.scenarios = simulate_paths(m.model, c.paths, c.horizon, c.annual_rf, c.seed, c.workers);
  if (need_oos) {
    m.out_of_sample = simulate_paths(m.model, c.paths, c.horizon, c.annual_rf, c.effective_oos_seed(), c.workers);
  }
  return m;
}

Experiment make_experiment(const RunConfig& c, const MarketSetup& m) {
  Experiment e;
  e.scenarios = &m.scenarios;
  e.out_of_sample = m.out_of_sample ? &*m.out_of_sample : nullptr;
  e.grid = enumerate_grid(c.investable.size(), c.mesh);
  e.objective = c.objective_descriptor();
  e.basis.degree = c.degree;
  e.basis.include_wealth = c.include_wealth;
  e.basis.cross_terms = c.cross_terms;
  e.basis.include_benchmark = is_relative(c.objective);
  const auto& names = m.model.series_names;
  if (c.predictors.empty()) {
    for (std::size_t i = 0; i < names.size(); ++i) e.basis.predictor_subset.push_back(i);
  } else {
    for (const auto& p : c.predictors) {
      const auto it = std::find(names.begin(), names.end(), p);
      if (it == names.end()) throw ConfigError("predictor '" + p + "' is not a series of the data");
      e.basis.predictor_subset.push_back(static_cast<std::size_t>(it - names.begin()));
    }
  }
  if (is_relative(c.objective) && c.benchmark != "equal_weight" &&
      std::find(names.begin(), names.end(), c.benchmark) == names.end()) {
    throw ConfigError("benchmark '" + c.benchmark + "' is not a series of the data");
  }
  const std::size_t k = e.basis.feature_count() + (c.mode == RegressionMode::ClassicalDirect && c.objective == ObjectiveKind::Crra ? 1 : 0);
  if (c.paths <= k) {
    throw ConfigError("paths (" + std::to_string(c.paths) + ") must exceed the basis size (" + std::to_string(k) + ")");
  }
  e.cost.proportional_rate = c.cost;
  e.options.mode = c.mode;
  e.options.stop_profit = c.stop_profit;
  e.options.control_seed = c.seed;
  e.options.workers = c.workers;
  return e;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string provenance_line(const RunConfig& c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# lsmc config_hash=%016" PRIx64 " seed=%" PRIu64 "\n", config_hash(c), c.seed);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

fs::path ensure_out_dir(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw IoError("cannot create output directory " + c.out + ": " + ec.message());
  return c.out;
}

const char* kStatsHeader =
    "v0,v0_stderr,v0_invested,mean,sd,p_below_1,p_below_lower,p_contained,p_overshoot,location_ratio,"
    "locked_fraction,paths";

std::string stats_fields(const StatsReport& s) {
  return num(s.v0) + "," + num(s.v0_stderr) + "," + num(s.v0_invested) + "," + num(s.mean) + "," + num(s.sd) +
         "," + num(s.downside_prob) + "," + num(s.below_lower_prob) + "," + num(s.containment_prob) + "," +
         num(s.overshoot_prob) + "," + num(s.location_ratio) + "," + num(s.locked_fraction) + "," +
         std::to_string(s.paths);
}

std::string summary_line(const StatsReport& s) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "v0=%.6f E=%.6f SD=%.6f P[W<1]=%.4f R=%.4f", s.v0, s.mean, s.sd, s.downside_prob,
                s.location_ratio);
  return buf;
}

struct Context {
  const RunConfig& config;
  std::string stage = "startup";
  std::ostream& out;
};

int cmd_solve(Context& ctx) {
  const RunConfig& c = ctx.config;
  ctx.stage = "market";
  const MarketSetup m = prepare_market(c, c.oos);
  Experiment e = make_experiment(c, m);
  ctx.stage = "solver";
  Policy policy = backward_induction(m.scenarios, e.grid, e.objective, e.basis, e.cost, e.options);
  ctx.stage = "evaluator";
  const ScenarioSet& eval = c.oos ? *m.out_of_sample : m.scenarios;
  const WealthDistribution dist = evaluate_policy(policy, eval, c.workers, c.percentiles);
  const StatsReport stats = summarize(dist, e.objective);

  ctx.stage = "output";
  const fs::path dir = ensure_out_dir(c);
  const std::string prov = provenance_line(c);
  policy.provenance = prov.substr(2, prov.size() - 3);
  save_policy(policy, dir / "policy.json");

  std::string s = prov + "objective,lower,upper,gamma,mode,evaluation,solver_v0," + kStatsHeader + "\n";
  s += to_string(c.objective) + "," + num(c.lower) + "," + num(c.upper) + "," + num(c.gamma) + "," +
       to_string(c.mode) + "," + (c.oos ? "out_of_sample" : "in_sample") + "," + num(policy.v0) + "," +
       stats_fields(stats) + "\n";
  write_file(dir / "stats.csv", s);

  const Histogram h = histogram(dist.terminal, c.histogram_bins);
  std::string hs = prov + "bin_left,bin_right,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    hs += num(h.edges[i]) + "," + num(h.edges[i + 1]) + "," + std::to_string(h.counts[i]) + "\n";
  }
  write_file(dir / "histogram.csv", hs);

  std::string ps = prov + "period,percentile,value\n";
  for (std::size_t n = 0; n < dist.percentiles.size(); ++n) {
    for (std::size_t q = 0; q < c.percentiles.size(); ++q) {
      ps += std::to_string(n) + "," + num(c.percentiles[q]) + "," + num(dist.percentiles[n][q]) + "\n";
    }
  }
  write_file(dir / "percentiles.csv", ps);

  ctx.out << summary_line(stats) << "\n";
  if (wealth_clamp_count() > 0) ctx.out << "note: wealth clamped " << wealth_clamp_count() << " times\n";
  return kExitOk;
}

int cmd_sweep(Context& ctx) {
  const RunConfig& c = ctx.config;
  if (c.sweep_upper.empty() && c.sweep_lower.empty() && c.frontier_ranges.empty() && c.frontier_gammas.empty()) {
    throw ConfigError("sweep needs sweep_upper, sweep_lower, frontier_ranges or frontier_gammas");
  }
  ctx.stage = "market";
  const MarketSetup m = prepare_market(c, c.oos);
  const Experiment e = make_experiment(c, m);
  const fs::path dir = ensure_out_dir(c);
  const std::string prov = provenance_line(c);

  const auto sweep = [&](SweepBound bound, const std::vector<double>& values, const char* name) {
    ctx.stage = std::string("sweep ") + name;
    const auto rows = sensitivity_sweep(e, bound, values);
    std::string s = prov + "bound,value," + kStatsHeader + "\n";
    for (const auto& r : rows) s += std::string(name) + "," + num(r.value) + "," + stats_fields(r.stats) + "\n";
    write_file(dir / (std::string("sweep_") + name + ".csv"), s);
    ctx.out << "sweep " << name << ": " << rows.size() << " rows\n";
  };
  if (!c.sweep_upper.empty()) sweep(SweepBound::Upper, c.sweep_upper, "upper");
  if (!c.sweep_lower.empty()) sweep(SweepBound::Lower, c.sweep_lower, "lower");

  if (!c.frontier_ranges.empty() || !c.frontier_gammas.empty()) {
    ctx.stage = "frontier";
    const auto points = frontier(e, c.frontier_ranges, c.frontier_gammas);
    std::string s = prov + "family,param,lower,upper,gamma,E,SD,P_downside,v0\n";
    for (const auto& p : points) {
      const bool crra = p.kind == ObjectiveKind::Crra;
      const std::string param = crra ? num(p.gamma) : num(p.lower) + ":" + num(p.upper);
      s += std::string(crra ? "crra" : "strs") + "," + param + "," + num(p.lower) + "," + num(p.upper) + "," +
           num(p.gamma) + "," + num(p.stats.mean) + "," + num(p.stats.sd) + "," + num(p.stats.downside_prob) + "," +
           num(p.stats.v0) + "\n";
    }
    write_file(dir / "frontier.csv", s);
    ctx.out << "frontier: " << points.size() << " points\n";
  }
  return kExitOk;
}

int cmd_validate(Context& ctx) {
  const RunConfig& c = ctx.config;
  if (c.validate_ranges.empty() && c.validate_gammas.empty()) {
    throw ConfigError("validate needs validate_ranges or validate_gammas");
  }
  ctx.stage = "market";
  const MarketSetup m = prepare_market(c, c.oos);
  const Experiment base = make_experiment(c, m);
  const fs::path dir = ensure_out_dir(c);
  const std::string prov = provenance_line(c);
  const RegressionMode modes[] = {RegressionMode::ClassicalDirect, RegressionMode::TwoStageConstSigma,
                                  RegressionMode::TwoStageStateSigma};

  if (!c.validate_ranges.empty()) {
    std::string s = prov + "lower,upper";
    for (RegressionMode mode : modes) {
      const std::string t = to_string(mode);
      s += "," + t + "_v0," + t + "_mean," + t + "_sd," + t + "_p_below_1";
    }
    s += "\n";
    for (const auto& [lo, hi] : c.validate_ranges) {
      s += num(lo) + "," + num(hi);
      for (RegressionMode mode : modes) {
        ctx.stage = "validate " + to_string(mode) + " [" + num(lo) + ", " + num(hi) + "]";
        Experiment e = base;
        e.objective.kind = ObjectiveKind::Strs;
        e.objective.range = {lo, hi, ObjectiveKind::Strs};
        e.options.mode = mode;
        const StatsReport r = run_experiment(e).stats;
        s += "," + num(r.v0) + "," + num(r.mean) + "," + num(r.sd) + "," + num(r.downside_prob);
      }
      s += "\n";
      ctx.out << "validated [" << num(lo) << ", " << num(hi) << "]\n";
    }
    write_file(dir / "validate.csv", s);
  }

  if (!c.validate_gammas.empty()) {
    std::string s = prov + "gamma";
    for (int i = 0; i < 2; ++i) {
      const std::string t = to_string(modes[i]);
      s += "," + t + "_v0," + t + "_mean," + t + "_sd," + t + "_p_below_1";
    }
    s += ",two_stage_quadrature_calls\n";
    for (double g : c.validate_gammas) {
      s += num(g);
      std::uint64_t fallbacks = 0;
      for (int i = 0; i < 2; ++i) {
        ctx.stage = "validate " + to_string(modes[i]) + " gamma=" + num(g);
        Experiment e = base;
        e.objective.kind = ObjectiveKind::Crra;
        e.objective.crra.gamma = g;
        e.options.mode = modes[i];
        reset_crra_fallback_count();
        const StatsReport r = run_experiment(e).stats;
        fallbacks = crra_fallback_count();
        s += "," + num(r.v0) + "," + num(r.mean) + "," + num(r.sd) + "," + num(r.downside_prob);
      }
      s += "," + std::to_string(fallbacks) + "\n";
      ctx.out << "validated gamma=" << num(g) << "\n";
    }
    write_file(dir / "validate_crra.csv", s);
  }
  return kExitOk;
}

int cmd_simulate(Context& ctx) {
  const RunConfig& c = ctx.config;
  ctx.stage = "market";
  const MarketSetup m = prepare_market(c, false);
  ctx.stage = "output";
  const fs::path dir = ensure_out_dir(c);
  save_scenarios(m.scenarios, dir / "scenarios.bin");
  std::string s = provenance_line(c) + "series,investable,intercept\n";
  for (std::size_t i = 0; i < m.model.series_names.size(); ++i) {
    const bool inv = std::find(m.model.investable_index.begin(), m.model.investable_index.end(), i) !=
                     m.model.investable_index.end();
    s += m.model.series_names[i] + "," + (inv ? "1" : "0") + "," + num(m.model.intercept(static_cast<Eigen::Index>(i))) + "\n";
  }
  write_file(dir / "var_model.csv", s);
  ctx.out << "simulated " << m.scenarios.paths << " paths x " << m.scenarios.periods << " periods over "
          << m.scenarios.series << " series; spectral radius " << num(m.model.spectral_radius) << "\n";
  for (const auto& w : m.model.warnings) ctx.out << "warning: " << w << "\n";
  return kExitOk;
}

int cmd_ingest_check(Context& ctx) {
  const RunConfig& c = ctx.config;
  ctx.stage = "ingest";
  RunConfig small = c;
  small.paths = 2;
  small.horizon = 1;
  const MarketSetup m = prepare_market(small, false);
  const auto& t = m.table;
  ctx.out << "rows " << t.dates.size() << " (" << t.dates.front() << " .. " << t.dates.back() << ")\n";
  for (std::size_t j = 0; j < t.series_names.size(); ++j) {
    const auto col = t.log_returns.col(static_cast<Eigen::Index>(j));
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(col.size() - 1));
    ctx.out << "  " << t.series_names[j] << " mean " << num(mean) << " sd " << num(sd) << "\n";
  }
  ctx.out << "VAR(1) spectral radius " << num(m.model.spectral_radius) << "\n";
  for (const auto& w : m.model.warnings) ctx.out << "warning: " << w << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Target-range portfolio optimization by least-squares Monte Carlo"};
  app.name("lsmc");
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string out_dir;
  bool oos = false;
  std::vector<CLI::App*> pipeline;
  for (const char* name : {"solve", "sweep", "validate", "simulate", "ingest-check"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "Run configuration file")->required();
    sub->add_option("--seed", seed, "Scenario and control seed");
    sub->add_option("--workers", workers, "Worker threads (0: all cores)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_flag("--oos", oos, "Evaluate on freshly seeded scenarios");
    pipeline.push_back(sub);
  }
  pipeline[0]->description("Solve, evaluate and write stats, histogram, percentiles and policy");
  pipeline[1]->description("Bound sensitivity sweeps and efficient frontiers");
  pipeline[2]->description("Classical against two-stage comparison");
  pipeline[3]->description("Calibrate and simulate scenarios only");
  pipeline[4]->description("Ingest and calibrate the data, print diagnostics");

  CLI::App* synth = app.add_subcommand("synth", "Write the bundled synthetic market as a price CSV");
  std::string preset = "default", synth_out;
  std::size_t periods = 360;
  std::uint64_t synth_seed = 7;
  synth->add_option("--preset", preset, "default or calm");
  synth->add_option("--periods", periods, "Months to generate");
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--out", synth_out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (synth->parsed()) {
    try {
      const ReturnsTable t = synthetic_returns(synthetic_preset_from_string(preset), periods, synth_seed);
      write_price_csv(t, synth_out);
      out << "wrote " << t.dates.size() + 1 << " price rows to " << synth_out << "\n";
      return kExitOk;
    } catch (const std::exception& e) {
      err << "lsmc: synth: " << e.what() << "\n";
      return exit_code_for(e);
    }
  }

  CLI::App* chosen = nullptr;
  for (CLI::App* sub : pipeline) {
    if (sub->parsed()) chosen = sub;
  }
  RunConfig config;
  try {
    config = load_config(config_path);
    if (chosen->count("--seed") > 0) config.seed = seed;
    if (chosen->count("--workers") > 0) config.workers = workers;
    if (chosen->count("--out") > 0) config.out = out_dir;
    if (oos) config.oos = true;
    validate_config(config);
  } catch (const std::exception& e) {
    err << "lsmc: config: " << e.what() << "\n";
    return exit_code_for(e);
  }

  Context ctx{config, "startup", out};
  try {
    const std::string cmd = chosen->get_name();
    if (cmd == "solve") return cmd_solve(ctx);
    if (cmd == "sweep") return cmd_sweep(ctx);
    if (cmd == "validate") return cmd_validate(ctx);
    if (cmd == "simulate") return cmd_simulate(ctx);
    return cmd_ingest_check(ctx);
  } catch (const std::exception& e) {
    err << "lsmc: " << chosen->get_name() << ": " << ctx.stage << ": " << e.what() << " (objective="
        << to_string(config.objective) << ", mode=" << to_string(config.mode) << ", paths=" << config.paths
        << ", horizon=" << config.horizon << ", seed=" << config.seed << ")\n";
    return exit_code_for(e);
  }
}

}  // namespace lsmc
