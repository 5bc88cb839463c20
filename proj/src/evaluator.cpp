#include "lsmc/evaluator.hpp"

#include <algorithm>
#include <cmath>

#include "lsmc/error.hpp"
#include "lsmc/parallel.hpp"

namespace lsmc {

const std::vector<double>& default_percentile_levels() {
  static const std::vector<double> levels{0.0005, 0.05, 0.25, 0.5, 0.75, 0.95, 0.9995};
  return levels;
}

WealthDistribution evaluate_policy(const Policy& policy, const ScenarioSet& s, unsigned workers,
                                   const std::vector<double>& percentile_levels) {
  if (s.periods != policy.horizon) {
    throw DataError("scenarios have " + std::to_string(s.periods) + " periods, policy horizon is " +
                    std::to_string(policy.horizon));
  }
  if (s.assets != policy.grid.assets) throw DataError("scenarios and policy disagree on the asset count");
  for (double q : percentile_levels) {
    if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("percentile levels must lie in [0, 1]");
  }
  const std::size_t big_m = s.paths, big_n = s.periods, stride = big_n + 1;
  const bool relative = is_relative(policy.objective.kind);
  const std::vector<double> bench = relative ? benchmark_paths(s, policy.objective.benchmark) : std::vector<double>{};

  WealthDistribution d;
  d.seed = s.seed;
  d.terminal.resize(big_m);
  d.invested.resize(big_m);
  d.surplus.resize(big_m);
  d.locked.resize(big_m);
  if (relative) d.benchmark_terminal.resize(big_m);
  std::vector<double> traces(big_m * stride);

  parallel_for(big_m, workers, [&](std::size_t begin, std::size_t end) {
    Policy::Prepared scratch;
    for (std::size_t m = begin; m < end; ++m) {
      PathState p;
      double* trace = traces.data() + m * stride;
      trace[0] = 1.0;
      advance_with_policy(s, policy, m, 0, {&p, 1}, bench, scratch, trace);
      d.terminal[m] = trace[big_n];
      d.invested[m] = p.locked ? policy.objective.range.upper : p.w;
      d.surplus[m] = p.surplus;
      d.locked[m] = p.locked ? 1 : 0;
      if (relative) d.benchmark_terminal[m] = bench[m * stride + big_n];
    }
  });

  d.percentile_levels = percentile_levels;
  d.percentiles.assign(stride, std::vector<double>(percentile_levels.size()));
  std::vector<double> column(big_m);
  for (std::size_t n = 0; n < stride; ++n) {
    for (std::size_t m = 0; m < big_m; ++m) column[m] = traces[m * stride + n];
    std::sort(column.begin(), column.end());
    for (std::size_t q = 0; q < percentile_levels.size(); ++q) {
      d.percentiles[n][q] = percentile_sorted(column, percentile_levels[q]);
    }
  }
  return d;
}

double percentile_sorted(const std::vector<double>& sorted, double level) {
  if (sorted.empty()) throw DataError("percentile of an empty sample");
  const double pos = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

StatsReport summarize(const WealthDistribution& dist, const Objective& objective) {
  const std::size_t m = dist.terminal.size();
  if (m == 0) throw DataError("cannot summarize an empty distribution");
  const bool relative = is_relative(objective.kind);
  double lower = 1.0, upper = INFINITY;
  if (is_target_range(objective.kind)) {
    lower = objective.range.lower;
    upper = objective.range.upper;
  }

  StatsReport r;
  r.paths = m;
  double sum = 0, payoff_sum = 0, invested_sum = 0;
  std::size_t down = 0, below = 0, inside = 0, above = 0, locked = 0;
  std::vector<double> pay(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double w = dist.terminal[i];
    const double b = relative ? dist.benchmark_terminal[i] : 0.0;
    const double x = w - b;
    sum += w;
    pay[i] = payoff(objective, w, b);
    payoff_sum += pay[i];
    invested_sum += payoff(objective, dist.invested[i], b);
    if (w < 1.0) ++down;
    if (x < lower) {
      ++below;
    } else if (x <= upper) {
      ++inside;
    } else {
      ++above;
    }
    locked += dist.locked[i];
  }
  const double dm = static_cast<double>(m);
  r.mean = sum / dm;
  r.v0 = payoff_sum / dm;
  r.v0_invested = invested_sum / dm;
  double ss = 0, ssp = 0;
  for (std::size_t i = 0; i < m; ++i) {
    ss += (dist.terminal[i] - r.mean) * (dist.terminal[i] - r.mean);
    ssp += (pay[i] - r.v0) * (pay[i] - r.v0);
  }
  r.sd = m > 1 ? std::sqrt(ss / (dm - 1)) : 0.0;
  r.v0_stderr = m > 1 ? std::sqrt(ssp / (dm - 1) / dm) : 0.0;
  r.downside_prob = static_cast<double>(down) / dm;
  r.below_lower_prob = static_cast<double>(below) / dm;
  r.containment_prob = static_cast<double>(inside) / dm;
  r.overshoot_prob = static_cast<double>(above) / dm;
  r.locked_fraction = static_cast<double>(locked) / dm;
  r.location_ratio = is_target_range(objective.kind) && std::isfinite(upper) ? (r.mean - lower) / (upper - lower) : NAN;
  return r;
}

Histogram histogram(const std::vector<double>& values, std::size_t bins) {
  if (values.empty()) throw DataError("histogram of an empty sample");
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  Histogram h;
  h.edges.resize(bins + 1);
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges[bins] = hi;
  for (double v : values) {
    std::size_t k = width > 0 ? static_cast<std::size_t>((v - lo) / width) : 0;
    h.counts[std::min(k, bins - 1)]++;
  }
  return h;
}

ExperimentResult run_experiment(const Experiment& e) {
  if (e.scenarios == nullptr) throw ConfigError("experiment has no scenarios");
  ExperimentResult r;
  r.policy = backward_induction(*e.scenarios, e.grid, e.objective, e.basis, e.cost, e.options);
  const ScenarioSet& eval = e.out_of_sample != nullptr ? *e.out_of_sample : *e.scenarios;
  r.distribution = evaluate_policy(r.policy, eval, e.options.workers);
  r.stats = summarize(r.distribution, e.objective);
  return r;
}

std::vector<SweepRow> sensitivity_sweep(const Experiment& base, SweepBound bound, const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep grid is empty");
  if (!is_target_range(base.objective.kind)) throw ConfigError("bound sweeps need a target-range objective");
  std::vector<SweepRow> rows;
  for (double v : values) {
    Experiment e = base;
    (bound == SweepBound::Lower ? e.objective.range.lower : e.objective.range.upper) = v;
    e.objective.validate();
    rows.push_back({v, run_experiment(e).stats});
  }
  return rows;
}

std::vector<FrontierPoint> frontier(const Experiment& base, const std::vector<std::pair<double, double>>& ranges,
                                    const std::vector<double>& gammas) {
  if (ranges.empty() && gammas.empty()) throw ConfigError("frontier needs ranges or gammas");
  std::vector<FrontierPoint> out;
  for (const auto& [lo, hi] : ranges) {
    Experiment e = base;
    e.objective.kind = ObjectiveKind::Strs;
    e.objective.range = {lo, hi, ObjectiveKind::Strs};
    e.objective.validate();
    FrontierPoint p{ObjectiveKind::Strs, lo, hi, NAN, run_experiment(e).stats};
    out.push_back(p);
  }
  for (double g : gammas) {
    Experiment e = base;
    e.objective.kind = ObjectiveKind::Crra;
    e.objective.crra.gamma = g;
    e.objective.validate();
    out.push_back({ObjectiveKind::Crra, NAN, NAN, g, run_experiment(e).stats});
  }
  return out;
}

}  // namespace lsmc
