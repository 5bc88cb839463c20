#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lsmc/solver.hpp"

namespace lsmc {

// Forward run of a policy. terminal is the total wealth (a locked path
// reports U + surplus * rf^(N - lock)); invested is what the objective pays on.
struct WealthDistribution {
  std::vector<double> terminal;
  std::vector<double> invested;
  std::vector<double> surplus;
  std::vector<std::uint8_t> locked;
  std::vector<double> benchmark_terminal;  // relative kinds only
  std::vector<double> percentile_levels;   // in [0, 1]
  std::vector<std::vector<double>> percentiles;  // (N+1) x P
  std::uint64_t seed = 0;
};

const std::vector<double>& default_percentile_levels();

WealthDistribution evaluate_policy(const Policy& policy, const ScenarioSet& s, unsigned workers = 1,
                                   const std::vector<double>& percentile_levels = default_percentile_levels());

struct StatsReport {
  std::size_t paths = 0;
  double mean = 0, sd = 0;
  double downside_prob = 0;     // P[W_T < 1]
  double below_lower_prob = 0;  // P[W_T < L]
  double containment_prob = 0;  // P[L <= W_T <= U]
  double overshoot_prob = 0;    // P[W_T > U]
  double location_ratio = 0;    // NaN without a finite U or for CRRA
  double v0 = 0;           // mean payoff of the reported W_T (overshoot pays as above U)
  double v0_stderr = 0;
  double v0_invested = 0;  // mean payoff with locked paths at exactly U, as the solver counts them
  double locked_fraction = 0;
};

// Range masses use W_T (W_T - B_T for relative kinds) against the objective's
// band; for CRRA they use [1, inf).
StatsReport summarize(const WealthDistribution& dist, const Objective& objective);

// Linear interpolation between order statistics; sorted must be ascending.
double percentile_sorted(const std::vector<double>& sorted, double level);

struct Histogram {
  std::vector<double> edges;  // bins + 1
  std::vector<std::size_t> counts;
};
Histogram histogram(const std::vector<double>& values, std::size_t bins = 100);

// One solve-and-evaluate job. Evaluation runs on out_of_sample when given.
struct Experiment {
  const ScenarioSet* scenarios = nullptr;
  const ScenarioSet* out_of_sample = nullptr;
  ControlGrid grid;
  Objective objective;
  BasisSpec basis;
  CostSpec cost;
  SolverOptions options;
};

struct ExperimentResult {
  Policy policy;
  WealthDistribution distribution;
  StatsReport stats;
};

ExperimentResult run_experiment(const Experiment& e);

enum class SweepBound { Lower, Upper };

struct SweepRow {
  double value;
  StatsReport stats;
};

// Re-solves per bound value on the same scenarios and control seed.
std::vector<SweepRow> sensitivity_sweep(const Experiment& base, SweepBound bound, const std::vector<double>& values);

struct FrontierPoint {
  ObjectiveKind kind;
  double lower = NAN, upper = NAN, gamma = NAN;
  StatsReport stats;
};

// STRS points over (L, U) pairs, then CRRA points over gammas.
std::vector<FrontierPoint> frontier(const Experiment& base, const std::vector<std::pair<double, double>>& ranges,
                                    const std::vector<double>& gammas);

}  // namespace lsmc
