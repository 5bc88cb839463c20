#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lsmc/market.hpp"
#include "lsmc/objectives.hpp"
#include "lsmc/regression.hpp"

namespace lsmc {

// Lattice portfolios on {a >= 0, sum(a) <= 1}; the remainder is cash.
// actions[0] is all cash.
struct ControlGrid {
  std::size_t assets = 0;
  double mesh = 0.2;
  std::vector<std::vector<double>> actions;

  std::size_t size() const { return actions.size(); }
  bool operator==(const ControlGrid&) const = default;
};

ControlGrid enumerate_grid(std::size_t d, double mesh);

struct CostSpec {
  double proportional_rate = 0.001;
  bool operator==(const CostSpec&) const = default;
};

// Randomized controls used to spread the forward wealth paths.
struct ControlArray {
  std::size_t paths = 0, periods = 0, assets = 0;
  std::vector<double> weights;  // paths x periods x assets

  std::span<const double> at(std::size_t m, std::size_t n) const {
    return {weights.data() + (m * periods + n) * assets, assets};
  }
};

ControlArray randomize_controls(std::size_t m_paths, std::size_t n_periods, std::size_t d, std::uint64_t seed);

// w (1 - c sum|new - prev|) (rf + new . R); clamped at 1e-12 with a count.
double step_wealth(double w, std::span<const double> prev, std::span<const double> next,
                   std::span<const double> excess, double rf, const CostSpec& cost);
std::uint64_t wealth_clamp_count();
void reset_wealth_clamp_count();

// Forward wealth [paths x (periods+1)] under the given controls, W0 = 1 and
// all-cash initial holdings.
std::vector<double> simulate_endogenous_wealth(const ScenarioSet& s, const ControlArray& controls,
                                               const CostSpec& cost);

// True iff w >= upper * rf^-(N-n).
bool stop_profit_check(double w, std::size_t n, const TargetRange& range, double rf, std::size_t horizon);

struct ActionChoice {
  std::size_t action = 0;
  bool locked = false;
};

struct SolverOptions {
  RegressionMode mode = RegressionMode::TwoStageConstSigma;
  bool stop_profit = true;
  std::uint64_t control_seed = 1;
  unsigned workers = 1;
};

class Policy {
 public:
  ControlGrid grid;
  Objective objective;
  BasisSpec basis;
  RegressionMode mode = RegressionMode::TwoStageConstSigma;
  bool stop_profit = true;
  std::size_t horizon = 0;
  double rf_gross = 1.0;
  CostSpec cost;
  std::vector<std::vector<FittedContinuation>> models;  // [n][j]

  // Solver estimates at t0: per-action in-sample mean payoff of the
  // recomputed paths, the chosen action and its value.
  std::vector<double> initial_values;
  std::size_t initial_action = 0;
  double v0 = 0.0;

  // Free-form origin note stored in policy files.
  std::string provenance;

  // Rebuilds evaluation caches; call after models change. Throws DataError
  // if a model is missing or has the wrong shape.
  void finalize();
  void finalize_time(std::size_t n);

  bool stop_profit_active() const;
  double lock_threshold(std::size_t n) const;

  // Per-action coefficients of the mean (and log sigma) as polynomials in
  // wealth for a fixed exogenous state.
  struct Prepared {
    std::size_t n = 0;
    std::vector<double> mean;       // J x (D+1)
    std::vector<double> log_sigma;  // J x 2, state-sigma mode
    std::vector<double> vars, exo, exo_sigma;
  };
  void prepare(std::size_t n, std::span<const double> z, double b, Prepared& out) const;
  double continuation(const Prepared& p, std::size_t j, double w) const;
  std::size_t best_action(const Prepared& p, double w) const;

  double continuation(std::size_t n, std::size_t j, std::span<const double> z, double w, double b = 1.0) const;
  // Argmax action; with stop-profit on, a locked choice (all cash) when the
  // liquidation value w (1 - c sum|prev|) reaches the threshold. Empty prev
  // means all cash.
  ActionChoice choose(std::size_t n, std::span<const double> z, double w, std::span<const double> prev = {},
                      double b = 1.0) const;

  const PolynomialBasis& mean_basis() const { return *mean_basis_; }

 private:
  struct TimeCache {
    std::vector<double> beta;   // J x K
    std::vector<double> eta;    // J x K'
    std::vector<double> sigma;  // J
    std::vector<double> utility;
  };
  std::shared_ptr<const PolynomialBasis> mean_basis_;
  std::shared_ptr<const PolynomialBasis> sigma_basis_;
  std::vector<TimeCache> cache_;
  std::vector<double> thresholds_;
  void ensure_bases();
};

// Degree-1 basis over the same variables, used for log sigma.
BasisSpec sigma_basis_spec(const BasisSpec& mean);

// Terminal outcome of one path. invested is the wealth that rode the
// strategy (exactly upper when locked); surplus is the withdrawn amount at
// lock time.
struct TerminalOutcome {
  double invested = 0.0;
  double surplus = 0.0;
  bool locked = false;
  std::size_t lock_time = 0;
};

// One strategy pipeline along a path. last indexes the grid action held
// since the previous date (0 = cash).
struct PathState {
  double w = 1.0;
  std::size_t last = 0;
  bool locked = false;
  double surplus = 0.0;
  std::size_t lock_time = 0;
};

// Lets each unlocked pipeline of path m act by the policy at dates
// from..N-1. With a single pipeline, trace (size N+1) receives the total
// wealth, surplus included, at dates from+1..N.
void advance_with_policy(const ScenarioSet& s, const Policy& policy, std::size_t m, std::size_t from,
                         std::span<PathState> pipes, const std::vector<double>& benchmark,
                         Policy::Prepared& scratch, double* trace = nullptr);

// Applies a_j at t_n from w_start, then the policy's argmax actions up to
// the horizon. Models for n+1..N-1 must be ready.
TerminalOutcome recompute_to_horizon(const ScenarioSet& s, const Policy& policy, std::size_t m, std::size_t n,
                                     std::size_t j, double w_start, std::span<const double> prev_weights,
                                     const std::vector<double>& benchmark = {});

Policy backward_induction(const ScenarioSet& s, const ControlGrid& grid, const Objective& objective,
                          const BasisSpec& basis, const CostSpec& cost, const SolverOptions& options);

void save_policy(const Policy& policy, const std::filesystem::path& path);
Policy load_policy(const std::filesystem::path& path);
std::string policy_to_json(const Policy& policy);
Policy policy_from_json(const std::string& text);

}  // namespace lsmc
