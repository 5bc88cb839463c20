#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "lsmc/evaluator.hpp"

namespace lsmc {

// Run configuration. The text form is "key = value" per line with '#'
// comments; lists are comma separated and ranges are written lower:upper.
struct RunConfig {
  // "synthetic:default", "synthetic:calm", or a CSV path (relative paths
  // resolve against the config file's directory).
  std::string data = "synthetic:default";
  std::uint64_t data_seed = 7;
  std::size_t data_periods = 360;
  std::vector<std::string> columns;
  std::vector<std::string> price_columns;
  bool all_prices = false;
  bool returns_log = true;
  bool drop_gaps = false;
  std::vector<std::string> investable{"BOND", "US_EQ", "EM_EQ"};

  double annual_rf = 0.02;
  std::size_t horizon = 12;
  std::size_t paths = 10000;
  double mesh = 0.2;
  double cost = 0.001;

  ObjectiveKind objective = ObjectiveKind::Strs;
  double lower = 1.0;
  double upper = 1.1;
  double gamma = 5.0;
  std::string benchmark = "equal_weight";

  RegressionMode mode = RegressionMode::TwoStageConstSigma;
  int degree = 2;
  std::vector<std::string> predictors;  // empty: every series
  bool cross_terms = true;
  bool include_wealth = true;
  bool stop_profit = true;

  std::uint64_t seed = 42;
  std::uint64_t oos_seed = 0;  // 0: seed + 1
  bool oos = false;
  unsigned workers = 1;
  std::string out = "out";
  std::vector<double> percentiles = default_percentile_levels();
  std::size_t histogram_bins = 100;

  std::vector<double> sweep_upper;
  std::vector<double> sweep_lower;
  std::vector<std::pair<double, double>> frontier_ranges;
  std::vector<double> frontier_gammas;
  std::vector<std::pair<double, double>> validate_ranges{{1.0, 1.1}, {1.0, 1.2}, {1.0, 1.3}, {1.0, 1.4},
                                                         {1.0, 1.5}, {1.0, 1.6}, {1.0, INFINITY}};
  std::vector<double> validate_gammas;

  // Directory used to resolve a relative data path.
  std::filesystem::path base_dir;

  bool operator==(const RunConfig& o) const;

  Objective objective_descriptor() const;
  std::uint64_t effective_oos_seed() const { return oos_seed != 0 ? oos_seed : seed + 1; }
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
// Canonical text: every key in a fixed order, doubles in shortest round-trip form.
std::string serialize_config(const RunConfig& c);
// 64-bit FNV-1a of serialize_config.
std::uint64_t config_hash(const RunConfig& c);
// Throws ConfigError on the first violated precondition.
void validate_config(const RunConfig& c);

}  // namespace lsmc
