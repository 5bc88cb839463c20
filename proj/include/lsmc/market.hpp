#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lsmc {

struct IngestOptions {
  // Series to keep, in this order; empty keeps every column of the file.
  std::vector<std::string> columns;
  // Columns holding price levels; all other columns hold per-period returns.
  std::vector<std::string> price_columns;
  bool all_prices = false;
  // Return columns are log returns (true) or simple returns (false).
  bool returns_are_log = true;
  // Drop rows whose returns are undefined instead of failing.
  bool drop_gaps = false;
};

struct ReturnsTable {
  std::vector<std::string> dates;
  std::vector<std::string> series_names;
  Eigen::MatrixXd log_returns;  // periods x series

  std::size_t column(const std::string& name) const;
};

ReturnsTable ingest_csv(const std::filesystem::path& path, const IngestOptions& options);
ReturnsTable parse_returns_csv(std::istream& in, const IngestOptions& options,
                               const std::string& source = "<stream>");
// Writes price levels starting at 100, one column per series.
void write_price_csv(const ReturnsTable& table, const std::filesystem::path& path);

struct VarModel {
  Eigen::VectorXd intercept;     // S
  Eigen::MatrixXd coefficient;   // S x S
  Eigen::MatrixXd residuals;     // (T-1) x S
  std::vector<std::string> series_names;
  std::vector<std::size_t> investable_index;
  Eigen::VectorXd initial_state;  // last observed log-return row
  double spectral_radius = 0.0;
  std::vector<std::string> warnings;

  std::size_t series_count() const { return series_names.size(); }
  std::vector<std::string> investable_names() const;
};

VarModel calibrate_var1(const ReturnsTable& table, const std::vector<std::string>& investable);

// Scenario paths. state(m, n) is the log-return vector realized over period
// n-1 -> n (state(m, 0) is the common initial state), and excess(m, n) the
// simple excess returns of the investable series over n -> n+1, so
// excess(m, n)[i] = exp(state(m, n+1)[investable[i]]) - rf.
struct ScenarioSet {
  std::size_t paths = 0, periods = 0, assets = 0, series = 0;
  double rf_gross = 1.0;
  std::uint64_t seed = 0;
  std::vector<std::string> series_names;
  std::vector<std::size_t> investable_index;
  std::vector<double> excess_returns;  // paths x periods x assets
  std::vector<double> predictors;      // paths x (periods+1) x series

  std::span<const double> excess(std::size_t m, std::size_t n) const {
    return {excess_returns.data() + (m * periods + n) * assets, assets};
  }
  std::span<const double> state(std::size_t m, std::size_t n) const {
    return {predictors.data() + (m * (periods + 1) + n) * series, series};
  }
  std::span<double> excess_mut(std::size_t m, std::size_t n) {
    return {excess_returns.data() + (m * periods + n) * assets, assets};
  }
  std::span<double> state_mut(std::size_t m, std::size_t n) {
    return {predictors.data() + (m * (periods + 1) + n) * series, series};
  }
  bool operator==(const ScenarioSet&) const = default;
};

double monthly_rf_gross(double annual_rf);

ScenarioSet simulate_paths(const VarModel& model, std::size_t m_paths, std::size_t n_periods,
                           double annual_rf, std::uint64_t seed, unsigned workers = 1);

// Benchmark wealth per path and date, B(m, 0) = 1. benchmark is a series
// name (compounded with its log-returns) or "equal_weight" (equal weights in
// the investable assets, rebalanced each period, no costs).
std::vector<double> benchmark_paths(const ScenarioSet& s, const std::string& benchmark);

void save_scenarios(const ScenarioSet& s, const std::filesystem::path& path);
ScenarioSet load_scenarios(const std::filesystem::path& path);

// Bundled synthetic market: a known VAR(1) over BOND, US_EQ, EM_EQ (assets)
// and GOLD, USD (predictors) with Gaussian innovations.
enum class SyntheticPreset { Default, Calm };
SyntheticPreset synthetic_preset_from_string(const std::string& name);

struct SyntheticSpec {
  std::vector<std::string> names;
  Eigen::VectorXd intercept;
  Eigen::MatrixXd coefficient;
  Eigen::MatrixXd innovation_chol;  // lower Cholesky factor of the innovation covariance
};
SyntheticSpec synthetic_spec(SyntheticPreset preset);
ReturnsTable synthetic_returns(SyntheticPreset preset, std::size_t periods, std::uint64_t seed);
std::vector<std::string> synthetic_investable();

}  // namespace lsmc
