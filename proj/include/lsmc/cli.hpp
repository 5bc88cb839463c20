#pragma once

#include <iosfwd>
#include <optional>

#include "lsmc/config.hpp"

namespace lsmc {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3, kExitIo = 4 };

// Maps an exception to the documented exit code.
int exit_code_for(const std::exception& e);

// Market data, calibrated model and scenarios for a config.
struct MarketSetup {
  ReturnsTable table;
  VarModel model;
  ScenarioSet scenarios;
  std::optional<ScenarioSet> out_of_sample;
};

MarketSetup prepare_market(const RunConfig& c, bool need_oos);
// Throws ConfigError when predictors do not resolve or paths do not exceed the basis size.
Experiment make_experiment(const RunConfig& c, const MarketSetup& m);

// Entry point of the lsmc tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lsmc
