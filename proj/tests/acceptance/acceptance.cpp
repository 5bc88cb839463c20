// Acceptance runner: `acceptance <n>` checks one criterion and prints
// "criterion n: PASS|FAIL ..." plus supporting detail lines.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lsmc/cli.hpp"
#include "lsmc/config.hpp"
#include "lsmc/objectives.hpp"
#include "lsmc/regression.hpp"
#include "lsmc/specfun.hpp"
#include "oracles.hpp"

using namespace lsmc;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path source_dir() {
  if (const char* env = std::getenv("LSMC_SOURCE_DIR")) return env;
  return LSMC_SOURCE_DIR;
}

std::string cli_binary() {
  if (const char* env = std::getenv("LSMC_BINARY")) return env;
  return LSMC_BINARY;
}

// The bundled market with monthly steps, as shipped in configs/default.cfg.
RunConfig bundled_config() { return load_config(source_dir() / "configs" / "default.cfg"); }

std::vector<double> mu_grid() {
  std::vector<double> mu;
  for (int i = 0; i <= 12; ++i) mu.push_back((80.0 + 5.0 * i) / 100.0);
  return mu;
}

const std::vector<double> kSigmas{0.005, 0.02, 0.05, 0.15};
const std::vector<std::pair<double, double>> kRanges{{1.0, 1.05}, {1.0, 1.2}, {0.93, 1.53}, {1.0, INFINITY}};

Verdict range_grid(bool ftrs, double tol) {
  double worst = 0.0;
  std::string where;
  std::vector<double> mine;
  const auto t0 = Clock::now();
  for (double mu : mu_grid())
    for (double s : kSigmas)
      for (const auto& [lo, hi] : kRanges) {
        const TargetRange r{lo, hi, ftrs ? ObjectiveKind::Ftrs : ObjectiveKind::Strs};
        mine.push_back(ftrs ? ftrs_continuation({mu, s}, r) : strs_continuation({mu, s}, r));
      }
  const double runtime = seconds_since(t0);
  std::size_t i = 0;
  for (double mu : mu_grid())
    for (double s : kSigmas)
      for (const auto& [lo, hi] : kRanges) {
        const double want = ftrs ? oracle::ftrs_value(mu, s, lo, hi) : oracle::strs_value(mu, s, lo, hi);
        const double err = std::abs(mine[i++] - want);
        if (err > worst || !(err == err)) {
          worst = err;
          where = fmt("mu=%.2f sigma=%g L=%g U=%g", mu, s, lo, hi);
        }
      }
  const bool pass = worst <= tol && (ftrs || runtime < 5.0);
  return {pass, fmt("max abs error %.3e (tol %.0e) at %s over %zu points; runtime %.4f s", worst, tol,
                    where.c_str(), mine.size(), runtime)};
}

Verdict criterion1() { return range_grid(false, 1e-10); }
Verdict criterion2() { return range_grid(true, 1e-12); }

Verdict criterion3() {
  double worst = 0.0, worst_clean = 0.0;
  std::string where;
  bool inf_ok = true;
  int points = 0, clean = 0;
  for (double g : {2.0, 5.0, 10.0, 50.0, 100.0})
    for (double mu : {1.0, 1.1, 1.3})
      for (double s : {0.01, 0.05}) {
        ++points;
        const double got = crra_continuation({mu, s}, CrraParams{g});
        const double want = oracle::crra_value(g, mu, s);
        if (std::isinf(want)) {
          const bool same = got == want;
          inf_ok = inf_ok && same;
          std::cout << fmt("  gamma=%g mu=%g sigma=%g: oracle %g, closed form %g%s\n", g, mu, s, want, got,
                           same ? "" : "  MISMATCH");
          continue;
        }
        const double rel = std::abs(got - want) / std::abs(want);
        // Share of the floored expectation carried by the point mass at the floor.
        const oracle::mp floor = 1e-6;
        const oracle::mp mass = pow(floor, 1.0 - g) * oracle::normal_cdf((floor - mu) / s);
        const double share = static_cast<double>(mass / oracle::floored_power(1.0 - g, mu, s, 1e-6));
        if (share < 1e-9) {
          ++clean;
          worst_clean = std::max(worst_clean, rel);
        }
        if (!(rel <= 1e-6)) {
          std::cout << fmt("  gamma=%g mu=%g sigma=%g: closed form %.6g, floored oracle %.6g, floor-mass share %.6f\n",
                           g, mu, s, got, want, share);
        }
        if (rel > worst || !(rel == rel)) {
          worst = rel;
          where = fmt("gamma=%g mu=%g sigma=%g", g, mu, s);
        }
      }

  // Identity suite.
  double kummer = 0.0;
  for (double a : {-2.5, -0.5, 0.3, 1.0, 2.7})
    for (double b : {0.5, 1.5, 3.2})
      for (double z : {-12.0, -3.0, -0.4, 0.7, 5.0, 12.0}) {
        const double lhs = specfun::kummer_1f1(a, b, z);
        const double rhs = std::exp(z) * specfun::kummer_1f1(b - a, b, -z);
        kummer = std::max(kummer, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
      }
  double reduction = 0.0;
  for (unsigned n = 0; n <= 3; ++n)
    for (double b : {0.5, 1.5, 2.5})
      for (double z : {-4.0, -0.5, 0.8, 6.0}) {
        const double psi = specfun::tricomi_psi(-static_cast<double>(n), b, z).real();
        const double want = (n % 2 ? -1.0 : 1.0) * specfun::rising_factorial(b, n) *
                            specfun::kummer_1f1(-static_cast<double>(n), b, z);
        reduction = std::max(reduction, std::abs(psi - want) / std::max(1.0, std::abs(want)));
      }
  double moments = 0.0;
  for (double mu : {0.5, 1.0, 1.2})
    for (double s : {0.05, 0.3}) {
      const double m2 = mu * mu + s * s;
      const double m4 = std::pow(mu, 4) + 6 * mu * mu * s * s + 3 * std::pow(s, 4);
      const double m6 = std::pow(mu, 6) + 15 * std::pow(mu, 4) * s * s + 45 * mu * mu * std::pow(s, 4) +
                        15 * std::pow(s, 6);
      const double want[] = {m2, m4, m6};
      for (int k = 1; k <= 3; ++k) {
        const double got = specfun::gaussian_real_moment({2.0 * k, mu, s});
        moments = std::max(moments, std::abs(got - want[k - 1]) / want[k - 1]);
      }
    }

  const bool ids = kummer <= 1e-9 && reduction <= 1e-12 && moments <= 1e-12;
  std::cout << fmt("  max rel error %.3e over the %d points where the floor mass is negligible\n", worst_clean, clean);
  std::cout << fmt("  Kummer transformation max rel %.3e (tol 1e-9)\n", kummer);
  std::cout << fmt("  polynomial reduction max rel %.3e (tol 1e-12)\n", reduction);
  std::cout << fmt("  even Gaussian moments max rel %.3e (tol 1e-12)\n", moments);
  return {worst <= 1e-6 && inf_ok && ids,
          fmt("CRRA max rel error %.3e (tol 1e-6) at %s over %d points; infinities %s; identities %s", worst,
              where.c_str(), points, inf_ok ? "match" : "differ", ids ? "pass" : "fail")};
}

Verdict criterion4() {
  RunConfig c;
  c.data = "synthetic:default";
  c.investable = {"BOND", "US_EQ"};
  c.mesh = 0.5;
  c.paths = 100000;
  c.horizon = 1;
  c.seed = 2024;
  const auto t0 = Clock::now();
  const MarketSetup m = prepare_market(c, false);
  const ScenarioSet& s = m.scenarios;

  Objective strs;
  strs.range = {1.0, 1.05, ObjectiveKind::Strs};
  Objective ftrs;
  ftrs.kind = ObjectiveKind::Ftrs;
  ftrs.range = {1.0, 1.05, ObjectiveKind::Ftrs};
  Objective crra;
  crra.kind = ObjectiveKind::Crra;
  crra.crra.gamma = 5.0;

  int agree = 0;
  std::size_t grid_size = 0;
  for (const auto& [name, obj] : {std::pair{"strs", strs}, std::pair{"ftrs", ftrs}, std::pair{"crra", crra}}) {
    Experiment e = make_experiment(c, m);
    e.objective = obj;
    grid_size = e.grid.size();
    const Policy p = backward_induction(s, e.grid, e.objective, e.basis, e.cost, e.options);

    const std::vector<double> cash(2, 0.0);
    std::vector<double> brute(e.grid.size(), 0.0);
    for (std::size_t j = 0; j < e.grid.size(); ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < s.paths; ++i) {
        const double w = step_wealth(1.0, cash, e.grid.actions[j], s.excess(i, 0), s.rf_gross, e.cost);
        acc += payoff(obj, w);
      }
      brute[j] = acc / static_cast<double>(s.paths);
    }
    const std::size_t best = static_cast<std::size_t>(std::max_element(brute.begin(), brute.end()) - brute.begin());
    const bool same = best == p.initial_action;
    agree += same;
    std::cout << fmt("  %s: solver action %zu (%g, %g), brute-force action %zu (%g, %g), values %.6g vs %.6g%s\n",
                     name, p.initial_action, e.grid.actions[p.initial_action][0], e.grid.actions[p.initial_action][1],
                     best, e.grid.actions[best][0], e.grid.actions[best][1], brute[p.initial_action], brute[best],
                     same ? "" : "  DIFFERENT");
  }
  const double runtime = seconds_since(t0);
  return {agree == 3 && grid_size == 6 && runtime < 60.0,
          fmt("%d/3 objectives agree; J=%zu, M=%zu; runtime %.1f s (limit 60)", agree, grid_size, c.paths, runtime)};
}

Verdict criterion5() {
  RunConfig c = bundled_config();
  c.paths = 10000;
  c.horizon = 12;
  c.mesh = 0.2;
  const auto t0 = Clock::now();
  const MarketSetup m = prepare_market(c, true);
  bool pass = m.scenarios.assets == 3;
  for (double hi : {1.1, 1.2}) {
    c.lower = 1.0;
    c.upper = hi;
    double v0[2], oos[2];
    const RegressionMode modes[] = {RegressionMode::TwoStageConstSigma, RegressionMode::ClassicalDirect};
    for (int i = 0; i < 2; ++i) {
      c.mode = modes[i];
      const Experiment e = make_experiment(c, m);
      const ExperimentResult r = run_experiment(e);
      // The experiment evaluates on the fresh set; the in-sample figure is the
      // realized payoff mean on the training paths.
      const StatsReport in = summarize(evaluate_policy(r.policy, m.scenarios), e.objective);
      v0[i] = in.v0;
      oos[i] = r.stats.v0;
      std::cout << fmt("  [1, %g] %s: in-sample v0 %.5f (solver %.5f, E %.4f, SD %.4f), out-of-sample payoff %.5f\n",
                       hi, to_string(modes[i]).c_str(), v0[i], r.policy.v0, in.mean, in.sd, oos[i]);
    }
    pass = pass && v0[0] > v0[1] && oos[0] >= oos[1];
  }
  const double runtime = seconds_since(t0);
  return {pass && runtime < 900.0,
          fmt("two-stage above classical in-sample and out-of-sample (fresh seed %llu): %s; runtime %.0f s (limit 900)",
              static_cast<unsigned long long>(c.effective_oos_seed()), pass ? "yes" : "no", runtime)};
}

// Market used by the bound sweeps: the bundled series with two risky assets.
RunConfig sweep_config() {
  RunConfig c = bundled_config();
  c.investable = {"BOND", "US_EQ"};
  c.paths = 10000;
  c.lower = 1.0;
  return c;
}

// Nondecreasing up to one adjacent decrease no larger than its standard error.
bool nondecreasing_one_inversion(const std::vector<double>& v, const std::vector<double>& se, std::string& note) {
  int inversions = 0;
  bool ok = true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] >= v[i - 1]) continue;
    ++inversions;
    const double drop = v[i - 1] - v[i];
    const double tol = std::max(se[i - 1], se[i]);
    note += fmt(" drop %.3g at step %zu (SE %.3g)", drop, i, tol);
    if (drop > tol) ok = false;
  }
  return ok && inversions <= 1;
}

Verdict criterion6() {
  const RunConfig c = sweep_config();
  const MarketSetup m = prepare_market(c, false);
  const Experiment e = make_experiment(c, m);
  const std::vector<double> uppers{1.1, 1.2, 1.3, 1.4, 1.5, 1.6, INFINITY};
  const auto rows = sensitivity_sweep(e, SweepBound::Upper, uppers);
  std::vector<double> mean, sd, se_mean, se_sd;
  for (const auto& r : rows) {
    const double n = static_cast<double>(r.stats.paths);
    mean.push_back(r.stats.mean);
    sd.push_back(r.stats.sd);
    se_mean.push_back(r.stats.sd / std::sqrt(n));
    se_sd.push_back(r.stats.sd / std::sqrt(2.0 * (n - 1.0)));
    std::cout << fmt("  U=%g: E %.5f SD %.5f P[W<1] %.4f v0 %.5f\n", r.value, r.stats.mean, r.stats.sd,
                     r.stats.downside_prob, r.stats.v0);
  }
  std::string mean_note, sd_note;
  const bool a = nondecreasing_one_inversion(mean, se_mean, mean_note);
  const bool b = nondecreasing_one_inversion(sd, se_sd, sd_note);
  return {a && b, fmt("E nondecreasing: %s%s; SD nondecreasing: %s%s", a ? "yes" : "no", mean_note.c_str(),
                      b ? "yes" : "no", sd_note.c_str())};
}

Verdict criterion7() {
  const RunConfig c = sweep_config();
  const MarketSetup m = prepare_market(c, false);
  const Experiment e = make_experiment(c, m);
  const std::vector<double> uppers{1.05, 1.1, 1.2, 1.3};
  const auto rows = sensitivity_sweep(e, SweepBound::Upper, uppers);
  std::vector<double> neg_ratio, se;
  for (const auto& r : rows) {
    const double width = r.value - c.lower;
    neg_ratio.push_back(-r.stats.location_ratio);
    se.push_back(r.stats.sd / std::sqrt(static_cast<double>(r.stats.paths)) / width);
    std::cout << fmt("  U=%g: R %.4f (E %.5f)\n", r.value, r.stats.location_ratio, r.stats.mean);
  }
  std::string note;
  const bool ok = nondecreasing_one_inversion(neg_ratio, se, note);
  return {ok, fmt("R nonincreasing in U: %s%s", ok ? "yes" : "no", note.c_str())};
}

Verdict criterion8() {
  RunConfig c = load_config(source_dir() / "configs" / "calm.cfg");
  c.lower = 1.0;
  c.upper = 1.1;
  const MarketSetup m = prepare_market(c, false);
  const ExperimentResult r = run_experiment(make_experiment(c, m));
  const StatsReport& s = r.stats;
  std::cout << fmt("  E %.5f SD %.5f overshoot %.4f below L %.4f locked %.4f\n", s.mean, s.sd, s.overshoot_prob,
                   s.below_lower_prob, s.locked_fraction);
  return {s.downside_prob <= 0.05 && s.containment_prob >= 0.85,
          fmt("P[W<1] %.4f (limit 0.05), containment %.4f (limit 0.85), M=%zu", s.downside_prob, s.containment_prob,
              s.paths)};
}

Verdict criterion9() {
  RunConfig c = bundled_config();
  c.investable = {"BOND", "US_EQ"};
  c.paths = 2000;
  c.objective = ObjectiveKind::Crra;
  const std::vector<double> gammas{2, 5, 10, 20, 50, 100};
  const std::vector<std::uint64_t> seeds{11, 12, 13, 14, 15};
  const auto t0 = Clock::now();

  bool pass = true;
  double prev_mean = -INFINITY;
  for (double g : gammas) {
    c.gamma = g;
    std::vector<double> two, classical;
    for (std::uint64_t seed : seeds) {
      c.seed = seed;
      const MarketSetup m = prepare_market(c, false);
      for (RegressionMode mode : {RegressionMode::TwoStageConstSigma, RegressionMode::ClassicalDirect}) {
        c.mode = mode;
        const Experiment e = make_experiment(c, m);
        const Policy p = backward_induction(*e.scenarios, e.grid, e.objective, e.basis, e.cost, e.options);
        (mode == RegressionMode::ClassicalDirect ? classical : two).push_back(p.v0);
      }
    }
    auto moments = [](const std::vector<double>& v) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
      return std::pair{mean, sd / std::abs(mean)};
    };
    const auto [mean2, cv2] = moments(two);
    const auto [meanc, cvc] = moments(classical);
    bool finite = true;
    for (double x : two) finite = finite && std::isfinite(x);
    const bool trend = mean2 > prev_mean;
    prev_mean = mean2;
    pass = pass && finite && cv2 <= 0.05 && trend;
    std::cout << fmt("  gamma=%g: two-stage mean v0 %.6g CV %.4f%s%s | classical mean v0 %.6g CV %.4f\n", g, mean2,
                     cv2, finite ? "" : " NONFINITE", trend ? "" : " OUT-OF-TREND", meanc, cvc);
  }
  return {pass, fmt("two-stage finite, CV <= 0.05 and increasing in gamma over %zu seeds: %s; runtime %.0f s",
                    seeds.size(), pass ? "yes" : "no", seconds_since(t0))};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict criterion10() {
  const fs::path dir = fs::temp_directory_path() / "lsmc_acceptance_10";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cmd = "\"" + cli_binary() + "\" solve --config \"" +
                          (source_dir() / "configs" / "smoke.cfg").string() + "\" --out \"" + (dir / "run").string() +
                          "\" > \"" + (dir / "stdout").string() + "\"";
  const char* files[] = {"policy.json", "stats.csv", "histogram.csv", "percentiles.csv", "../stdout"};
  std::vector<std::string> first;
  if (std::system(cmd.c_str()) != 0) return {false, "first CLI run failed: " + cmd};
  for (const char* f : files) first.push_back(slurp(dir / "run" / f));
  if (std::system(cmd.c_str()) != 0) return {false, "second CLI run failed"};
  int identical = 0;
  for (std::size_t i = 0; i < std::size(files); ++i) identical += slurp(dir / "run" / files[i]) == first[i];

  // Round-trip of a multi-asset, multi-period policy in both sigma modes.
  RunConfig c;
  c.investable = {"BOND", "US_EQ"};
  c.horizon = 3;
  c.paths = 1500;
  bool exact = true;
  std::size_t compared = 0;
  for (RegressionMode mode : {RegressionMode::TwoStageConstSigma, RegressionMode::TwoStageStateSigma,
                              RegressionMode::ClassicalDirect}) {
    c.mode = mode;
    const MarketSetup m = prepare_market(c, false);
    const Experiment e = make_experiment(c, m);
    const Policy p = backward_induction(m.scenarios, e.grid, e.objective, e.basis, e.cost, e.options);
    save_policy(p, dir / "policy.json");
    const Policy back = load_policy(dir / "policy.json");
    exact = exact && policy_to_json(back) == policy_to_json(p) && back.v0 == p.v0;
    for (std::size_t n = 0; n < p.horizon; ++n)
      for (std::size_t i = 0; i < 200; ++i)
        for (std::size_t j = 0; j < p.grid.size(); ++j) {
          const double w = 0.9 + 0.001 * static_cast<double>(i);
          exact = exact && p.continuation(n, j, m.scenarios.state(i, n), w) ==
                               back.continuation(n, j, m.scenarios.state(i, n), w);
          ++compared;
        }
  }
  return {identical == static_cast<int>(std::size(files)) && exact,
          fmt("%d/%zu CLI outputs byte-identical across reruns; %zu continuation values after policy reload %s",
              identical, std::size(files), compared, exact ? "bit-exact" : "DIFFER")};
}

Verdict criterion11() {
  RunConfig c;
  c.paths = 2000;
  c.horizon = 2;
  const MarketSetup m = prepare_market(c, false);
  const ScenarioSet& s = m.scenarios;
  BasisSpec spec;
  spec.degree = 2;
  for (std::size_t i = 0; i < s.series; ++i) spec.predictor_subset.push_back(i);
  const PolynomialBasis basis(spec);

  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(s.paths), static_cast<Eigen::Index>(basis.size()));
  Eigen::VectorXd y(x.rows());
  std::vector<double> wealth(s.paths);
  for (std::size_t i = 0; i < s.paths; ++i) {
    const double w = wealth[i] = std::exp(0.05 * normal(gen));
    const auto row = build_basis(s.state(i, 1), w, spec);
    for (std::size_t k = 0; k < row.size(); ++k) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
    y(static_cast<Eigen::Index>(i)) = w * (s.rf_gross + 0.5 * s.excess(i, 1)[1]) + 0.01 * normal(gen);
  }
  const OlsFit fit = fit_ols(x, y);
  const Eigen::VectorXd want = oracle::normal_equations(x, y);
  const double ols = (fit.beta - want).cwiseAbs().maxCoeff() / std::max(1.0, want.cwiseAbs().maxCoeff());

  // Log-sigma likelihood over the degree-1 basis of the same state.
  BasisSpec lin = spec;
  lin.degree = 1;
  const PolynomialBasis lin_basis(lin);
  Eigen::MatrixXd xs(x.rows(), static_cast<Eigen::Index>(lin_basis.size()));
  for (std::size_t i = 0; i < s.paths; ++i) {
    const auto row = build_basis(s.state(i, 1), wealth[i], lin);
    for (std::size_t k = 0; k < row.size(); ++k) xs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
  }
  double grad = 0.0;
  for (double shift : {0.0, 0.3, -0.2}) {
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(xs.cols());
    eta(0) = std::log(fit.sigma) + shift;
    for (Eigen::Index k = 1; k < eta.size(); ++k) eta(k) = 0.5 * shift * (k % 2 ? 1.0 : -1.0);
    const Eigen::VectorXd an = log_sigma_gradient(xs, fit.residuals, eta);
    Eigen::VectorXd fd(eta.size());
    for (Eigen::Index k = 0; k < eta.size(); ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(eta(k)));
      Eigen::VectorXd up = eta, dn = eta;
      up(k) += h;
      dn(k) -= h;
      fd(k) = (log_sigma_likelihood(xs, fit.residuals, up) - log_sigma_likelihood(xs, fit.residuals, dn)) / (2 * h);
    }
    grad = std::max(grad, (an - fd).norm() / fd.norm());
  }

  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(x.rows(), 1);
  const double closed = std::log(std::sqrt(fit.residuals.squaredNorm() / static_cast<double>(x.rows())));
  const MleFit mle = fit_log_sigma_mle(ones, fit.residuals, Eigen::VectorXd::Constant(1, closed + 0.5));
  const double constant = std::abs(mle.eta(0) - closed);

  return {ols <= 1e-9 && grad <= 1e-5 && constant <= 1e-8,
          fmt("OLS vs extended-precision normal equations %.3e (tol 1e-9, K=%zu, M=%zu); gradient vs finite "
              "difference %.3e (tol 1e-5); constant-basis MLE %.3e (tol 1e-8)",
              ols, basis.size(), s.paths, grad, constant)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                       criterion5, criterion6, criterion7, criterion8,
                                                       criterion9, criterion10, criterion11};
  std::vector<int> which;
  if (argc > 1) {
    for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  } else {
    for (int i = 1; i <= 11; ++i) which.push_back(i);
  }
  int failed = 0;
  for (int n : which) {
    if (n < 1 || n > 11) {
      std::cerr << "usage: acceptance [1-11]...\n";
      return 2;
    }
    Verdict v{false, ""};
    try {
      v = criteria[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << " " << v.detail << std::endl;
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
