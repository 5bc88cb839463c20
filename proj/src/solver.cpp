#include "lsmc/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lsmc/error.hpp"
#include "lsmc/parallel.hpp"
#include "lsmc/rng.hpp"

namespace lsmc {

namespace {

std::atomic<std::uint64_t> g_wealth_clamps{0};

constexpr double kWealthClamp = 1e-12;
constexpr double kSigmaFloor = 1e-12;

void enumerate_lattice(std::size_t d, int remaining, std::vector<int>& current, std::size_t pos,
                       std::vector<std::vector<int>>& out) {
  if (pos == d) {
    out.push_back(current);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    current[pos] = k;
    enumerate_lattice(d, remaining - k, current, pos + 1, out);
  }
  current[pos] = 0;
}

double risky_sum(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x;
  return s;
}

double turnover(std::span<const double> prev, std::span<const double> next) {
  double t = 0.0;
  if (prev.empty()) {
    for (double x : next) t += std::fabs(x);
  } else {
    for (std::size_t i = 0; i < next.size(); ++i) t += std::fabs(next[i] - prev[i]);
  }
  return t;
}

}  // namespace

ControlGrid enumerate_grid(std::size_t d, double mesh) {
  if (d == 0) throw ConfigError("control grid needs at least one asset");
  if (!(mesh > 0) || mesh > 1) throw ConfigError("mesh must lie in (0, 1]");
  const double inv = 1.0 / mesh;
  const int steps = static_cast<int>(std::lround(inv));
  if (std::fabs(steps * mesh - 1.0) > 1e-12) {
    throw ConfigError("mesh " + std::to_string(mesh) + " does not divide 1");
  }
  std::vector<std::vector<int>> lattice;
  std::vector<int> current(d, 0);
  enumerate_lattice(d, steps, current, 0, lattice);
  ControlGrid grid;
  grid.assets = d;
  grid.mesh = mesh;
  for (const auto& k : lattice) {
    std::vector<double> a(d);
    for (std::size_t i = 0; i < d; ++i) a[i] = static_cast<double>(k[i]) / steps;
    grid.actions.push_back(std::move(a));
  }
  return grid;
}

ControlArray randomize_controls(std::size_t m_paths, std::size_t n_periods, std::size_t d, std::uint64_t seed) {
  ControlArray out{m_paths, n_periods, d, std::vector<double>(m_paths * n_periods * d)};
  std::vector<double> e(d + 1);
  for (std::size_t m = 0; m < m_paths; ++m) {
    auto rng = substream(seed, Stream::Controls, m);
    for (std::size_t n = 0; n < n_periods; ++n) {
      // Normalized exponentials: uniform on the simplex with a cash slot.
      double total = 0.0;
      for (double& x : e) {
        x = -std::log(1.0 - uniform01(rng));
        total += x;
      }
      double* a = out.weights.data() + (m * n_periods + n) * d;
      double risky = 0.0;
      std::size_t biggest = 0;
      for (std::size_t i = 0; i < d; ++i) {
        a[i] = e[i] / total;
        risky += a[i];
        if (a[i] > a[biggest]) biggest = i;
      }
      while (risky > 1.0) {  // rounding only
        a[biggest] = std::max(0.0, a[biggest] - (risky - 1.0));
        risky = risky_sum({a, d});
        if (risky > 1.0) a[biggest] = std::nextafter(a[biggest], 0.0);
        risky = risky_sum({a, d});
      }
    }
  }
  return out;
}

double step_wealth(double w, std::span<const double> prev, std::span<const double> next,
                   std::span<const double> excess, double rf, const CostSpec& cost) {
  double growth = rf;
  for (std::size_t i = 0; i < next.size(); ++i) growth += next[i] * excess[i];
  const double fee = cost.proportional_rate == 0.0 ? 0.0 : cost.proportional_rate * turnover(prev, next);
  const double out = w * (1.0 - fee) * growth;
  if (out > 0.0) return out;
  g_wealth_clamps.fetch_add(1, std::memory_order_relaxed);
  return kWealthClamp;
}

std::uint64_t wealth_clamp_count() { return g_wealth_clamps.load(std::memory_order_relaxed); }
void reset_wealth_clamp_count() { g_wealth_clamps.store(0, std::memory_order_relaxed); }

std::vector<double> simulate_endogenous_wealth(const ScenarioSet& s, const ControlArray& controls,
                                               const CostSpec& cost) {
  if (controls.paths != s.paths || controls.periods != s.periods || controls.assets != s.assets) {
    throw DataError("control array shape does not match the scenarios");
  }
  const std::size_t stride = s.periods + 1;
  std::vector<double> w(s.paths * stride);
  for (std::size_t m = 0; m < s.paths; ++m) {
    w[m * stride] = 1.0;
    for (std::size_t n = 0; n < s.periods; ++n) {
      const auto prev = n == 0 ? std::span<const double>{} : controls.at(m, n - 1);
      w[m * stride + n + 1] = step_wealth(w[m * stride + n], prev, controls.at(m, n), s.excess(m, n), s.rf_gross, cost);
    }
  }
  return w;
}

bool stop_profit_check(double w, std::size_t n, const TargetRange& range, double rf, std::size_t horizon) {
  return w >= range.upper * std::pow(rf, -static_cast<double>(horizon - n));
}

BasisSpec sigma_basis_spec(const BasisSpec& mean) {
  BasisSpec s = mean;
  s.degree = 1;
  s.cross_terms = true;
  return s;
}

void Policy::ensure_bases() {
  if (!mean_basis_ || mean_basis_->spec() != basis) {
    mean_basis_ = std::make_shared<const PolynomialBasis>(basis);
    sigma_basis_ = std::make_shared<const PolynomialBasis>(sigma_basis_spec(basis));
  }
}

bool Policy::stop_profit_active() const {
  return stop_profit && (objective.kind == ObjectiveKind::Strs || objective.kind == ObjectiveKind::Ftrs) &&
         objective.range.has_finite_upper();
}

double Policy::lock_threshold(std::size_t n) const {
  return objective.range.upper * std::pow(rf_gross, -static_cast<double>(horizon - n));
}

void Policy::finalize_time(std::size_t n) {
  ensure_bases();
  if (cache_.size() != horizon) cache_.resize(horizon);
  if (thresholds_.size() != horizon) {
    thresholds_.resize(horizon);
    for (std::size_t t = 0; t < horizon; ++t) thresholds_[t] = stop_profit_active() ? lock_threshold(t) : INFINITY;
  }
  const std::size_t j_count = grid.size();
  const std::size_t k = mean_basis_->size();
  const std::size_t ks = sigma_basis_->size();
  if (n >= models.size() || models[n].size() != j_count) {
    throw DataError("policy is missing models at date " + std::to_string(n));
  }
  TimeCache& c = cache_[n];
  c.beta.assign(j_count * k, 0.0);
  c.sigma.assign(j_count, 0.0);
  c.utility.assign(j_count, 0.0);
  c.eta.assign(mode == RegressionMode::TwoStageStateSigma ? j_count * ks : 0, 0.0);
  for (std::size_t j = 0; j < j_count; ++j) {
    const FittedContinuation& f = models[n][j];
    if (static_cast<std::size_t>(f.beta.size()) != k) {
      throw DataError("model (" + std::to_string(n) + ", " + std::to_string(j) + ") has " +
                      std::to_string(f.beta.size()) + " coefficients, basis has " + std::to_string(k));
    }
    std::copy(f.beta.data(), f.beta.data() + k, c.beta.begin() + static_cast<std::ptrdiff_t>(j * k));
    c.sigma[j] = std::max(f.sigma_const, kSigmaFloor);
    c.utility[j] = f.utility_coef;
    if (mode == RegressionMode::TwoStageStateSigma) {
      if (static_cast<std::size_t>(f.eta.size()) != ks) throw DataError("log-sigma coefficients have the wrong size");
      std::copy(f.eta.data(), f.eta.data() + ks, c.eta.begin() + static_cast<std::ptrdiff_t>(j * ks));
    }
  }
}

void Policy::finalize() {
  if (models.size() != horizon) throw DataError("policy has " + std::to_string(models.size()) + " dates, horizon is " + std::to_string(horizon));
  thresholds_.clear();
  for (std::size_t n = 0; n < horizon; ++n) finalize_time(n);
}

void Policy::prepare(std::size_t n, std::span<const double> z, double b, Prepared& out) const {
  const PolynomialBasis& mb = *mean_basis_;
  const std::size_t j_count = grid.size();
  const std::size_t k = mb.size();
  const std::size_t deg = static_cast<std::size_t>(mb.wealth_degree()) + 1;
  out.n = n;
  out.vars.resize(mb.variable_count());
  out.exo.resize(k);
  mb.gather(z, 1.0, b, out.vars);
  mb.evaluate_exogenous(out.vars, out.exo);
  const TimeCache& c = cache_[n];
  out.mean.assign(j_count * deg, 0.0);
  for (std::size_t j = 0; j < j_count; ++j) {
    const double* beta = c.beta.data() + j * k;
    double* dst = out.mean.data() + j * deg;
    for (std::size_t q = 0; q < k; ++q) dst[mb.wealth_power(q)] += beta[q] * out.exo[q];
  }
  if (mode == RegressionMode::TwoStageStateSigma) {
    const PolynomialBasis& sb = *sigma_basis_;
    const std::size_t ks = sb.size();
    out.exo_sigma.resize(ks);
    sb.evaluate_exogenous(out.vars, out.exo_sigma);
    out.log_sigma.assign(j_count * 2, 0.0);
    for (std::size_t j = 0; j < j_count; ++j) {
      const double* eta = c.eta.data() + j * ks;
      for (std::size_t q = 0; q < ks; ++q) out.log_sigma[j * 2 + sb.wealth_power(q)] += eta[q] * out.exo_sigma[q];
    }
  }
}

double Policy::continuation(const Prepared& p, std::size_t j, double w) const {
  const std::size_t deg = static_cast<std::size_t>(mean_basis_->wealth_degree()) + 1;
  const double* coef = p.mean.data() + j * deg;
  double mu = coef[deg - 1];
  for (std::size_t e = deg - 1; e-- > 0;) mu = mu * w + coef[e];
  if (mode == RegressionMode::ClassicalDirect) {
    const double u = cache_[p.n].utility[j];
    return u == 0.0 ? mu : mu + u * crra_utility(w, objective.crra);
  }
  double sigma;
  if (mode == RegressionMode::TwoStageStateSigma) {
    sigma = std::max(std::exp(p.log_sigma[j * 2] + p.log_sigma[j * 2 + 1] * w), kSigmaFloor);
  } else {
    sigma = cache_[p.n].sigma[j];
  }
  return continuation_value(objective, {mu, sigma});
}

std::size_t Policy::best_action(const Prepared& p, double w) const {
  std::size_t best = 0;
  double best_value = -INFINITY;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double v = continuation(p, j, w);
    if (v > best_value) {
      best_value = v;
      best = j;
    }
  }
  return best;
}

double Policy::continuation(std::size_t n, std::size_t j, std::span<const double> z, double w, double b) const {
  Prepared p;
  prepare(n, z, b, p);
  return continuation(p, j, w);
}

ActionChoice Policy::choose(std::size_t n, std::span<const double> z, double w, std::span<const double> prev,
                            double b) const {
  if (stop_profit_active()) {
    const double liquid = w * (1.0 - cost.proportional_rate * turnover(prev, std::vector<double>(grid.assets, 0.0)));
    if (liquid >= thresholds_[n]) return {0, true};
  }
  Prepared p;
  prepare(n, z, b, p);
  return {best_action(p, w), false};
}

void advance_with_policy(const ScenarioSet& s, const Policy& policy, std::size_t m, std::size_t from,
                         std::span<PathState> pipes, const std::vector<double>& benchmark,
                         Policy::Prepared& scratch, double* trace) {
  const std::size_t horizon = s.periods;
  const bool lockable = policy.stop_profit_active();
  const double c = policy.cost.proportional_rate;
  for (std::size_t n = from; n < horizon; ++n) {
    const double b = benchmark.empty() ? 1.0 : benchmark[m * (horizon + 1) + n];
    bool prepared = false;
    const double threshold = lockable ? policy.lock_threshold(n) : INFINITY;
    for (PathState& p : pipes) {
      if (p.locked) continue;
      if (lockable) {
        // Moving everything to cash costs c times the risky weight held.
        const double liquid = p.w * (1.0 - c * risky_sum(policy.grid.actions[p.last]));
        if (liquid >= threshold) {
          p.locked = true;
          p.surplus = liquid - threshold;
          p.lock_time = n;
          continue;
        }
      }
      if (!prepared) {
        policy.prepare(n, s.state(m, n), b, scratch);
        prepared = true;
      }
      const std::size_t l = policy.best_action(scratch, p.w);
      p.w = step_wealth(p.w, policy.grid.actions[p.last], policy.grid.actions[l], s.excess(m, n), s.rf_gross,
                        policy.cost);
      p.last = l;
    }
    if (trace != nullptr && pipes.size() == 1) {
      const PathState& p = pipes[0];
      trace[n + 1] = p.locked ? (policy.lock_threshold(p.lock_time) + p.surplus) *
                                    std::pow(s.rf_gross, static_cast<double>(n + 1 - p.lock_time))
                              : p.w;
    }
  }
}

TerminalOutcome recompute_to_horizon(const ScenarioSet& s, const Policy& policy, std::size_t m, std::size_t n,
                                     std::size_t j, double w_start, std::span<const double> prev_weights,
                                     const std::vector<double>& benchmark) {
  PathState p;
  p.w = step_wealth(w_start, prev_weights, policy.grid.actions[j], s.excess(m, n), s.rf_gross, policy.cost);
  p.last = j;
  Policy::Prepared scratch;
  advance_with_policy(s, policy, m, n + 1, {&p, 1}, benchmark, scratch);
  return {p.locked ? policy.objective.range.upper : p.w, p.surplus, p.locked, p.lock_time};
}

namespace {

std::string at_date(std::size_t n, std::size_t j) {
  return " at (n=" + std::to_string(n) + ", j=" + std::to_string(j) + ")";
}

// Rethrows with the (n, j) location appended, keeping the error category.
[[noreturn]] void rethrow_located(std::size_t n, std::size_t j) {
  try {
    throw;
  } catch (const MleError& e) {
    throw MleError(e.what() + at_date(n, j), e.last_eta, e.gradient_norm);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(e.what() + at_date(n, j));
  } catch (const DomainError& e) {
    throw DomainError(e.what() + at_date(n, j));
  } catch (const DataError& e) {
    throw DataError(e.what() + at_date(n, j));
  }
}

}  // namespace

Policy backward_induction(const ScenarioSet& s, const ControlGrid& grid, const Objective& objective,
                          const BasisSpec& basis_spec, const CostSpec& cost, const SolverOptions& options) {
  objective.validate();
  if (grid.assets != s.assets) throw ConfigError("control grid and scenarios disagree on the asset count");
  if (cost.proportional_rate < 0) throw ConfigError("cost rate must be nonnegative");
  for (std::size_t idx : basis_spec.predictor_subset) {
    if (idx >= s.series) throw ConfigError("basis predictor index out of range");
  }
  const std::size_t big_m = s.paths, big_n = s.periods, j_count = grid.size();

  Policy policy;
  policy.grid = grid;
  policy.objective = objective;
  policy.basis = basis_spec;
  policy.basis.include_benchmark = is_relative(objective.kind);
  policy.mode = options.mode;
  policy.stop_profit = options.stop_profit;
  policy.horizon = big_n;
  policy.rf_gross = s.rf_gross;
  policy.cost = cost;
  policy.models.assign(big_n, std::vector<FittedContinuation>(j_count));

  const PolynomialBasis basis(policy.basis);
  const PolynomialBasis sigma_basis(sigma_basis_spec(policy.basis));
  const bool classical_crra = options.mode == RegressionMode::ClassicalDirect && objective.kind == ObjectiveKind::Crra;
  const std::size_t k = basis.size();
  const std::size_t k_fit = k + (classical_crra ? 1 : 0);
  if (big_m <= k_fit) {
    throw DomainError("need more paths (" + std::to_string(big_m) + ") than basis functions (" +
                      std::to_string(k_fit) + ")");
  }

  const std::vector<double> bench =
      is_relative(objective.kind) ? benchmark_paths(s, objective.benchmark) : std::vector<double>{};
  const ControlArray controls = randomize_controls(big_m, big_n, s.assets, options.control_seed);
  const std::vector<double> wealth = simulate_endogenous_wealth(s, controls, cost);
  const std::size_t stride = big_n + 1;

  std::vector<double> terminal(j_count * big_m);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(big_m), static_cast<Eigen::Index>(k_fit));
  Eigen::MatrixXd xs(static_cast<Eigen::Index>(big_m), static_cast<Eigen::Index>(sigma_basis.size()));

  for (std::size_t n = big_n; n-- > 0;) {
    // Terminal wealth of every (path, action) pipeline started at t_n.
    parallel_for(big_m, options.workers, [&](std::size_t begin, std::size_t end) {
      Policy::Prepared scratch;
      std::vector<PathState> pipes(j_count);
      for (std::size_t m = begin; m < end; ++m) {
        const auto prev = n == 0 ? std::span<const double>{} : controls.at(m, n - 1);
        const double w0 = wealth[m * stride + n];
        for (std::size_t j = 0; j < j_count; ++j) {
          pipes[j] = PathState{};
          pipes[j].w = step_wealth(w0, prev, grid.actions[j], s.excess(m, n), s.rf_gross, cost);
          pipes[j].last = j;
        }
        advance_with_policy(s, policy, m, n + 1, pipes, bench, scratch);
        for (std::size_t j = 0; j < j_count; ++j) {
          terminal[j * big_m + m] = pipes[j].locked ? objective.range.upper : pipes[j].w;
        }
      }
    });

    std::vector<double> vars(basis.variable_count());
    std::vector<double> row(k), row_sigma(sigma_basis.size());
    for (std::size_t m = 0; m < big_m; ++m) {
      const double b = bench.empty() ? 1.0 : bench[m * stride + n];
      const double w = wealth[m * stride + n];
      basis.gather(s.state(m, n), w, b, vars);
      basis.evaluate(vars, row);
      for (std::size_t q = 0; q < k; ++q) x(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(q)) = row[q];
      if (classical_crra) x(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = crra_utility(w, objective.crra);
      if (options.mode == RegressionMode::TwoStageStateSigma) {
        sigma_basis.evaluate(vars, row_sigma);
        for (std::size_t q = 0; q < row_sigma.size(); ++q) {
          xs(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(q)) = row_sigma[q];
        }
      }
    }
    const OlsSolver ols(x);

    parallel_for(j_count, options.workers, [&](std::size_t begin, std::size_t end) {
      Eigen::VectorXd y(static_cast<Eigen::Index>(big_m));
      for (std::size_t j = begin; j < end; ++j) {
        try {
          for (std::size_t m = 0; m < big_m; ++m) {
            const double wt = terminal[j * big_m + m];
            const double bt = bench.empty() ? 0.0 : bench[m * stride + big_n];
            double target;
            if (options.mode == RegressionMode::ClassicalDirect) {
              target = payoff(objective, wt, bt);
            } else {
              target = wt - bt;
            }
            y(static_cast<Eigen::Index>(m)) = target;
          }
          const OlsFit fit = ols.fit(y);
          FittedContinuation& model = policy.models[n][j];
          model.mode = options.mode;
          model.time_index = n;
          model.action_index = j;
          model.beta = fit.beta.head(static_cast<Eigen::Index>(k));
          model.utility_coef = classical_crra ? fit.beta(static_cast<Eigen::Index>(k)) : 0.0;
          model.rank_deficient = fit.rank_deficient;
          if (options.mode != RegressionMode::ClassicalDirect) model.sigma_const = fit.sigma;
          if (options.mode == RegressionMode::TwoStageStateSigma) {
            Eigen::VectorXd init = Eigen::VectorXd::Zero(xs.cols());
            init(0) = std::log(std::max(fit.sigma, kSigmaFloor));
            if (fit.residuals.cwiseAbs().maxCoeff() <= kSigmaFloor) {
              model.eta = init;  // exact fit; nothing to estimate
            } else {
              model.eta = fit_log_sigma_mle(xs, fit.residuals, init).eta;
            }
          }
        } catch (const Error&) {
          rethrow_located(n, j);
        }
      }
    });
    policy.finalize_time(n);
  }

  policy.initial_values.assign(j_count, 0.0);
  for (std::size_t j = 0; j < j_count; ++j) {
    double acc = 0.0;
    for (std::size_t m = 0; m < big_m; ++m) {
      const double bt = bench.empty() ? 0.0 : bench[m * stride + big_n];
      acc += payoff(objective, terminal[j * big_m + m], bt);
    }
    policy.initial_values[j] = acc / static_cast<double>(big_m);
  }
  const ActionChoice first = policy.choose(0, s.state(0, 0), 1.0, {}, 1.0);
  policy.initial_action = first.action;
  policy.v0 = first.locked ? payoff(objective, objective.range.upper) : policy.initial_values[first.action];
  return policy;
}

// ---------------------------------------------------------------------------
// Policy files

namespace {

using nlohmann::json;

constexpr const char* kPolicyFormat = "lsmc-policy";
constexpr int kPolicyVersion = 1;

json encode_double(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double decode_double(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  throw IoError("policy file: expected a number");
}

json encode_vector(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(encode_double(v(i)));
  return a;
}

Eigen::VectorXd decode_vector(const json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = decode_double(a[i]);
  return v;
}

}  // namespace

std::string policy_to_json(const Policy& p) {
  json root;
  root["format"] = kPolicyFormat;
  root["version"] = kPolicyVersion;
  root["provenance"] = p.provenance;
  root["grid"] = {{"assets", p.grid.assets}, {"mesh", p.grid.mesh}, {"actions", p.grid.actions}};
  json obj = {{"kind", to_string(p.objective.kind)},
              {"lower", p.objective.range.lower},
              {"gamma", p.objective.crra.gamma},
              {"benchmark", p.objective.benchmark}};
  obj["upper"] = p.objective.range.has_finite_upper() ? json(p.objective.range.upper) : json(nullptr);
  root["objective"] = obj;
  root["basis"] = {{"degree", p.basis.degree},
                   {"include_wealth", p.basis.include_wealth},
                   {"predictor_subset", p.basis.predictor_subset},
                   {"cross_terms", p.basis.cross_terms},
                   {"include_benchmark", p.basis.include_benchmark}};
  root["mode"] = to_string(p.mode);
  root["stop_profit"] = p.stop_profit;
  root["horizon"] = p.horizon;
  root["rf_gross"] = p.rf_gross;
  root["cost_rate"] = p.cost.proportional_rate;
  root["initial_action"] = p.initial_action;
  root["v0"] = encode_double(p.v0);
  json iv = json::array();
  for (double v : p.initial_values) iv.push_back(encode_double(v));
  root["initial_values"] = iv;
  json models = json::array();
  for (const auto& date : p.models) {
    json row = json::array();
    for (const auto& f : date) {
      json m = {{"beta", encode_vector(f.beta)},
                {"sigma", encode_double(f.sigma_const)},
                {"utility", encode_double(f.utility_coef)},
                {"rank_deficient", f.rank_deficient}};
      if (f.eta.size() > 0) m["eta"] = encode_vector(f.eta);
      row.push_back(m);
    }
    models.push_back(row);
  }
  root["models"] = models;
  return root.dump(1);
}

Policy policy_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("policy file is not valid JSON: ") + e.what());
  }
  try {
    if (root.at("format").get<std::string>() != kPolicyFormat) throw IoError("not a policy file");
    const int version = root.at("version").get<int>();
    if (version != kPolicyVersion) throw IoError("unsupported policy file version " + std::to_string(version));
    Policy p;
    if (root.contains("provenance")) p.provenance = root["provenance"].get<std::string>();
    p.grid.assets = root["grid"].at("assets").get<std::size_t>();
    p.grid.mesh = root["grid"].at("mesh").get<double>();
    p.grid.actions = root["grid"].at("actions").get<std::vector<std::vector<double>>>();
    const json& obj = root.at("objective");
    p.objective.kind = objective_kind_from_string(obj.at("kind").get<std::string>());
    p.objective.range.kind = p.objective.kind == ObjectiveKind::Crra ? ObjectiveKind::Strs : p.objective.kind;
    p.objective.range.lower = obj.at("lower").get<double>();
    p.objective.range.upper = obj.at("upper").is_null() ? INFINITY : obj.at("upper").get<double>();
    p.objective.crra.gamma = obj.at("gamma").get<double>();
    p.objective.benchmark = obj.at("benchmark").get<std::string>();
    const json& b = root.at("basis");
    p.basis.degree = b.at("degree").get<int>();
    p.basis.include_wealth = b.at("include_wealth").get<bool>();
    p.basis.predictor_subset = b.at("predictor_subset").get<std::vector<std::size_t>>();
    p.basis.cross_terms = b.at("cross_terms").get<bool>();
    p.basis.include_benchmark = b.at("include_benchmark").get<bool>();
    p.mode = regression_mode_from_string(root.at("mode").get<std::string>());
    p.stop_profit = root.at("stop_profit").get<bool>();
    p.horizon = root.at("horizon").get<std::size_t>();
    p.rf_gross = root.at("rf_gross").get<double>();
    p.cost.proportional_rate = root.at("cost_rate").get<double>();
    p.initial_action = root.at("initial_action").get<std::size_t>();
    p.v0 = decode_double(root.at("v0"));
    for (const auto& v : root.at("initial_values")) p.initial_values.push_back(decode_double(v));
    const json& models = root.at("models");
    for (std::size_t n = 0; n < models.size(); ++n) {
      std::vector<FittedContinuation> row;
      for (std::size_t j = 0; j < models[n].size(); ++j) {
        const json& m = models[n][j];
        FittedContinuation f;
        f.mode = p.mode;
        f.time_index = n;
        f.action_index = j;
        f.beta = decode_vector(m.at("beta"));
        f.sigma_const = decode_double(m.at("sigma"));
        f.utility_coef = decode_double(m.at("utility"));
        f.rank_deficient = m.at("rank_deficient").get<bool>();
        if (m.contains("eta")) f.eta = decode_vector(m.at("eta"));
        row.push_back(std::move(f));
      }
      p.models.push_back(std::move(row));
    }
    p.finalize();
    return p;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed policy file: ") + e.what());
  }
}

void save_policy(const Policy& policy, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << policy_to_json(policy) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

Policy load_policy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return policy_from_json(ss.str());
}

}  // namespace lsmc
