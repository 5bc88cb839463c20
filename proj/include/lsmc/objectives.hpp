#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace lsmc {

enum class ObjectiveKind { Strs, Ftrs, RelativeStrs, RelativeFtrs, Crra };

std::string to_string(ObjectiveKind kind);
ObjectiveKind objective_kind_from_string(const std::string& name);

inline bool is_relative(ObjectiveKind k) {
  return k == ObjectiveKind::RelativeStrs || k == ObjectiveKind::RelativeFtrs;
}
inline bool is_target_range(ObjectiveKind k) { return k != ObjectiveKind::Crra; }
inline bool has_strs_shape(ObjectiveKind k) {
  return k == ObjectiveKind::Strs || k == ObjectiveKind::RelativeStrs;
}

// Payoff band. Bounds are wealth multiples of W0 = 1, or excess-wealth bounds
// for the relative kinds. upper may be +inf.
struct TargetRange {
  double lower = 1.0;
  double upper = 1.1;
  ObjectiveKind kind = ObjectiveKind::Strs;

  bool has_finite_upper() const { return std::isfinite(upper); }
  // Throws ConfigError unless lower < upper and kind is a range kind.
  void validate() const;
};

struct CrraParams {
  double gamma = 5.0;
  // Throws ConfigError unless gamma is in (0, 100] and != 1.
  void validate() const;
};

struct GaussianForecast {
  double mu;
  double sigma;  // > 0
};

// Objective descriptor shared by solver, evaluator and policy files.
struct Objective {
  ObjectiveKind kind = ObjectiveKind::Strs;
  TargetRange range;  // ignored for CRRA
  CrraParams crra;    // ignored for range kinds
  // Relative kinds only: a series name, or "equal_weight" for the equally
  // weighted investable portfolio.
  std::string benchmark = "equal_weight";

  void validate() const;
};

constexpr double kWealthFloor = 1e-6;

double strs_payoff(double w, const TargetRange& range);
double ftrs_payoff(double w, const TargetRange& range);
double relative_payoff(double w, double b, const TargetRange& range);
// Utility of max(w, kWealthFloor). Any finite gamma != 1 is accepted here;
// the (0, 100] restriction is a configuration rule.
double crra_utility(double w, const CrraParams& p);

double strs_continuation(const GaussianForecast& f, const TargetRange& range);
double ftrs_continuation(const GaussianForecast& f, const TargetRange& range);
// Tricomi closed form when mu > 0 and mu/sigma >= 5; floored quadrature
// otherwise (and whenever the closed form fails to converge).
double crra_continuation(const GaussianForecast& f, const CrraParams& p);

// E[max(X, floor)^p] for X ~ N(mu, sigma^2) by adaptive quadrature.
double floored_gaussian_power(double p, double mu, double sigma, double floor = kWealthFloor);

// Number of crra_continuation calls served by the quadrature fallback since
// the last reset. Process-wide.
std::uint64_t crra_fallback_count();
void reset_crra_fallback_count();

// Payoff of terminal wealth w (benchmark b for relative kinds).
double payoff(const Objective& obj, double w, double b = 0.0);
// Gaussian expectation of the payoff; for relative kinds f describes W - B.
double continuation_value(const Objective& obj, const GaussianForecast& f);

}  // namespace lsmc
