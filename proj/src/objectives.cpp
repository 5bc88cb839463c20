#include "lsmc/objectives.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <vector>

#include "lsmc/error.hpp"
#include "lsmc/specfun.hpp"

namespace lsmc {

namespace {

std::atomic<std::uint64_t> g_crra_fallbacks{0};

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// log Phi(x), accurate deep in the lower tail.
double log_normal_cdf(double x) {
  if (x > -30.0) return std::log(specfun::std_normal_cdf(x));
  const double r = 1.0 / (x * x);
  const double series = 1.0 - r * (1.0 - r * (3.0 - r * (15.0 - r * 105.0)));
  return -0.5 * x * x - std::log(-x) - kLogSqrt2Pi + std::log(series);
}

double log_add(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
constexpr double kXk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
};

template <class F>
Panel kronrod(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * kWk[7];
  double g = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    const double s = f(c - h * kXk[i]) + f(c + h * kXk[i]);
    k += kWk[i] * s;
    if (i % 2 == 1) g += kWg[i / 2] * s;
  }
  return {a, b, k * h, std::fabs((k - g) * h)};
}

// Globally adaptive Gauss-Kronrod over consecutive breakpoints.
template <class F>
double integrate(const F& f, const std::vector<double>& points, double rel_tol) {
  std::vector<Panel> panels;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i + 1] > points[i]) panels.push_back(kronrod(f, points[i], points[i + 1]));
  }
  auto by_error = [](const Panel& x, const Panel& y) { return x.error < y.error; };
  for (int iter = 0; iter < 2000; ++iter) {
    double total = 0, err = 0;
    for (const Panel& p : panels) {
      total += p.value;
      err += p.error;
    }
    if (err <= rel_tol * std::fabs(total) || err < 1e-300) return total;
    auto worst = std::max_element(panels.begin(), panels.end(), by_error);
    const Panel p = *worst;
    *worst = kronrod(f, p.a, 0.5 * (p.a + p.b));
    panels.push_back(kronrod(f, 0.5 * (p.a + p.b), p.b));
  }
  throw ConvergenceError("floored_gaussian_power: quadrature did not converge");
}

bool closed_form_applies(const GaussianForecast& f) { return f.mu > 0 && f.mu >= 5.0 * f.sigma; }

}  // namespace

std::string to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::Strs: return "strs";
    case ObjectiveKind::Ftrs: return "ftrs";
    case ObjectiveKind::RelativeStrs: return "relative_strs";
    case ObjectiveKind::RelativeFtrs: return "relative_ftrs";
    case ObjectiveKind::Crra: return "crra";
  }
  return "unknown";
}

ObjectiveKind objective_kind_from_string(const std::string& name) {
  for (ObjectiveKind k : {ObjectiveKind::Strs, ObjectiveKind::Ftrs, ObjectiveKind::RelativeStrs,
                          ObjectiveKind::RelativeFtrs, ObjectiveKind::Crra}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown objective kind '" + name + "'");
}

void TargetRange::validate() const {
  if (kind == ObjectiveKind::Crra) throw ConfigError("target range cannot have kind crra");
  if (!std::isfinite(lower) || std::isnan(upper) || upper == -INFINITY) {
    throw ConfigError("target range bounds must be finite (upper may be +inf)");
  }
  if (!(lower < upper)) {
    throw ConfigError("target range needs lower < upper, got [" + std::to_string(lower) + ", " +
                      std::to_string(upper) + "]");
  }
}

void CrraParams::validate() const {
  if (!(gamma > 0 && gamma <= 100) || gamma == 1) {
    throw ConfigError("crra gamma must lie in (0, 100] and differ from 1, got " +
                      std::to_string(gamma));
  }
}

void Objective::validate() const {
  if (kind == ObjectiveKind::Crra) {
    crra.validate();
    return;
  }
  if (range.kind != kind) throw ConfigError("objective kind and range kind disagree");
  range.validate();
  if (is_relative(kind) && benchmark.empty()) {
    throw ConfigError("relative objectives need a benchmark");
  }
}

double strs_payoff(double w, const TargetRange& range) {
  return (range.lower <= w && w <= range.upper) ? w - range.lower : 0.0;
}

double ftrs_payoff(double w, const TargetRange& range) {
  return (range.lower <= w && w <= range.upper) ? 1.0 : 0.0;
}

double relative_payoff(double w, double b, const TargetRange& range) {
  return has_strs_shape(range.kind) ? strs_payoff(w - b, range) : ftrs_payoff(w - b, range);
}

double crra_utility(double w, const CrraParams& p) {
  const double e = 1.0 - p.gamma;
  return std::pow(std::max(w, kWealthFloor), e) / e;
}

double strs_continuation(const GaussianForecast& f, const TargetRange& range) {
  const double l = (range.lower - f.mu) / f.sigma;
  const auto lo = specfun::std_normal_cdf_pdf(l);
  double cdf_u = 1.0, pdf_u = 0.0;
  if (range.has_finite_upper()) {
    const auto hi = specfun::std_normal_cdf_pdf((range.upper - f.mu) / f.sigma);
    cdf_u = hi.cdf;
    pdf_u = hi.pdf;
  }
  return (f.mu - range.lower) * (cdf_u - lo.cdf) - f.sigma * (pdf_u - lo.pdf);
}

double ftrs_continuation(const GaussianForecast& f, const TargetRange& range) {
  const double cdf_l = specfun::std_normal_cdf((range.lower - f.mu) / f.sigma);
  const double cdf_u =
      range.has_finite_upper() ? specfun::std_normal_cdf((range.upper - f.mu) / f.sigma) : 1.0;
  return std::max(0.0, cdf_u - cdf_l);
}

double floored_gaussian_power(double p, double mu, double sigma, double floor) {
  if (!(sigma > 0) || !(floor > 0)) throw DomainError("floored_gaussian_power: need sigma, floor > 0");
  const double log_floor = std::log(floor);
  // Mass below the floor contributes floor^p Phi((floor - mu) / sigma).
  double log_total = p * log_floor + log_normal_cdf((floor - mu) / sigma);

  const double top = mu + 40.0 * sigma;
  if (top > floor) {
    // Integrate over s = log x: x^(p+1) times the normal density.
    const double inv2s2 = 0.5 / (sigma * sigma);
    auto h = [&](double s) {
      const double x = std::exp(s);
      return (p + 1.0) * s - (x - mu) * (x - mu) * inv2s2 - std::log(sigma) - kLogSqrt2Pi;
    };
    const double s_lo = log_floor, s_hi = std::log(top);
    std::vector<double> pts{s_lo, s_hi};
    // Stationary points of h solve x^2 - mu x - (p+1) sigma^2 = 0.
    const double disc = mu * mu + 4.0 * (p + 1.0) * sigma * sigma;
    if (disc >= 0) {
      for (double x : {0.5 * (mu - std::sqrt(disc)), 0.5 * (mu + std::sqrt(disc))}) {
        if (x > floor && x < top) pts.push_back(std::log(x));
      }
    }
    for (int k = -8; k <= 8; ++k) {
      const double x = mu + k * sigma;
      if (x > floor && x < top) pts.push_back(std::log(x));
    }
    // Geometric breakpoints resolve the x^p growth close to the floor.
    for (double x = 2.0 * floor; x < std::min(top, mu); x *= 8.0) pts.push_back(std::log(x));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    double h_max = -INFINITY;
    for (double s : pts) h_max = std::max(h_max, h(s));
    const double scaled = integrate([&](double s) { return std::exp(h(s) - h_max); }, pts, 1e-12);
    if (scaled > 0) log_total = log_add(log_total, h_max + std::log(scaled));
  }
  return std::exp(log_total);
}

double crra_continuation(const GaussianForecast& f, const CrraParams& p) {
  const double e = 1.0 - p.gamma;
  if (closed_form_applies(f)) {
    if (const auto m = specfun::try_gaussian_real_moment({e, f.mu, f.sigma})) return *m / e;
  }
  g_crra_fallbacks.fetch_add(1, std::memory_order_relaxed);
  return floored_gaussian_power(e, f.mu, f.sigma, kWealthFloor) / e;
}

std::uint64_t crra_fallback_count() { return g_crra_fallbacks.load(std::memory_order_relaxed); }
void reset_crra_fallback_count() { g_crra_fallbacks.store(0, std::memory_order_relaxed); }

double payoff(const Objective& obj, double w, double b) {
  switch (obj.kind) {
    case ObjectiveKind::Strs: return strs_payoff(w, obj.range);
    case ObjectiveKind::Ftrs: return ftrs_payoff(w, obj.range);
    case ObjectiveKind::RelativeStrs:
    case ObjectiveKind::RelativeFtrs: return relative_payoff(w, b, obj.range);
    case ObjectiveKind::Crra: return crra_utility(w, obj.crra);
  }
  return 0.0;
}

double continuation_value(const Objective& obj, const GaussianForecast& f) {
  switch (obj.kind) {
    case ObjectiveKind::Strs:
    case ObjectiveKind::RelativeStrs: return strs_continuation(f, obj.range);
    case ObjectiveKind::Ftrs:
    case ObjectiveKind::RelativeFtrs: return ftrs_continuation(f, obj.range);
    case ObjectiveKind::Crra: return crra_continuation(f, obj.crra);
  }
  return 0.0;
}

}  // namespace lsmc
