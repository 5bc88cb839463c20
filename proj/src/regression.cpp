#include "lsmc/regression.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace lsmc {

namespace {

void enumerate_graded_lex(std::size_t nvars, int total, std::vector<int>& current, std::size_t pos,
                          std::vector<std::vector<int>>& out) {
  if (pos + 1 == nvars) {
    current[pos] = total;
    out.push_back(current);
    return;
  }
  for (int e = total; e >= 0; --e) {
    current[pos] = e;
    enumerate_graded_lex(nvars, total - e, current, pos + 1, out);
  }
  current[pos] = 0;
}

// Column treatment shared by OLS and the likelihood fit: an all-constant
// nonzero column is the intercept and stays as is; other constant columns
// are dropped; the rest are centred (only when an intercept exists, so the
// column space is unchanged) and scaled.
struct ColumnScaling {
  Eigen::Index intercept = -1;
  double intercept_value = 1.0;
  std::vector<Eigen::Index> kept;
  std::vector<Eigen::Index> constant_dropped;
  Eigen::VectorXd center, scale;  // aligned with kept; intercept has (0, 1)
};

ColumnScaling scale_columns(const Eigen::MatrixXd& x) {
  ColumnScaling s;
  const Eigen::Index n = x.rows();
  std::vector<double> centers, scales;
  std::vector<bool> is_constant(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double lo = x.col(j).minCoeff(), hi = x.col(j).maxCoeff();
    is_constant[j] = (hi - lo) <= 1e-13 * std::max(std::fabs(lo), std::fabs(hi));
    if (is_constant[j] && s.intercept < 0 && hi != 0.0) {
      s.intercept = j;
      s.intercept_value = x(0, j);
    }
  }
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (j == s.intercept) {
      s.kept.push_back(j);
      centers.push_back(0.0);
      scales.push_back(1.0);
      continue;
    }
    if (is_constant[j] && (s.intercept >= 0 || x.col(j).cwiseAbs().maxCoeff() == 0.0)) {
      s.constant_dropped.push_back(j);
      continue;
    }
    const double mean = s.intercept >= 0 ? x.col(j).mean() : 0.0;
    const double spread = std::sqrt((x.col(j).array() - mean).square().sum() / static_cast<double>(n));
    s.kept.push_back(j);
    centers.push_back(mean);
    scales.push_back(spread);
  }
  s.center = Eigen::Map<Eigen::VectorXd>(centers.data(), static_cast<Eigen::Index>(centers.size()));
  s.scale = Eigen::Map<Eigen::VectorXd>(scales.data(), static_cast<Eigen::Index>(scales.size()));
  return s;
}

Eigen::MatrixXd apply_scaling(const Eigen::MatrixXd& x, const ColumnScaling& s) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(s.kept.size()));
  for (std::size_t k = 0; k < s.kept.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    out.col(kk) = (x.col(s.kept[k]).array() - s.center(kk)) / s.scale(kk);
  }
  return out;
}

// Coefficients on the scaled columns -> coefficients on the original ones.
Eigen::VectorXd unscale(const Eigen::VectorXd& theta, const ColumnScaling& s, Eigen::Index cols) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(cols);
  double shift = 0.0;
  for (std::size_t k = 0; k < s.kept.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    if (s.kept[k] == s.intercept) continue;
    beta(s.kept[k]) = theta(kk) / s.scale(kk);
    shift += theta(kk) * s.center(kk) / s.scale(kk);
  }
  for (std::size_t k = 0; k < s.kept.size(); ++k) {
    if (s.kept[k] == s.intercept) {
      beta(s.intercept) = (theta(static_cast<Eigen::Index>(k)) - shift) / s.intercept_value;
    }
  }
  return beta;
}

Eigen::VectorXd rescale(const Eigen::VectorXd& beta, const ColumnScaling& s) {
  Eigen::VectorXd theta(static_cast<Eigen::Index>(s.kept.size()));
  double shift = 0.0;
  for (std::size_t k = 0; k < s.kept.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    if (s.kept[k] == s.intercept) continue;
    theta(kk) = beta(s.kept[k]) * s.scale(kk);
    shift += beta(s.kept[k]) * s.center(kk);
  }
  for (std::size_t k = 0; k < s.kept.size(); ++k) {
    if (s.kept[k] == s.intercept) {
      theta(static_cast<Eigen::Index>(k)) = beta(s.intercept) * s.intercept_value + shift;
    }
  }
  return theta;
}

}  // namespace

std::string to_string(RegressionMode mode) {
  switch (mode) {
    case RegressionMode::TwoStageConstSigma: return "two_stage_const";
    case RegressionMode::TwoStageStateSigma: return "two_stage_state";
    case RegressionMode::ClassicalDirect: return "classical";
  }
  return "unknown";
}

RegressionMode regression_mode_from_string(const std::string& name) {
  for (RegressionMode m : {RegressionMode::TwoStageConstSigma, RegressionMode::TwoStageStateSigma,
                           RegressionMode::ClassicalDirect}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown regression mode '" + name + "'");
}

std::size_t BasisSpec::variable_count() const {
  return predictor_subset.size() + (include_benchmark ? 1 : 0) + (include_wealth ? 1 : 0);
}

std::size_t BasisSpec::feature_count() const { return PolynomialBasis(*this).size(); }

PolynomialBasis::PolynomialBasis(BasisSpec spec) : spec_(std::move(spec)) {
  if (spec_.degree < 0) throw ConfigError("basis degree must be nonnegative");
  nvars_ = spec_.variable_count();
  if (nvars_ == 0) {
    exponents_.push_back({});
  } else {
    std::vector<int> current(nvars_, 0);
    for (int t = 0; t <= spec_.degree; ++t) {
      if (spec_.cross_terms || t == 0) {
        enumerate_graded_lex(nvars_, t, current, 0, exponents_);
      } else {
        for (std::size_t v = 0; v < nvars_; ++v) {
          std::vector<int> e(nvars_, 0);
          e[v] = t;
          exponents_.push_back(e);
        }
      }
    }
  }
  wealth_power_.resize(exponents_.size(), 0);
  if (spec_.include_wealth) {
    for (std::size_t k = 0; k < exponents_.size(); ++k) {
      wealth_power_[k] = exponents_[k][nvars_ - 1];
      wealth_degree_ = std::max(wealth_degree_, wealth_power_[k]);
    }
  }
}

void PolynomialBasis::gather(std::span<const double> z, double w, double b,
                             std::span<double> vars) const {
  std::size_t v = 0;
  for (std::size_t idx : spec_.predictor_subset) {
    if (idx >= z.size()) {
      throw DataError("basis: predictor index " + std::to_string(idx) +
                      " out of range for state of size " + std::to_string(z.size()));
    }
    vars[v++] = z[idx];
  }
  if (spec_.include_benchmark) vars[v++] = b;
  if (spec_.include_wealth) vars[v++] = w;
}

void PolynomialBasis::evaluate(std::span<const double> vars, std::span<double> out) const {
  for (std::size_t k = 0; k < exponents_.size(); ++k) {
    double value = 1.0;
    for (std::size_t v = 0; v < nvars_; ++v) {
      for (int e = 0; e < exponents_[k][v]; ++e) value *= vars[v];
    }
    out[k] = value;
  }
}

void PolynomialBasis::evaluate_exogenous(std::span<const double> vars, std::span<double> out) const {
  const std::size_t exo = spec_.include_wealth ? nvars_ - 1 : nvars_;
  for (std::size_t k = 0; k < exponents_.size(); ++k) {
    double value = 1.0;
    for (std::size_t v = 0; v < exo; ++v) {
      for (int e = 0; e < exponents_[k][v]; ++e) value *= vars[v];
    }
    out[k] = value;
  }
}

std::vector<double> build_basis(std::span<const double> z, double w, const BasisSpec& spec,
                                double benchmark) {
  const PolynomialBasis basis(spec);
  std::vector<double> vars(basis.variable_count());
  basis.gather(z, w, benchmark, vars);
  std::vector<double> out(basis.size());
  basis.evaluate(vars, out);
  return out;
}

OlsSolver::OlsSolver(const Eigen::MatrixXd& features, double rank_tol)
    : rows_(features.rows()), cols_(features.cols()) {
  if (rows_ <= cols_) {
    throw DomainError("least squares needs more rows than columns (" + std::to_string(rows_) +
                      " <= " + std::to_string(cols_) + ")");
  }
  const ColumnScaling s = scale_columns(features);
  intercept_ = s.intercept;
  intercept_value_ = s.intercept_value;
  kept_ = s.kept;
  dropped_ = s.constant_dropped;
  center_ = s.center;
  scale_ = s.scale;
  standardized_ = apply_scaling(features, s);
  qr_.setThreshold(rank_tol);
  qr_.compute(standardized_);
  const auto perm = qr_.colsPermutation().indices();
  for (Eigen::Index i = qr_.rank(); i < perm.size(); ++i) dropped_.push_back(kept_[perm(i)]);
  std::sort(dropped_.begin(), dropped_.end());
}

OlsFit OlsSolver::fit(const Eigen::VectorXd& targets) const {
  if (targets.size() != rows_) throw DataError("least squares: target length mismatch");
  OlsFit out;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(standardized_.cols());
  if (standardized_.cols() > 0) {
    // Truncate at the thresholded rank; Eigen's solve() would keep every
    // pivot above machine precision.
    const Eigen::Index r = qr_.rank();
    const Eigen::VectorXd qty = qr_.householderQ().adjoint() * targets;
    Eigen::VectorXd t = qr_.matrixR().topLeftCorner(r, r).triangularView<Eigen::Upper>().solve(qty.head(r));
    const auto& perm = qr_.colsPermutation().indices();
    for (Eigen::Index i = 0; i < r; ++i) theta(perm(i)) = t(i);
  }
  out.residuals = targets - standardized_ * theta;
  ColumnScaling s;
  s.intercept = intercept_;
  s.intercept_value = intercept_value_;
  s.kept = kept_;
  s.center = center_;
  s.scale = scale_;
  out.beta = unscale(theta, s, cols_);
  for (Eigen::Index j : dropped_) out.beta(j) = 0.0;
  out.sigma = std::sqrt(out.residuals.squaredNorm() / static_cast<double>(rows_ - cols_));
  out.rank_deficient = !dropped_.empty();
  out.dropped = dropped_;
  return out;
}

OlsFit fit_ols(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets) {
  return OlsSolver(features).fit(targets);
}

Eigen::VectorXd fit_classical_direct(const Eigen::MatrixXd& features, const Eigen::VectorXd& payoffs) {
  return OlsSolver(features).fit(payoffs).beta;
}

double log_sigma_likelihood(const Eigen::MatrixXd& features, const Eigen::VectorXd& residuals,
                            const Eigen::VectorXd& eta) {
  const Eigen::ArrayXd lin = features * eta;
  return (-lin - 0.5 * residuals.array().square() * (-2.0 * lin).exp()).sum();
}

Eigen::VectorXd log_sigma_gradient(const Eigen::MatrixXd& features, const Eigen::VectorXd& residuals,
                                   const Eigen::VectorXd& eta) {
  const Eigen::ArrayXd lin = features * eta;
  const Eigen::VectorXd r = (-1.0 + residuals.array().square() * (-2.0 * lin).exp()).matrix();
  return features.transpose() * r;
}

MleFit fit_log_sigma_mle(const Eigen::MatrixXd& features, const Eigen::VectorXd& residuals,
                         const Eigen::VectorXd& init_eta, const MleOptions& options) {
  const Eigen::Index m = features.rows();
  if (residuals.size() != m || init_eta.size() != features.cols()) {
    throw DataError("log-sigma fit: dimension mismatch");
  }
  if (m <= features.cols()) throw DomainError("log-sigma fit needs more rows than columns");
  if (residuals.cwiseAbs().maxCoeff() == 0.0) {
    throw MleError("log-sigma fit: all residuals are zero, likelihood is unbounded", init_eta, INFINITY);
  }
  const ColumnScaling s = scale_columns(features);
  const Eigen::MatrixXd x = apply_scaling(features, s);
  const Eigen::ArrayXd e2 = residuals.array().square();

  // Work on the negative likelihood in scaled coordinates.
  auto objective = [&](const Eigen::VectorXd& theta) {
    const Eigen::ArrayXd lin = x * theta;
    return (lin + 0.5 * e2 * (-2.0 * lin).exp()).sum();
  };
  auto gradient = [&](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
    const Eigen::ArrayXd lin = x * theta;
    return x.transpose() * (1.0 - e2 * (-2.0 * lin).exp()).matrix();
  };
  auto original = [&](const Eigen::VectorXd& theta) { return unscale(theta, s, features.cols()); };
  auto original_grad_norm = [&](const Eigen::VectorXd& theta) {
    return log_sigma_gradient(features, residuals, original(theta)).norm();
  };

  Eigen::VectorXd theta = rescale(init_eta, s);
  double f = objective(theta);
  Eigen::VectorXd g = gradient(theta);
  const Eigen::Index k = theta.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(k, k) / (2.0 * static_cast<double>(m));
  double gnorm = original_grad_norm(theta);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (gnorm <= options.gradient_tol) return {original(theta), gnorm, iter};
    Eigen::VectorXd dir = -h * g;
    double slope = g.dot(dir);
    if (slope >= 0) {  // lost descent; restart from a scaled identity
      h = Eigen::MatrixXd::Identity(k, k) / (2.0 * static_cast<double>(m));
      dir = -h * g;
      slope = g.dot(dir);
    }
    double step = 1.0;
    Eigen::VectorXd next, g_next;
    double f_next = INFINITY;
    // Once f sits at its rounding floor, Armijo cannot see the decrease;
    // fall back to the approximate Armijo test of Hager and Zhang.
    const double f_noise = 1e-12 * std::fabs(f);
    bool have_gradient = false;
    int halvings = 0;
    for (; halvings < 60; ++halvings) {
      have_gradient = false;
      next = theta + step * dir;
      f_next = objective(next);
      if (std::isfinite(f_next)) {
        if (f_next <= f + options.armijo * step * slope) break;
        if (f_next <= f + f_noise) {
          g_next = gradient(next);
          have_gradient = true;
          if (g_next.dot(dir) <= (2.0 * options.armijo - 1.0) * slope) break;
        }
      }
      step *= 0.5;
    }
    if (halvings == 60) {
      throw MleError("log-sigma fit: line search failed", original(theta), gnorm);
    }
    if (!have_gradient) g_next = gradient(next);
    const Eigen::VectorXd sv = next - theta;
    const Eigen::VectorXd yv = g_next - g;
    const double sy = sv.dot(yv);
    if (sy > 1e-12 * sv.norm() * yv.norm()) {
      if (iter == 0) h = Eigen::MatrixXd::Identity(k, k) * (sy / yv.squaredNorm());
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(k, k) - rho * sv * yv.transpose();
      h = left * h * left.transpose() + rho * sv * sv.transpose();
    }
    theta = next;
    f = f_next;
    g = g_next;
    gnorm = original_grad_norm(theta);
  }
  if (gnorm <= options.gradient_tol) return {original(theta), gnorm, options.max_iterations};
  throw MleError("log-sigma fit: no convergence within " + std::to_string(options.max_iterations) +
                     " iterations (gradient norm " + std::to_string(gnorm) + ")",
                 original(theta), gnorm);
}

}  // namespace lsmc
