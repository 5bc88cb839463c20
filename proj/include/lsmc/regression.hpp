#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lsmc/error.hpp"

namespace lsmc {

enum class RegressionMode { TwoStageConstSigma, TwoStageStateSigma, ClassicalDirect };

std::string to_string(RegressionMode mode);
RegressionMode regression_mode_from_string(const std::string& name);

// Polynomial basis over the variables [z[predictor_subset]..., benchmark?, w?]
// in graded lexicographic order: constant first, then by total degree, and
// within a degree by descending exponent vector.
struct BasisSpec {
  int degree = 2;
  bool include_wealth = true;
  std::vector<std::size_t> predictor_subset;
  bool cross_terms = true;
  // Relative objectives carry the benchmark level as an extra state variable.
  bool include_benchmark = false;

  std::size_t variable_count() const;
  std::size_t feature_count() const;
  bool operator==(const BasisSpec&) const = default;
};

class PolynomialBasis {
 public:
  explicit PolynomialBasis(BasisSpec spec);

  const BasisSpec& spec() const { return spec_; }
  std::size_t size() const { return exponents_.size(); }
  std::size_t variable_count() const { return nvars_; }
  const std::vector<std::vector<int>>& exponents() const { return exponents_; }

  // Pack state into the variable vector; throws DataError if z is too short.
  void gather(std::span<const double> z, double w, double b, std::span<double> vars) const;
  void evaluate(std::span<const double> vars, std::span<double> out) const;

  // Highest power of wealth in the basis (0 without wealth).
  int wealth_degree() const { return wealth_degree_; }
  // Power of wealth in feature k.
  int wealth_power(std::size_t k) const { return wealth_power_[k]; }
  // Feature values with wealth set to 1 (wealth is the last variable).
  void evaluate_exogenous(std::span<const double> vars, std::span<double> out) const;

 private:
  BasisSpec spec_;
  std::size_t nvars_;
  std::vector<std::vector<int>> exponents_;
  std::vector<int> wealth_power_;
  int wealth_degree_ = 0;
};

std::vector<double> build_basis(std::span<const double> z, double w, const BasisSpec& spec,
                                double benchmark = 0.0);

struct OlsFit {
  Eigen::VectorXd beta;
  double sigma = 0.0;  // sqrt(SSR / (M - K)) with K the full column count
  Eigen::VectorXd residuals;
  bool rank_deficient = false;
  std::vector<Eigen::Index> dropped;  // columns whose coefficient was fixed at 0
};

// Least squares on a fixed design matrix. The factorization is reused for
// every right-hand side, which is how the solver fits all actions at a date.
class OlsSolver {
 public:
  explicit OlsSolver(const Eigen::MatrixXd& features, double rank_tol = 1e-10);

  OlsFit fit(const Eigen::VectorXd& targets) const;

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  bool rank_deficient() const { return !dropped_.empty(); }
  const std::vector<Eigen::Index>& dropped() const { return dropped_; }

 private:
  Eigen::Index rows_, cols_;
  Eigen::Index intercept_ = -1;
  double intercept_value_ = 1.0;
  std::vector<Eigen::Index> kept_;
  std::vector<Eigen::Index> dropped_;
  Eigen::VectorXd center_, scale_;  // per kept column
  Eigen::MatrixXd standardized_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
};

OlsFit fit_ols(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets);

// Payoff regression of the classical method.
Eigen::VectorXd fit_classical_direct(const Eigen::MatrixXd& features, const Eigen::VectorXd& payoffs);

// sum_m { -psi_m.eta - e_m^2 / 2 * exp(-2 psi_m.eta) }
double log_sigma_likelihood(const Eigen::MatrixXd& features, const Eigen::VectorXd& residuals,
                            const Eigen::VectorXd& eta);
Eigen::VectorXd log_sigma_gradient(const Eigen::MatrixXd& features, const Eigen::VectorXd& residuals,
                                   const Eigen::VectorXd& eta);

struct MleOptions {
  int max_iterations = 200;
  double gradient_tol = 1e-6;
  double armijo = 1e-4;
};

struct MleFit {
  Eigen::VectorXd eta;
  double gradient_norm;
  int iterations;
};

class MleError : public ConvergenceError {
 public:
  MleError(const std::string& what, Eigen::VectorXd last_eta, double gradient_norm)
      : ConvergenceError(what), last_eta(std::move(last_eta)), gradient_norm(gradient_norm) {}
  Eigen::VectorXd last_eta;
  double gradient_norm;
};

// BFGS maximization of log_sigma_likelihood. Columns are standardized
// internally; the returned eta is in the original coordinates and the
// gradient test is applied there.
MleFit fit_log_sigma_mle(const Eigen::MatrixXd& features, const Eigen::VectorXd& residuals,
                         const Eigen::VectorXd& init_eta, const MleOptions& options = {});

struct FittedContinuation {
  RegressionMode mode = RegressionMode::TwoStageConstSigma;
  std::size_t time_index = 0;
  std::size_t action_index = 0;
  Eigen::VectorXd beta;     // mean (two-stage) or payoff (classical) coefficients
  double sigma_const = 0;   // constant-sigma mode
  Eigen::VectorXd eta;      // state-sigma mode, over the degree-1 basis
  double utility_coef = 0;  // classical CRRA: coefficient of u(w)
  bool rank_deficient = false;
};

}  // namespace lsmc
