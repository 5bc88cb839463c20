#pragma once

#include <complex>
#include <optional>

namespace lsmc::specfun {

struct MomentQuery {
  double exponent;  // p
  double mu;
  double sigma;  // > 0
};

double std_normal_pdf(double x) noexcept;
double std_normal_cdf(double x) noexcept;

// Phi(x) and phi(x) from one exponential; the continuation values need both.
struct NormalPair {
  double cdf;
  double pdf;
};
NormalPair std_normal_cdf_pdf(double x) noexcept;

// Throws DomainError for z <= 0.
double ln_gamma(double z);

// z (z+1) ... (z+n-1); valid for any real z.
double rising_factorial(double z, unsigned n) noexcept;

// Confluent hypergeometric 1F1(a; b; z) for |z| <= 30.
// DomainError when b is a nonpositive integer, ConvergenceError outside the
// series range or when the estimated relative error exceeds 1e-10.
double kummer_1f1(double a, double b, double z);

// Tricomi U(a, b, z). The value is complex for z < 0 (principal branch of
// z^(1-b)); for z >= 0 the imaginary part is zero.
std::complex<double> tricomi_psi(double a, double b, double z);

// E[X^p] for X ~ N(mu, sigma^2) via the Tricomi representation. For
// non-integer p and mu < 0 this is the real part of the principal-branch
// value; for mu > 0 it agrees with the absolute moment up to the negative
// tail mass.
double gaussian_real_moment(const MomentQuery& q);
// Same value, or nullopt where gaussian_real_moment would raise ConvergenceError.
std::optional<double> try_gaussian_real_moment(const MomentQuery& q);

}  // namespace lsmc::specfun
