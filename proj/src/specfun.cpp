#include "lsmc/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <limits>
#include <numbers>
#include <string>

#include "lsmc/error.hpp"

namespace lsmc::specfun {

namespace {

using ld = long double;
using cld = std::complex<long double>;

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
constexpr ld kEpsL = std::numeric_limits<ld>::epsilon();
constexpr double kSeriesRange = 30.0;
constexpr double kKummerTol = 1e-10;
constexpr double kAsymptoticTol = 1e-12;
constexpr int kMaxTerms = 20000;

// Cody's rational approximations for the normal integral, arranged as in
// W. J. Cody, "Rational Chebyshev approximations for the error function"
// (Math. Comp. 1969). Three regions: |x| <= 0.674, <= sqrt(32), beyond.
constexpr double kA[5] = {2.2352520354606839287, 161.02823106855587881, 1067.6894854603709582,
                          18154.981253343561249, 0.065682337918207449113};
constexpr double kB[4] = {47.20258190468824187, 976.09855173777669322, 10260.932208618978205,
                          45507.789335026729956};
constexpr double kC[9] = {0.39894151208813466764, 8.8831497943883759412, 93.506656132177855979,
                          597.27027639480026226,  2494.5375852903726711, 6848.1904505362823326,
                          11602.651437647350124,  9842.7148383839780218, 1.0765576773720192317e-8};
constexpr double kD[8] = {22.266688044328115691, 235.38790178262499861, 1519.377599407554805,
                          6485.558298266760755,  18615.571640885098091, 34900.952721145977266,
                          38912.003286093271411, 19685.429676859990727};
constexpr double kP[6] = {0.21589853405795699,     0.1274011611602473639,  0.022235277870649807,
                          0.001421619193227893466, 2.9112874951168792e-5, 0.02307344176494017303};
constexpr double kQ[5] = {1.28426009614491121, 0.468238212480865118, 0.0659881378689285515,
                          0.00378239633202758244, 7.29751555083966205e-5};

bool is_nonpositive_integer(ld x) { return x <= 0 && x == std::floor(x); }

ld rgamma(ld x) {
  if (is_nonpositive_integer(x)) return 0;
  return 1 / std::tgamma(x);
}

struct Sum {
  ld value;
  ld abs_err;
};

// Direct power series of 1F1 in extended precision.
Sum kummer_series(ld a, ld b, ld z) {
  ld term = 1, sum = 1, biggest = 1;
  int n = 0;
  for (; n < kMaxTerms; ++n) {
    const ld ratio = (a + n) / (b + n) * z / (n + 1);
    term *= ratio;
    sum += term;
    biggest = std::max(biggest, std::fabs(term));
    if (term == 0) break;
    const ld r = std::fabs(ratio);
    if (r < 1 && std::fabs(term) * (1 / (1 - r)) <= kEpsL * std::fabs(sum)) break;
  }
  if (n == kMaxTerms) return {sum, std::numeric_limits<ld>::infinity()};
  return {sum, 8 * kEpsL * biggest};
}

bool acceptable(ld value, ld abs_err, double rel_tol) {
  return abs_err <= rel_tol * std::fabs(value) || abs_err < 1e-17L;
}

// 1F1 choosing between the direct series and Kummer's transformation
// e^z 1F1(b-a; b; -z), whichever cancels less.
Sum kummer_best(ld a, ld b, ld z) {
  Sum direct = kummer_series(a, b, z);
  if (z == 0) return direct;
  Sum flipped = kummer_series(b - a, b, -z);
  const ld scale = std::exp(z);
  flipped.value *= scale;
  flipped.abs_err = flipped.abs_err * scale + kEpsL * std::fabs(flipped.value);
  return flipped.abs_err < direct.abs_err ? flipped : direct;
}

struct CSum {
  cld value;
  ld abs_err;
};

// z^(1-b) on the principal branch (arg z = pi for negative z).
cld principal_pow(ld z, ld e) {
  if (z >= 0) return {std::pow(z, e), 0};
  return std::polar(std::pow(-z, e), std::numbers::pi_v<ld> * e);
}

// U(a, b, z) = G(1-b)/G(a-b+1) M(a, b, z) + G(b-1)/G(a) z^(1-b) M(a-b+1, 2-b, z)
// for non-integer b and |z| within the series range.
CSum psi_two_term(ld a, ld b, ld z) {
  CSum out{0, 0};
  const ld c1 = std::tgamma(1 - b) * rgamma(a - b + 1);
  if (c1 != 0) {
    const Sum m = kummer_best(a, b, z);
    out.value += c1 * m.value;
    out.abs_err += std::fabs(c1) * m.abs_err;
  }
  const ld c2 = std::tgamma(b - 1) * rgamma(a);
  if (c2 != 0) {
    const Sum m = kummer_best(a - b + 1, 2 - b, z);
    const cld zp = principal_pow(z, 1 - b);
    out.value += c2 * zp * m.value;
    out.abs_err += std::fabs(c2) * std::abs(zp) * m.abs_err;
  }
  return out;
}

CSum psi_series(ld a, ld b, ld z) {
  const ld nearest = std::round(b);
  if (std::fabs(b - nearest) < 1e-9L) {
    // Removable singularity in b: average the two sides.
    constexpr ld h = 1e-7L;
    const CSum lo = psi_two_term(a, nearest - h, z);
    const CSum hi = psi_two_term(a, nearest + h, z);
    const cld mid = (lo.value + hi.value) / ld(2);
    // Symmetric average leaves an O(h^2) bias relative to the limit.
    return {mid, (lo.abs_err + hi.abs_err) / 2 + h * h * std::abs(mid)};
  }
  return psi_two_term(a, b, z);
}

// Large-|z| expansion z^(-a) sum (a)_k (a-b+1)_k / k! (-1/z)^k with optimal
// truncation.
CSum psi_asymptotic(ld a, ld b, ld z) {
  const ld c = a - b + 1;
  ld term = 1, sum = 1, biggest = 1;
  ld tail = 0;
  bool converged = false;
  for (int k = 0; k < kMaxTerms; ++k) {
    const ld next = term * (a + k) * (c + k) / (k + 1) * (-1 / z);
    if (next == 0) {
      converged = true;
      break;
    }
    if (std::fabs(next) >= std::fabs(term)) {
      tail = std::fabs(term);
      break;
    }
    term = next;
    sum += term;
    biggest = std::max(biggest, std::fabs(term));
    if (std::fabs(term) <= kEpsL * std::fabs(sum)) {
      converged = true;
      break;
    }
  }
  if (!converged && tail > kAsymptoticTol * std::fabs(sum)) {
    throw ConvergenceError("tricomi_psi: asymptotic expansion does not reach tolerance at a=" +
                           std::to_string(static_cast<double>(a)) +
                           ", z=" + std::to_string(static_cast<double>(z)));
  }
  const cld pref = principal_pow(z, -a);
  const cld value = pref * sum;
  return {value, std::abs(pref) * (tail + 8 * kEpsL * biggest)};
}

// sum_k c_k t^k with c_0 = 1, c_{k+1}/c_k = (p-2k)(p-2k-1)/(2(k+1)); the
// Gaussian moment divided by mu^p when mu^2/(2 sigma^2) is large.
// nullopt when the optimally truncated tail is not below the tolerance.
std::optional<double> moment_asymptotic_sum(double p, double t) {
  // Term ratios dip below 1 only for k near |p|/2 when p^2 t is large, so
  // growth before that minimum is not a stopping signal.
  constexpr double eps = std::numeric_limits<double>::epsilon() / 4;
  double term = 1, sum = 1, prev_ratio = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kMaxTerms; ++k) {
    const double ratio = (p - 2 * k) * (p - 2 * k - 1) * t / (2 * (k + 1));
    if (ratio == 0) return sum;
    if (std::fabs(ratio) >= 1 && std::fabs(ratio) >= prev_ratio) {
      if (std::fabs(term) > kAsymptoticTol * std::fabs(sum)) return std::nullopt;
      return sum;
    }
    prev_ratio = std::fabs(ratio);
    term *= ratio;
    sum += term;
    if (!std::isfinite(sum)) return std::nullopt;
    if (std::fabs(term) <= eps * std::fabs(sum) && std::fabs(ratio) < 1) return sum;
  }
  return std::nullopt;
}

}  // namespace

NormalPair std_normal_cdf_pdf(double x) noexcept {
  const double y = std::fabs(x);
  if (y <= 0.67448975) {
    double num = 0.0, den = 0.0;
    if (y > 1.11e-16) {
      const double xsq = x * x;
      num = kA[4] * xsq;
      den = xsq;
      for (int i = 0; i < 3; ++i) {
        num = (num + kA[i]) * xsq;
        den = (den + kB[i]) * xsq;
      }
    }
    const double temp = x * (num + kA[3]) / (den + kB[3]);
    return {0.5 + temp, kInvSqrt2Pi * std::exp(-0.5 * x * x)};
  }

  double tail_ratio;  // upper tail divided by exp(-y^2/2)
  if (y <= 5.656854249492380195206754896838) {
    double num = kC[8] * y, den = y;
    for (int i = 0; i < 7; ++i) {
      num = (num + kC[i]) * y;
      den = (den + kD[i]) * y;
    }
    tail_ratio = (num + kC[7]) / (den + kD[7]);
  } else if (y < 38.5) {
    const double xsq = 1.0 / (x * x);
    double num = kP[5] * xsq, den = xsq;
    for (int i = 0; i < 4; ++i) {
      num = (num + kP[i]) * xsq;
      den = (den + kQ[i]) * xsq;
    }
    const double temp = xsq * (num + kP[4]) / (den + kQ[4]);
    tail_ratio = (kInvSqrt2Pi - temp) / y;
  } else {
    const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
    return {x > 0 ? 1.0 : 0.0, pdf};
  }
  // exp(-y^2/2) split so the leading part is exact in binary.
  const double ysq = std::trunc(y * 16.0) / 16.0;
  const double del = (y - ysq) * (y + ysq);
  const double gauss = std::exp(-0.5 * ysq * ysq) * std::exp(-0.5 * del);
  const double upper = gauss * tail_ratio;
  return {x > 0 ? 1.0 - upper : upper, kInvSqrt2Pi * gauss};
}

double std_normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_cdf(double x) noexcept { return std_normal_cdf_pdf(x).cdf; }

double ln_gamma(double z) {
  if (!(z > 0)) throw DomainError("ln_gamma: argument must be positive, got " + std::to_string(z));
  return std::lgamma(z);
}

double rising_factorial(double z, unsigned n) noexcept {
  ld acc = 1;
  for (unsigned k = 0; k < n; ++k) acc *= static_cast<ld>(z) + k;
  return static_cast<double>(acc);
}

double kummer_1f1(double a, double b, double z) {
  if (is_nonpositive_integer(b)) {
    throw DomainError("kummer_1f1: b must not be a nonpositive integer, got " + std::to_string(b));
  }
  if (!(std::fabs(z) <= kSeriesRange)) {
    throw ConvergenceError("kummer_1f1: |z| = " + std::to_string(std::fabs(z)) +
                           " is outside the series range");
  }
  const Sum s = kummer_best(a, b, z);
  if (!acceptable(s.value, s.abs_err, kKummerTol)) {
    throw ConvergenceError("kummer_1f1: cancellation too severe at a=" + std::to_string(a) +
                           ", b=" + std::to_string(b) + ", z=" + std::to_string(z));
  }
  return static_cast<double>(s.value);
}

// Psi(-n, b, z) is a polynomial of degree n in z, finite for every b and z.
CSum psi_polynomial(unsigned n, ld b, ld z) {
  ld value = 0, mass = 0, binom = 1, zk = 1;
  for (unsigned k = 0; k <= n; ++k) {
    ld rising = 1;
    for (unsigned i = k; i < n; ++i) rising *= b + i;
    const ld term = ((n + k) % 2 ? -1 : 1) * binom * rising * zk;
    value += term;
    mass += std::fabs(term);
    binom = binom * (n - k) / (k + 1);
    zk *= z;
  }
  return {{value, 0}, 4 * (n + 1) * kEpsL * mass};
}

std::complex<double> tricomi_psi(double a, double b, double z) {
  CSum r;
  if (is_nonpositive_integer(a) && a > -kMaxTerms) {
    r = psi_polynomial(static_cast<unsigned>(-a), b, z);
  } else if (z == 0) {
    if (!(b < 1)) throw DomainError("tricomi_psi: singular at z=0 for b >= 1");
    r = {std::tgamma(1 - static_cast<ld>(b)) * rgamma(static_cast<ld>(a) - b + 1), 0};
  } else if (std::fabs(z) > kSeriesRange) {
    r = psi_asymptotic(a, b, z);
  } else {
    r = psi_series(a, b, z);
  }
  if (!acceptable(std::abs(r.value), r.abs_err, kKummerTol)) {
    throw ConvergenceError("tricomi_psi: tolerance not met at a=" + std::to_string(a) +
                           ", b=" + std::to_string(b) + ", z=" + std::to_string(z));
  }
  return {static_cast<double>(r.value.real()), static_cast<double>(r.value.imag())};
}

std::optional<double> try_gaussian_real_moment(const MomentQuery& q) {
  const double p = q.exponent, mu = q.mu, sigma = q.sigma;
  if (!(sigma > 0) || !std::isfinite(sigma) || !std::isfinite(p) || !std::isfinite(mu)) {
    throw DomainError("gaussian_real_moment: need finite p, mu and sigma > 0");
  }
  const ld z = -static_cast<ld>(mu) * mu / (2 * static_cast<ld>(sigma) * sigma);
  if (-z > kSeriesRange) {
    const double t = (sigma / mu) * (sigma / mu);
    const std::optional<double> sum = moment_asymptotic_sum(p, t);
    if (!sum) return std::nullopt;
    double sign = 1;
    if (mu < 0) sign = (p == std::floor(p)) ? (std::fmod(std::fabs(p), 2.0) == 1.0 ? -1 : 1)
                                            : std::cos(std::numbers::pi * p);
    return sign * std::pow(std::fabs(mu), p) * *sum;
  }
  const ld a = -static_cast<ld>(p) / 2;
  const CSum psi = psi_series(a, 0.5L, z);
  // sigma^p 2^(p/2) (-i sgn(mu))^p on the principal branch.
  const ld s = mu < 0 ? -1 : 1;
  const cld pref = std::polar(std::pow(static_cast<ld>(sigma), p) * std::pow(2.0L, p / 2),
                              -std::numbers::pi_v<ld> * p * s / 2);
  const cld value = pref * psi.value;
  const ld err = std::abs(pref) * psi.abs_err;
  if (!acceptable(value.real(), err, kKummerTol)) return std::nullopt;
  return static_cast<double>(value.real());
}

double gaussian_real_moment(const MomentQuery& q) {
  const std::optional<double> v = try_gaussian_real_moment(q);
  if (!v) {
    throw ConvergenceError("gaussian_real_moment: no convergence at p=" + std::to_string(q.exponent) +
                           ", mu=" + std::to_string(q.mu) + ", sigma=" + std::to_string(q.sigma));
  }
  return *v;
}

}  // namespace lsmc::specfun
