#include <cmath>
#include <random>

#include "doctest.h"
#include "lsmc/error.hpp"
#include "lsmc/objectives.hpp"
#include "lsmc/specfun.hpp"
#include "oracles.hpp"

using namespace lsmc;

namespace {

const TargetRange kBand{1.0, 1.2, ObjectiveKind::Strs};
const TargetRange kFlat{1.0, 1.2, ObjectiveKind::Ftrs};

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_CASE("strs payoff") {
  CHECK(strs_payoff(1.1, kBand) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(strs_payoff(0.99, kBand) == 0.0);
  CHECK(strs_payoff(1.2000001, kBand) == 0.0);
  CHECK(strs_payoff(1.2, kBand) == doctest::Approx(0.2));
  CHECK(strs_payoff(1.0, kBand) == 0.0);
  CHECK(strs_payoff(1e9, TargetRange{1.0, INFINITY, ObjectiveKind::Strs}) == doctest::Approx(1e9 - 1.0));
}

TEST_CASE("ftrs payoff") {
  CHECK(ftrs_payoff(1.05, kFlat) == 1.0);
  CHECK(ftrs_payoff(1.0, kFlat) == 1.0);
  CHECK(ftrs_payoff(1.2, kFlat) == 1.0);
  CHECK(ftrs_payoff(1.3, kFlat) == 0.0);
  CHECK(ftrs_payoff(0.999, kFlat) == 0.0);
}

TEST_CASE("relative payoff") {
  CHECK(relative_payoff(1.15, 1.05, {0.0, 0.2, ObjectiveKind::RelativeStrs}) == doctest::Approx(0.10));
  CHECK(relative_payoff(1.0, 1.1, {0.0, 0.2, ObjectiveKind::RelativeFtrs}) == 0.0);
  CHECK(relative_payoff(1.07, 1.07, {0.0, 0.2, ObjectiveKind::RelativeStrs}) == 0.0);
  CHECK(relative_payoff(1.1, 1.0, {0.0, 0.2, ObjectiveKind::RelativeFtrs}) == 1.0);
  CHECK(relative_payoff(0.9, 1.0, {-0.15, 0.2, ObjectiveKind::RelativeStrs}) == doctest::Approx(0.05));
}

TEST_CASE("strs payoff scaling identity") {
  for (double w0 : {0.5, 2.0, 10.0}) {
    for (double w = 0.8; w < 1.5; w += 0.0137) {
      const double direct = strs_payoff(w, kBand);
      const double scaled = w0 * strs_payoff(w / w0, TargetRange{1.0 / w0, 1.2 / w0, ObjectiveKind::Strs});
      if (w0 == 10.0) {
        // Division by 10 rounds; allow a few ulps.
        CHECK(std::abs(direct - scaled) <= 4 * std::numeric_limits<double>::epsilon());
      } else {
        CHECK(direct == scaled);
      }
    }
  }
}

TEST_CASE("crra utility") {
  for (double g : {0.5, 2.0, 5.0, 100.0}) CHECK(crra_utility(1.0, {g}) == doctest::Approx(1.0 / (1.0 - g)));
  CHECK(crra_utility(2.0, {2.0}) == doctest::Approx(-0.5));
  CHECK(crra_utility(0.0, {2.0}) == crra_utility(1e-6, {2.0}));
  CHECK(crra_utility(-3.0, {5.0}) == crra_utility(1e-6, {5.0}));
  double prev = -INFINITY, prev_slope = INFINITY;
  for (double w = 0.5; w < 2.0; w += 0.01) {
    const double u = crra_utility(w, {5.0});
    CHECK(u > prev);
    if (prev > -INFINITY) {
      CHECK(u - prev < prev_slope);
      prev_slope = u - prev;
    }
    prev = u;
  }
}

TEST_CASE("strs continuation examples") {
  CHECK(std::abs(strs_continuation({1.1, 1e-9}, kBand) - 0.1) < 1e-8);
  CHECK(std::abs(strs_continuation({0.5, 0.01}, kBand)) < 1e-12);
  const double want = oracle::strs_value(1.08, 0.05, 1.0, 1.2);
  CHECK(std::abs(strs_continuation({1.08, 0.05}, kBand) - want) <= 1e-10);
  const double inf_want = oracle::strs_value(1.02, 0.1, 1.0, INFINITY);
  CHECK(std::abs(strs_continuation({1.02, 0.1}, {1.0, INFINITY, ObjectiveKind::Strs}) - inf_want) <= 1e-10);
}

TEST_CASE("ftrs continuation examples") {
  const double two_sided = 2.0 * oracle::normal_cdf(oracle::mp(2)).convert_to<double>() - 1.0;
  CHECK(std::abs(ftrs_continuation({1.1, 0.05}, kFlat) - two_sided) < 1e-14);
  CHECK(ftrs_continuation({1.1, 1e6}, kFlat) < 1e-6);
  const double want = oracle::ftrs_value(1.15, 0.08, 1.0, 1.2);
  CHECK(std::abs(ftrs_continuation({1.15, 0.08}, kFlat) - want) <= 1e-12);
}

TEST_CASE("crra continuation examples") {
  CHECK(crra_continuation({1.1, 0.1}, {-1.0}) == doctest::Approx(0.61).epsilon(1e-12));
  for (double g : {2.0, 5.0, 50.0}) {
    const double deg = crra_continuation({1.05, 1e-7}, {g});
    CHECK(rel_err(deg, crra_utility(1.05, {g})) < 1e-6);
  }
  const double want = oracle::crra_value(5.0, 1.05, 0.04);
  CHECK(rel_err(crra_continuation({1.05, 0.04}, {5.0}), want) <= 1e-8);
}

TEST_CASE("crra continuation outside the closed-form region uses the counted fallback") {
  reset_crra_fallback_count();
  const double v = crra_continuation({1.0, 0.3}, {5.0});
  CHECK(crra_fallback_count() == 1);
  CHECK(rel_err(v, oracle::crra_value(5.0, 1.0, 0.3)) < 1e-6);
  const double neg = crra_continuation({-0.2, 0.1}, {2.0});
  CHECK(crra_fallback_count() == 2);
  CHECK(rel_err(neg, oracle::crra_value(2.0, -0.2, 0.1)) < 1e-6);
  crra_continuation({1.05, 0.04}, {5.0});
  CHECK(crra_fallback_count() == 2);
}

TEST_CASE("floored gaussian power against the oracle") {
  for (double p : {-1.0, -4.0, 0.5, 2.0}) {
    for (double mu : {0.2, 0.9, 1.3}) {
      for (double s : {0.1, 0.5}) {
        const double want = static_cast<double>(oracle::floored_power(p, mu, s, 1e-6));
        CHECK_MESSAGE(rel_err(floored_gaussian_power(p, mu, s), want) < 1e-7, p, " ", mu, " ", s);
      }
    }
  }
}

TEST_CASE("crra continuation increases in mu") {
  for (double g : {2.0, 10.0, 100.0}) {
    double prev = -INFINITY;
    for (double mu = 0.9; mu <= 1.4; mu += 0.01) {
      const double v = crra_continuation({mu, 0.02}, {g});
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("strs continuation matches a Monte Carlo mean of the payoff") {
  std::mt19937_64 gen(20240611);
  std::normal_distribution<double> normal;
  struct Case {
    double mu, s, lo, hi;
  };
  for (const Case c : {Case{1.08, 0.05, 1.0, 1.2}, Case{1.0, 0.1, 0.93, 1.53}, Case{1.1, 0.2, 1.0, INFINITY}}) {
    const TargetRange r{c.lo, c.hi, ObjectiveKind::Strs};
    const int n = 1000000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
      const double v = strs_payoff(c.mu + c.s * normal(gen), r);
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / (n - 1));
    CHECK(std::abs(mean - strs_continuation({c.mu, c.s}, r)) <= 4 * se);
  }
}

TEST_CASE("continuation bounds and ftrs monotonicity") {
  for (double mu = 0.7; mu <= 1.6; mu += 0.05) {
    for (double s : {0.005, 0.05, 0.3, 2.0}) {
      for (double lo : {0.9, 1.0, 1.05}) {
        for (double hi : {1.1, 1.2, 1.5}) {
          const double sv = strs_continuation({mu, s}, {lo, hi, ObjectiveKind::Strs});
          CHECK(sv <= hi - lo);
          const double fv = ftrs_continuation({mu, s}, {lo, hi, ObjectiveKind::Ftrs});
          CHECK(fv >= 0.0);
          CHECK(fv <= 1.0);
          CHECK(ftrs_continuation({mu, s}, {lo, hi + 0.05, ObjectiveKind::Ftrs}) >= fv);
          CHECK(ftrs_continuation({mu, s}, {lo - 0.05, hi, ObjectiveKind::Ftrs}) >= fv);
        }
      }
    }
  }
}

TEST_CASE("continuation values are continuous in mu") {
  const double h = 1e-6;
  for (double s : {0.02, 0.05, 0.15}) {
    const double k = 2.0 / s;  // bounds the mu-derivative of both shapes on these bands
    for (double mu = 0.8; mu <= 1.4; mu += 0.01) {
      for (const auto& r : {kBand, TargetRange{1.0, INFINITY, ObjectiveKind::Strs}}) {
        CHECK(std::abs(strs_continuation({mu + h, s}, r) - strs_continuation({mu, s}, r)) <= k * h);
      }
      CHECK(std::abs(ftrs_continuation({mu + h, s}, kFlat) - ftrs_continuation({mu, s}, kFlat)) <= k * h);
      // Below mu/sigma = 5 the floor mass dominates and grows like Phi(-mu/sigma),
      // so the natural scale is relative.
      const double c0 = crra_continuation({mu, s}, {5.0});
      CHECK(std::abs(crra_continuation({mu + h, s}, {5.0}) - c0) <= 1e3 * h * std::max(1.0, std::abs(c0)));
    }
  }
}

TEST_CASE("objective dispatch") {
  Objective strs;
  strs.range = kBand;
  CHECK(payoff(strs, 1.1) == strs_payoff(1.1, kBand));
  CHECK(continuation_value(strs, {1.08, 0.05}) == strs_continuation({1.08, 0.05}, kBand));

  Objective rel;
  rel.kind = ObjectiveKind::RelativeStrs;
  rel.range = {0.0, 0.2, ObjectiveKind::RelativeStrs};
  CHECK(payoff(rel, 1.15, 1.05) == relative_payoff(1.15, 1.05, rel.range));
  CHECK(continuation_value(rel, {0.05, 0.03}) == strs_continuation({0.05, 0.03}, rel.range));

  Objective crra;
  crra.kind = ObjectiveKind::Crra;
  crra.crra.gamma = 5.0;
  CHECK(payoff(crra, 1.2) == crra_utility(1.2, crra.crra));
}

TEST_CASE("validation") {
  CHECK_THROWS_AS((TargetRange{1.1, 1.1, ObjectiveKind::Strs}.validate()), ConfigError);
  CHECK_THROWS_AS((TargetRange{1.2, 1.1, ObjectiveKind::Strs}.validate()), ConfigError);
  CHECK_NOTHROW((TargetRange{1.0, INFINITY, ObjectiveKind::Strs}.validate()));
  CHECK_THROWS_AS(CrraParams{1.0}.validate(), ConfigError);
  CHECK_THROWS_AS(CrraParams{0.0}.validate(), ConfigError);
  CHECK_THROWS_AS(CrraParams{101.0}.validate(), ConfigError);
  CHECK_NOTHROW(CrraParams{100.0}.validate());
  CHECK(objective_kind_from_string(to_string(ObjectiveKind::RelativeFtrs)) == ObjectiveKind::RelativeFtrs);
}
