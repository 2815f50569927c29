#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dcsgd/rng.hpp"
#include "dcsgd/robust_scalar.hpp"
#include "dcsgd/vec.hpp"

using namespace dcsgd;

namespace {

std::vector<double> centered_lognormal(Rng& rng, std::size_t n, double b) {
  std::vector<double> xs(n);
  const double mean = std::exp(0.5 * b * b);
  for (double& x : xs) x = std::exp(b * rng.normal()) - mean;
  return xs;
}

double lognormal_variance(double b) {
  const double eb2 = std::exp(b * b);
  return (eb2 - 1.0) * eb2;
}

// Independent root check for the Catoni estimate: scan a coarse grid for the
// sign change, then refine by interval halving on the residual directly.
double catoni_root_by_scan(const std::vector<double>& xs, double sigma, double delta) {
  double lo = *std::min_element(xs.begin(), xs.end());
  double hi = *std::max_element(xs.begin(), xs.end());
  const int cells = 2048;
  double prev_t = lo, prev_v = catoni_residual(xs, lo, sigma, delta);
  for (int i = 1; i <= cells; ++i) {
    const double t = lo + (hi - lo) * i / cells;
    const double v = catoni_residual(xs, t, sigma, delta);
    if (v <= 0.0) {
      lo = prev_t;
      hi = t;
      break;
    }
    prev_t = t;
    prev_v = v;
  }
  (void)prev_v;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (catoni_residual(xs, mid, sigma, delta) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("median_of_means block arithmetic") {
  const std::vector<double> xs{1, 2, 3, 4, 5, 6};
  CHECK(median_of_means(xs, 2) == doctest::Approx(3.5));  // block means {2, 5}
  CHECK(median_of_means(xs, 1) == doctest::Approx(3.5));  // single block = mean
  const std::vector<double> constant(9, 4.2);
  for (int k : {1, 2, 3, 5, 9}) CHECK(median_of_means(constant, k) == doctest::Approx(4.2));
  CHECK_THROWS_AS(median_of_means(xs, 7), std::invalid_argument);
  CHECK_THROWS_AS(median_of_means(std::vector<double>{}, 1), std::invalid_argument);
}

TEST_CASE("catoni_mean solves the influence equation") {
  SUBCASE("constant sample is an exact root") {
    const std::vector<double> xs(50, 3.25);
    CHECK(catoni_mean(xs, 1.0, 0.05) == 3.25);
  }
  SUBCASE("symmetric samples center at the point of symmetry") {
    const std::vector<double> xs{2.0 - 1.3, 2.0 + 1.3, 2.0 - 0.4, 2.0 + 0.4,
                                 2.0 - 2.6, 2.0 + 2.6, 2.0 - 0.9, 2.0 + 0.9};
    CHECK(catoni_mean(xs, 1.0, 0.05) == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("agrees with an independent root finder on heavy-tailed data") {
    Rng rng(2024);
    const double b = 1.75;
    const std::vector<double> xs = centered_lognormal(rng, 200, b);
    const double sigma = std::sqrt(lognormal_variance(b));
    const double est = catoni_mean(xs, sigma, 0.05);
    const double oracle = catoni_root_by_scan(xs, sigma, 0.05);
    CHECK(est == doctest::Approx(oracle).epsilon(1e-9));
    // sub-Gaussian-style deviation bound with the estimator's constant c <= 2
    const double bound = 2.0 * std::sqrt((1.0 + std::log(1.0 / 0.05)) * sigma * sigma / 200.0);
    CHECK(std::abs(est) <= bound);
  }
  SUBCASE("root residual stays below 1e-10 n") {
    Rng rng(5);
    for (int rep = 0; rep < 20; ++rep) {
      const std::vector<double> xs = centered_lognormal(rng, 151, 1.5);
      const double sigma = std::sqrt(sample_variance(xs));
      const double est = catoni_mean(xs, sigma, 0.1);
      REQUIRE(std::abs(catoni_residual(xs, est, sigma, 0.1)) <= 1e-10 * 151.0);
    }
  }
  SUBCASE("insufficient sample for the requested confidence") {
    const std::vector<double> xs{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(catoni_mean(xs, 1.0, 0.05), std::invalid_argument);  // n <= 2 log(2/delta)
  }
}

TEST_CASE("truncated_mean zeroes values outside the quantile band") {
  SUBCASE("constant sample") {
    const std::vector<double> xs(120, -1.5);
    CHECK(truncated_mean(xs, 0.05) == doctest::Approx(-1.5));
  }
  SUBCASE("normal draws land within the deviation bound (c = 9 sqrt 2)") {
    // beta = 32 log(8/delta)/(3n) only drops below 1/2 from n >= 109 at
    // delta = 0.05, so the smallest round sample size exercising the
    // estimator is 200.
    Rng rng(7);
    std::vector<double> xs(200);
    for (double& x : xs) x = rng.normal();
    const double est = truncated_mean(xs, 0.05);
    const double bound = 9.0 * std::sqrt(2.0) * std::sqrt((1.0 + std::log(1.0 / 0.05)) / 200.0);
    CHECK(std::abs(est) <= bound);
  }
  SUBCASE("an isolated outlier in the averaged half is excluded") {
    // beta = 32 log(8/0.3)/(3*80) = 0.438: the quantile band of the second
    // half is [0,0], so the 1000 contributes nothing to the first-half sum.
    std::vector<double> xs(80, 0.0);
    xs[4] = 1000.0;
    CHECK(truncated_mean(xs, 0.3) == 0.0);
  }
  SUBCASE("preconditions reject tiny samples") {
    // The 10-point variant of the outlier sample violates both n >= (16/3)
    // log(8/delta) and beta < 1/2.
    const std::vector<double> xs{0, 0, 0, 0, 1000, 0, 0, 0, 0, 0};
    CHECK_THROWS_AS(truncated_mean(xs, 0.3), std::invalid_argument);
  }
}

TEST_CASE("validate dispatches to the configured estimator") {
  const std::vector<double> xs{1, 2, 3};
  Validator mean{ValidatorKind::EmpiricalMean, 0.05, std::nullopt, std::nullopt};
  CHECK(validate(mean, xs) == doctest::Approx(2.0));

  // delta = 0.05 gives k' = ceil(log 20) = 3 blocks over [1..9].
  Validator mom{ValidatorKind::MoM, 0.05, std::nullopt, std::nullopt};
  const std::vector<double> nine{1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK(validate(mom, nine) == doctest::Approx(5.0));

  Validator catoni{ValidatorKind::Catoni, 0.05, std::nullopt, std::nullopt};
  const std::vector<double> constant(40, 1.25);
  CHECK(validate(catoni, constant) == doctest::Approx(1.25));
}

TEST_CASE("robust estimators are translation equivariant") {
  Rng rng(31);
  const double b = 1.3;
  const std::vector<double> xs = centered_lognormal(rng, 240, b);
  std::vector<double> shifted = xs;
  const double c = 11.75;
  for (double& x : shifted) x += c;
  CHECK(median_of_means(shifted, 4) == doctest::Approx(median_of_means(xs, 4) + c).epsilon(1e-9));
  const double sigma = std::sqrt(lognormal_variance(b));
  CHECK(catoni_mean(shifted, sigma, 0.05) ==
        doctest::Approx(catoni_mean(xs, sigma, 0.05) + c).epsilon(1e-9));

  // The truncated mean zeroes out-of-band values rather than dropping them,
  // so exact shift equivariance holds when the quantile band of the held-out
  // half covers the averaged half: narrow first half, wide second half.
  std::vector<double> tame(240);
  for (std::size_t i = 0; i < 120; ++i) tame[i] = 0.1 * rng.normal();
  for (std::size_t i = 120; i < 240; ++i) tame[i] = 40.0 * rng.normal();
  std::vector<double> tame_shifted = tame;
  for (double& x : tame_shifted) x += c;
  CHECK(truncated_mean(tame_shifted, 0.05) ==
        doctest::Approx(truncated_mean(tame, 0.05) + c).epsilon(1e-9));
}

TEST_CASE("MoM and truncated mean are scale equivariant") {
  Rng rng(32);
  const std::vector<double> xs = centered_lognormal(rng, 160, 1.0);
  std::vector<double> scaled = xs;
  const double a = 3.5;
  for (double& x : scaled) x *= a;
  CHECK(median_of_means(scaled, 5) == doctest::Approx(a * median_of_means(xs, 5)));
  CHECK(truncated_mean(scaled, 0.05) == doctest::Approx(a * truncated_mean(xs, 0.05)));
}

TEST_CASE("robust estimators dominate the empirical mean on heavy tails") {
  // Median absolute deviation of each estimator across repetitions on
  // centered log-normal samples: the robust spreads never exceed the plain
  // mean's.
  Rng rng(404);
  const double b = 1.75;
  const double sigma = std::sqrt(lognormal_variance(b));
  const int reps = 600;
  std::vector<double> est_mean, est_mom, est_cat, est_tr;
  for (int r = 0; r < reps; ++r) {
    const std::vector<double> xs = centered_lognormal(rng, 500, b);
    est_mean.push_back(empirical_mean(xs));
    est_mom.push_back(median_of_means(xs, 3));
    est_cat.push_back(catoni_mean(xs, sigma, 0.05));
    est_tr.push_back(truncated_mean(xs, 0.05));
  }
  auto mad = [](std::vector<double> v) {
    const double med = scalar_median(v);
    for (double& x : v) x = std::abs(x - med);
    return scalar_median(v);
  };
  const double mad_mean = mad(est_mean);
  CHECK(mad(est_mom) <= mad_mean);
  CHECK(mad(est_cat) <= mad_mean);
  CHECK(mad(est_tr) <= mad_mean);
}
