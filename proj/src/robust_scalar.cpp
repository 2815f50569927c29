#include "dcsgd/robust_scalar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dcsgd/vec.hpp"

namespace dcsgd {

double empirical_mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("empirical_mean: empty input");
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = empirical_mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(n - 1);
}

double median_of_means(std::span<const double> xs, int k) {
  const std::size_t n = xs.size();
  if (n == 0) throw std::invalid_argument("median_of_means: empty input");
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("median_of_means: need 1 <= k <= n");
  }
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t rem = n % static_cast<std::size_t>(k);
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(k));
  std::size_t at = 0;
  for (int j = 0; j < k; ++j) {
    const std::size_t len = base + (static_cast<std::size_t>(j) < rem ? 1 : 0);
    double acc = 0.0;
    for (std::size_t i = 0; i < len; ++i) acc += xs[at + i];
    means.push_back(acc / static_cast<double>(len));
    at += len;
  }
  return scalar_median(means);
}

double catoni_psi(double x) {
  const double a = std::abs(x);
  const double v = std::log1p(a + 0.5 * a * a);
  return x >= 0.0 ? v : -v;
}

namespace {

struct CatoniScale {
  double s;
  double log_term;
};

CatoniScale catoni_scale(std::size_t n, double sigma, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("catoni: delta outside (0,1)");
  if (!(sigma > 0.0)) throw std::invalid_argument("catoni: sigma must be positive");
  const double L = std::log(2.0 / delta);
  if (static_cast<double>(n) <= 2.0 * L) {
    throw std::invalid_argument("catoni: sample too small for requested confidence (need n > 2 log(2/delta))");
  }
  const double nn = static_cast<double>(n);
  const double q2 = 2.0 * sigma * sigma * L / (nn - 2.0 * L);
  const double s2 = nn * (sigma * sigma + q2) / (2.0 * L);
  return CatoniScale{std::sqrt(s2), L};
}

double psi_sum(std::span<const double> xs, double theta, double s) {
  double acc = 0.0;
  for (double x : xs) acc += catoni_psi((x - theta) / s);
  return acc;
}

}  // namespace

double catoni_residual(std::span<const double> xs, double theta, double sigma, double delta) {
  const CatoniScale cal = catoni_scale(xs.size(), sigma, delta);
  return psi_sum(xs, theta, cal.s);
}

double catoni_mean(std::span<const double> xs, double sigma, double delta) {
  if (xs.empty()) throw std::invalid_argument("catoni: empty input");
  const auto [mn_it, mx_it] = std::minmax_element(xs.begin(), xs.end());
  double lo = *mn_it, hi = *mx_it;
  if (lo == hi) return lo;  // psi(0)=0 makes the common value an exact root
  const CatoniScale cal = catoni_scale(xs.size(), sigma, delta);

  // theta -> sum psi((x-theta)/s) is strictly decreasing with f(lo) >= 0 and
  // f(hi) <= 0, so plain bisection converges without tuning.
  const double n = static_cast<double>(xs.size());
  double theta = 0.5 * (lo + hi);
  for (int iter = 0; iter < 300; ++iter) {
    theta = 0.5 * (lo + hi);
    const double v = psi_sum(xs, theta, cal.s);
    if (hi - lo <= 1e-12 && std::abs(v) <= 1e-10 * n) break;
    if (v > 0.0) {
      lo = theta;
    } else {
      hi = theta;
    }
    if (lo == hi) break;
  }
  return theta;
}

double truncated_mean(std::span<const double> xs, double delta) {
  const std::size_t n = xs.size();
  if (n == 0) throw std::invalid_argument("truncated_mean: empty input");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("truncated_mean: delta outside (0,1)");
  const double L8 = std::log(8.0 / delta);
  if (static_cast<double>(n) < (16.0 / 3.0) * L8) {
    throw std::invalid_argument("truncated_mean: sample too small (need n >= (16/3) log(8/delta))");
  }
  const double beta = 32.0 * L8 / (3.0 * static_cast<double>(n));
  if (!(beta < 0.5)) {
    throw std::invalid_argument("truncated_mean: beta = 32 log(8/delta)/(3n) must be below 1/2");
  }
  const std::size_t n1 = (n + 1) / 2;  // |I1| >= |I2| >= floor(n/2)
  std::span<const double> half2 = xs.subspan(n1);
  const double a = quantile(half2, beta);
  const double b = quantile(half2, 1.0 - beta);
  double acc = 0.0;
  for (std::size_t i = 0; i < n1; ++i) {
    const double x = xs[i];
    if (x >= a && x <= b) acc += x;
  }
  return acc / static_cast<double>(n1);
}

double validate(const Validator& v, std::span<const double> losses) {
  if (losses.empty()) throw std::invalid_argument("validate: empty loss sample");
  switch (v.kind) {
    case ValidatorKind::EmpiricalMean:
      return empirical_mean(losses);
    case ValidatorKind::MoM: {
      int k = 1;
      if (v.k_blocks) {
        k = *v.k_blocks;
      } else {
        if (!(v.delta > 0.0 && v.delta < 1.0)) throw std::invalid_argument("validate: delta outside (0,1)");
        k = std::max(1, static_cast<int>(std::ceil(std::log(1.0 / v.delta))));
      }
      return median_of_means(losses, k);
    }
    case ValidatorKind::Catoni: {
      const double var = v.sigma_hint ? *v.sigma_hint : sample_variance(losses);
      if (var <= 0.0) return losses[0];  // constant sample
      return catoni_mean(losses, std::sqrt(var), v.delta);
    }
    case ValidatorKind::Truncated:
      return truncated_mean(losses, v.delta);
  }
  throw std::logic_error("validate: unknown estimator kind");
}

}  // namespace dcsgd
