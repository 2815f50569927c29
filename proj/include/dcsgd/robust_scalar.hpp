#pragma once

#include <optional>
#include <span>

namespace dcsgd {

// Scalar mean estimators that keep sub-Gaussian-style deviations under
// potentially heavy-tailed samples. Any of them can serve as the validation
// sub-routine that scores candidates on held-out losses.

enum class ValidatorKind { MoM, Catoni, Truncated, EmpiricalMean };

struct Validator {
  ValidatorKind kind = ValidatorKind::Catoni;
  double delta = 0.05;                     // confidence level in (0,1)
  std::optional<int> k_blocks;             // MoM; default ceil(log(1/delta))
  std::optional<double> sigma_hint;        // Catoni variance proxy (sigma^2)
};

double empirical_mean(std::span<const double> xs);

// Sample variance with n-1 denominator; 0 for n < 2.
double sample_variance(std::span<const double> xs);

// Median of the k block means, blocks formed by a contiguous split so each
// block holds at least floor(n/k) points.
double median_of_means(std::span<const double> xs, int k);

// M-estimate of the mean with the soft-truncating influence function
// psi(x) = sign(x) * log(1 + |x| + x^2/2) and the variance-calibrated scale
//   q^2 = 2 sigma^2 log(2/delta) / (n - 2 log(2/delta)),
//   s^2 = n (sigma^2 + q^2) / (2 log(2/delta)).
// The root of theta -> sum_i psi((x_i - theta)/s) is found by bisection on
// [min xs, max xs] to 1e-12 in theta; the returned residual satisfies
// |sum psi| <= 1e-10 * n. `sigma` is a standard deviation.
double catoni_mean(std::span<const double> xs, double sigma, double delta);

double catoni_psi(double x);

// Residual sum psi((x_i - theta)/s) at the Catoni calibration for (sigma,
// delta); exposed so tests can verify the root independently.
double catoni_residual(std::span<const double> xs, double theta, double sigma, double delta);

// Mean over the first half after zeroing values outside the [beta, 1-beta]
// quantile band of the second half, with beta = 32 log(8/delta) / (3n).
// Requires n >= (16/3) log(8/delta) and beta < 1/2.
double truncated_mean(std::span<const double> xs, double delta);

// Dispatch to the configured estimator. MoM defaults its block count to
// ceil(log(1/delta)); Catoni plugs in the sample variance of `losses` when
// no variance hint is configured.
double validate(const Validator& v, std::span<const double> losses);

}  // namespace dcsgd
