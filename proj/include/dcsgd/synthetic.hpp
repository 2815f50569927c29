#pragma once

#include <atomic>
#include <cstdint>
#include <utility>
#include <vector>

#include "dcsgd/merge.hpp"
#include "dcsgd/sgd.hpp"
#include "dcsgd/vec.hpp"

namespace dcsgd {

enum class NoiseFamily { Normal, LogNormal };

// Additive noise E built from a latent Y ~ Normal(0, b^2); both families are
// centered: Normal gives E = Y, log-Normal gives E = exp(Y) - exp(b^2/2).
struct NoiseModel {
  NoiseFamily family = NoiseFamily::LogNormal;
  double b = 1.75;
};

double noise_variance(const NoiseModel& m);

// Diagonal of Sigma = E[XX^T]/2. Identity puts 1/6 on every coordinate
// (unit-uniform inputs); HalfFlat keeps 1/6 on the first ceil(d/2)
// coordinates and drops the rest to 1e-4, leaving many nearly flat
// directions.
enum class Curvature { Identity, HalfFlat };

// Informational constants and excess-risk bound values for reporting next to
// empirical results.
struct TheoryBounds {
  double lambda = 0.0;      // strong convexity of the risk: 2 min Sigma_jj
  double beta1 = 0.0;       // loss smoothness over the support: sum_j c_j^2
  double beta1_risk = 0.0;  // risk smoothness: 2 max Sigma_jj
  double beta0 = 0.0;       // Lipschitz proxy on the realized data
  double burn_in_threshold = 0.0;
  double burn_in_discount = 0.0;
  double c_merge = 0.0;     // 288 smball / 1536 geomed / 1536 d median
  double dc_lipschitz_bound = 0.0;
  double dc_smooth_bound = 0.0;
  double rv_validation_bound = 0.0;
};

// Quadratic-risk testbed: loss(w; Z) = (<w - w*, X> + E)^2 / 2 over a fixed
// dataset of n realized (X, E) pairs, with inputs X_j = c_j * Uniform[-1,1],
// c_j = sqrt(6 Sigma_jj), so Sigma_jj = E[X_j^2]/2. The exact excess risk
// <Sigma(w - w*), w - w*> is available in closed form.
class QuadraticProblem : public GradOracle {
 public:
  static QuadraticProblem make(int d, int n, Curvature curvature, NoiseModel noise,
                               std::uint64_t seed);

  std::size_t size() const override { return es_.size(); }
  std::size_t dim() const override { return static_cast<std::size_t>(d_); }

  double loss(const ParamVec& w, std::size_t i) const override;
  ParamVec grad(const ParamVec& w, std::size_t i) const override;
  std::pair<double, ParamVec> loss_and_grad(const ParamVec& w, std::size_t i) const;

  // R(w) - R(w*) = sum_j Sigma_jj (w_j - w*_j)^2, exactly.
  double excess_risk(const ParamVec& w) const;

  const std::vector<double>& sigma_diag() const { return sigma_diag_; }
  const ParamVec& w_star() const { return w_star_; }
  const NoiseModel& noise() const { return noise_; }
  std::uint64_t seed() const { return seed_; }

  std::span<const double> sample_x(std::size_t i) const;
  double sample_e(std::size_t i) const { return es_[i]; }

  long long gradient_cost() const override { return grad_evals_.load(std::memory_order_relaxed); }
  void reset_gradient_cost() { grad_evals_.store(0, std::memory_order_relaxed); }

  QuadraticProblem(const QuadraticProblem& o)
      : d_(o.d_), sigma_diag_(o.sigma_diag_), w_star_(o.w_star_), noise_(o.noise_),
        seed_(o.seed_), xs_(o.xs_), es_(o.es_), grad_evals_(o.gradient_cost()) {}
  QuadraticProblem& operator=(const QuadraticProblem&) = delete;

 private:
  QuadraticProblem() = default;

  int d_ = 0;
  std::vector<double> sigma_diag_;
  ParamVec w_star_;
  NoiseModel noise_;
  std::uint64_t seed_ = 0;
  std::vector<double> xs_;  // n x d, row-major
  std::vector<double> es_;
  mutable std::atomic<long long> grad_evals_{0};
};

QuadraticProblem make_problem(int d, int n, Curvature curvature, NoiseModel noise,
                              std::uint64_t seed);

// Bound values at the problem's (n, delta). The schedule supplies the free
// constant of the t>0 step sizes when it is a warm-start rule; init_scale feeds
// the beta0 / ||w0 - w*|| proxies (reporting only, never the learners).
TheoryBounds theory_report(const QuadraticProblem& p, double delta, const StepSchedule& sched,
                           MergeKind merge = MergeKind::GeoMed, double init_scale = 5.0);

}  // namespace dcsgd
