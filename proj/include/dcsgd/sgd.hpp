#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dcsgd/vec.hpp"

namespace dcsgd {

// Step-size rule alpha_t for projected SGD.
//  - Constant: alpha_t = alpha.
//  - InverseT: alpha_t = 1 / (lambda * max(1, t)), t starting at 0.
//  - WarmStart: alpha_0 = 1/(2 beta1), alpha_t = a / (lambda * n_sub + b) with
//              b = 2 a beta1 for t > 0 (n_sub is the sub-process sample size).
class StepSchedule {
 public:
  enum class Kind { Constant, InverseT, WarmStart };

  static StepSchedule constant(double alpha);
  static StepSchedule inverse_t(double lambda);
  static StepSchedule warm_start(double a, double lambda, double beta1, std::size_t n_sub);

  double alpha(std::size_t t) const;
  Kind kind() const { return kind_; }

  // WarmStart parameters (a, b = 2 a beta1); zero for other kinds.
  double warm_start_a() const { return a_; }
  double warm_start_b() const { return b_; }

 private:
  StepSchedule() = default;
  Kind kind_ = Kind::Constant;
  double alpha_ = 0.0;   // Constant
  double lambda_ = 0.0;  // InverseT / WarmStart
  double a_ = 0.0, b_ = 0.0, alpha0_ = 0.0;
  std::size_t n_sub_ = 0;
};

// First-order access to a fixed dataset. Gradient calls are the budget unit
// and bump the oracle's cost counter; loss calls are free.
class GradOracle {
 public:
  virtual ~GradOracle() = default;
  virtual std::size_t size() const = 0;
  virtual std::size_t dim() const = 0;
  virtual double loss(const ParamVec& w, std::size_t i) const = 0;
  virtual ParamVec grad(const ParamVec& w, std::size_t i) const = 0;
  virtual long long gradient_cost() const { return 0; }
};

struct SgdRunResult {
  ParamVec last_iterate;
  ParamVec average_iterate;  // mean of the iterates entering each step
  std::size_t gradients_used = 0;
};

// One projected update: project(w - alpha * g).
ParamVec sgd_step(const ParamVec& w, const ParamVec& g, double alpha, const FeasibleSet& set);

// Applies sgd_step once per index in order; step t uses sched.alpha(t). The
// averaged iterate follows the w_0..w_{T-1} convention, so a single-step run
// reports average_iterate == w0.
SgdRunResult run_sgd(const GradOracle& oracle, std::span<const std::size_t> indices,
                     const ParamVec& w0, const StepSchedule& sched, const FeasibleSet& set);

}  // namespace dcsgd
