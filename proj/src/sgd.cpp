#include "dcsgd/sgd.hpp"

#include <stdexcept>

namespace dcsgd {

StepSchedule StepSchedule::constant(double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("StepSchedule: constant alpha must be >= 0");
  StepSchedule s;
  s.kind_ = Kind::Constant;
  s.alpha_ = alpha;
  return s;
}

StepSchedule StepSchedule::inverse_t(double lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("StepSchedule: inverse-t lambda must be positive");
  StepSchedule s;
  s.kind_ = Kind::InverseT;
  s.lambda_ = lambda;
  return s;
}

StepSchedule StepSchedule::warm_start(double a, double lambda, double beta1, std::size_t n_sub) {
  if (a <= 0.0 || lambda <= 0.0 || beta1 <= 0.0 || n_sub == 0) {
    throw std::invalid_argument("StepSchedule: warm-start parameters must be positive");
  }
  StepSchedule s;
  s.kind_ = Kind::WarmStart;
  s.lambda_ = lambda;
  s.a_ = a;
  s.b_ = 2.0 * a * beta1;
  s.alpha0_ = 1.0 / (2.0 * beta1);
  s.n_sub_ = n_sub;
  const double tail = a / (lambda * static_cast<double>(n_sub) + s.b_);
  if (tail > s.alpha0_) throw std::invalid_argument("StepSchedule: warm-start requires alpha_t <= alpha_0");
  return s;
}

double StepSchedule::alpha(std::size_t t) const {
  switch (kind_) {
    case Kind::Constant:
      return alpha_;
    case Kind::InverseT:
      return 1.0 / (lambda_ * static_cast<double>(t < 1 ? 1 : t));
    case Kind::WarmStart:
      if (t == 0) return alpha0_;
      return a_ / (lambda_ * static_cast<double>(n_sub_) + b_);
  }
  return 0.0;
}

ParamVec sgd_step(const ParamVec& w, const ParamVec& g, double alpha, const FeasibleSet& set) {
  if (alpha < 0.0) throw std::invalid_argument("sgd_step: alpha must be >= 0");
  return project(axpy(w, -alpha, g), set);
}

SgdRunResult run_sgd(const GradOracle& oracle, std::span<const std::size_t> indices,
                     const ParamVec& w0, const StepSchedule& sched, const FeasibleSet& set) {
  if (indices.empty()) throw std::invalid_argument("run_sgd: empty index sequence");
  ParamVec w = w0;
  ParamVec sum(w0.size(), 0.0);
  std::size_t t = 0;
  for (std::size_t idx : indices) {
    add_inplace(sum, w);
    const ParamVec g = oracle.grad(w, idx);
    w = sgd_step(w, g, sched.alpha(t), set);
    ++t;
  }
  scale_inplace(sum, 1.0 / static_cast<double>(indices.size()));
  return SgdRunResult{std::move(w), std::move(sum), indices.size()};
}

}  // namespace dcsgd
