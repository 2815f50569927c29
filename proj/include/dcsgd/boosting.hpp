#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dcsgd/merge.hpp"
#include "dcsgd/robust_scalar.hpp"
#include "dcsgd/sgd.hpp"

namespace dcsgd {

// k disjoint, covering index lists over [n]; every subset holds at least
// floor(n/k) indices.
using Partition = std::vector<std::vector<std::size_t>>;

// Contiguous split; the first n mod k subsets take the extra element.
Partition partition_indices(std::size_t n, int k);

struct BoostConfig {
  int k = 10;
  MergeRule merge{};              // DC variants
  Validator validator{};          // RV variants
  bool average_subprocesses = true;
};

// Divide-and-conquer SGD: run one SGD sub-process per subset from w0,
// integrate the k last iterates with the merge rule.
ParamVec dc_sgd(const GradOracle& oracle, const ParamVec& w0, const BoostConfig& cfg,
                const StepSchedule& sched, const FeasibleSet& set);

// Losses of a candidate on the held-out validation sample.
using ValidationLosses = std::function<std::vector<double>(const ParamVec&)>;

// Robust-validation selection: run one SGD sub-process per subset, score the
// averaged iterates (last iterates when average_subprocesses is off) with the
// validator on the held-out losses, return the best-scoring candidate
// (smallest index on ties).
ParamVec rv_sgd_ave(const GradOracle& train, const ValidationLosses& valid_losses,
                    const ParamVec& w0, const BoostConfig& cfg, const StepSchedule& sched,
                    const FeasibleSet& set);

// Cross-validation heuristic over one pooled sample: candidate j trains on
// subset j and is scored on the losses of all other indices. Needs k >= 2.
ParamVec rv_sgd_cv(const GradOracle& pooled, const ParamVec& w0, const BoostConfig& cfg,
                   const StepSchedule& sched, const FeasibleSet& set);

enum class Regime { StrongConvex, General };

// Partition size delivering 1-delta confidence: ceil(8 log(1/delta)) under
// strong convexity, ceil(log(2 ceil(log(1/delta)) / delta)) in general
// (general regime requires delta <= 1/3).
int k_from_delta(double delta, Regime regime);

// Fraction of simulated runs in which more than k/2 of k independent
// candidates are good, each good with probability p_good.
double majority_boost_probability(double p_good, int k, int trials, std::uint64_t seed);

}  // namespace dcsgd
