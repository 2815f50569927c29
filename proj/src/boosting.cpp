#include "dcsgd/boosting.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dcsgd/rng.hpp"

namespace dcsgd {

Partition partition_indices(std::size_t n, int k) {
  if (k < 1) throw std::invalid_argument("partition_indices: k must be >= 1");
  if (static_cast<std::size_t>(k) > n) throw std::invalid_argument("partition_indices: k exceeds n");
  Partition parts(static_cast<std::size_t>(k));
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t rem = n % static_cast<std::size_t>(k);
  std::size_t at = 0;
  for (std::size_t j = 0; j < parts.size(); ++j) {
    const std::size_t len = base + (j < rem ? 1 : 0);
    parts[j].reserve(len);
    for (std::size_t i = 0; i < len; ++i) parts[j].push_back(at + i);
    at += len;
  }
  return parts;
}

ParamVec dc_sgd(const GradOracle& oracle, const ParamVec& w0, const BoostConfig& cfg,
                const StepSchedule& sched, const FeasibleSet& set) {
  const Partition parts = partition_indices(oracle.size(), cfg.k);
  CandidateSet cands;
  cands.reserve(parts.size());
  for (const auto& subset : parts) {
    cands.push_back(run_sgd(oracle, subset, w0, sched, set).last_iterate);
  }
  return merge(cfg.merge, cands);
}

namespace {

std::size_t argmin_score(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j) {
    if (scores[j] < scores[best]) best = j;  // ties keep the smallest index
  }
  return best;
}

}  // namespace

ParamVec rv_sgd_ave(const GradOracle& train, const ValidationLosses& valid_losses,
                    const ParamVec& w0, const BoostConfig& cfg, const StepSchedule& sched,
                    const FeasibleSet& set) {
  const Partition parts = partition_indices(train.size(), cfg.k);
  CandidateSet cands;
  cands.reserve(parts.size());
  for (const auto& subset : parts) {
    SgdRunResult r = run_sgd(train, subset, w0, sched, set);
    cands.push_back(cfg.average_subprocesses ? std::move(r.average_iterate)
                                             : std::move(r.last_iterate));
  }
  std::vector<double> scores(cands.size());
  for (std::size_t j = 0; j < cands.size(); ++j) {
    scores[j] = validate(cfg.validator, valid_losses(cands[j]));
  }
  return cands[argmin_score(scores)];
}

ParamVec rv_sgd_cv(const GradOracle& pooled, const ParamVec& w0, const BoostConfig& cfg,
                   const StepSchedule& sched, const FeasibleSet& set) {
  if (cfg.k < 2) throw std::invalid_argument("rv_sgd_cv: need k >= 2 for held-out scoring");
  const std::size_t n = pooled.size();
  const Partition parts = partition_indices(n, cfg.k);
  CandidateSet cands;
  cands.reserve(parts.size());
  for (const auto& subset : parts) {
    SgdRunResult r = run_sgd(pooled, subset, w0, sched, set);
    cands.push_back(cfg.average_subprocesses ? std::move(r.average_iterate)
                                             : std::move(r.last_iterate));
  }
  std::vector<double> scores(cands.size());
  for (std::size_t j = 0; j < cands.size(); ++j) {
    // Contiguous partition: the held-out indices are the two flanks.
    const std::size_t lo = parts[j].front();
    const std::size_t hi = parts[j].back() + 1;
    std::vector<double> losses;
    losses.reserve(n - parts[j].size());
    for (std::size_t i = 0; i < lo; ++i) losses.push_back(pooled.loss(cands[j], i));
    for (std::size_t i = hi; i < n; ++i) losses.push_back(pooled.loss(cands[j], i));
    scores[j] = validate(cfg.validator, losses);
  }
  return cands[argmin_score(scores)];
}

int k_from_delta(double delta, Regime regime) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("k_from_delta: delta outside (0,1)");
  if (regime == Regime::StrongConvex) {
    return static_cast<int>(std::ceil(8.0 * std::log(1.0 / delta)));
  }
  if (delta > 1.0 / 3.0) throw std::invalid_argument("k_from_delta: general regime needs delta <= 1/3");
  const double inner = std::ceil(std::log(1.0 / delta));
  return static_cast<int>(std::ceil(std::log(2.0 * inner / delta)));
}

double majority_boost_probability(double p_good, int k, int trials, std::uint64_t seed) {
  if (!(p_good >= 0.0 && p_good <= 1.0)) throw std::invalid_argument("majority_boost_probability: p outside [0,1]");
  if (k < 1 || trials < 1) throw std::invalid_argument("majority_boost_probability: need k >= 1 and trials >= 1");
  Rng rng(seed);
  long long hits = 0;
  for (int t = 0; t < trials; ++t) {
    int good = 0;
    for (int i = 0; i < k; ++i) good += rng.uniform01() <= p_good ? 1 : 0;
    if (2 * good > k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace dcsgd
