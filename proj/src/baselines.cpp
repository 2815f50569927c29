#include "dcsgd/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dcsgd/boosting.hpp"
#include "dcsgd/merge.hpp"
#include "dcsgd/rng.hpp"
#include "dcsgd/robust_scalar.hpp"

namespace dcsgd {

ParamVec direction_erm(const GradOracle& oracle, const ParamVec& w) {
  const std::size_t n = oracle.size();
  if (n == 0) throw std::invalid_argument("direction_erm: empty dataset");
  ParamVec acc(oracle.dim(), 0.0);
  for (std::size_t i = 0; i < n; ++i) add_inplace(acc, oracle.grad(w, i));
  scale_inplace(acc, 1.0 / static_cast<double>(n));
  return acc;
}

ParamVec direction_rgd_mom(const GradOracle& oracle, const ParamVec& w, int k, double merge_tol) {
  const Partition parts = partition_indices(oracle.size(), k);
  CandidateSet block_means;
  block_means.reserve(parts.size());
  for (const auto& block : parts) {
    ParamVec acc(oracle.dim(), 0.0);
    for (std::size_t i : block) add_inplace(acc, oracle.grad(w, i));
    scale_inplace(acc, 1.0 / static_cast<double>(block.size()));
    block_means.push_back(std::move(acc));
  }
  return geometric_median(block_means, merge_tol);
}

ParamVec direction_rgd_m(const GradOracle& oracle, const ParamVec& w, double delta) {
  const std::size_t n = oracle.size();
  const std::size_t d = oracle.dim();
  if (n == 0) throw std::invalid_argument("direction_rgd_m: empty dataset");
  std::vector<double> grads(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const ParamVec g = oracle.grad(w, i);
    std::copy(g.begin(), g.end(), grads.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  ParamVec out(d);
  std::vector<double> column(n);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = grads[i * d + j];
    const double var = sample_variance(column);
    out[j] = var > 0.0 ? catoni_mean(column, std::sqrt(var), delta) : column[0];
  }
  return out;
}

ParamVec direction_mom_by_gd(const GradOracle& oracle, const ParamVec& w, int k,
                             std::size_t* gradients_used) {
  const Partition parts = partition_indices(oracle.size(), k);
  std::vector<double> block_loss(parts.size());
  for (std::size_t j = 0; j < parts.size(); ++j) {
    double acc = 0.0;
    for (std::size_t i : parts[j]) acc += oracle.loss(w, i);
    block_loss[j] = acc / static_cast<double>(parts[j].size());
  }
  // Median block by mean loss; even k takes the lower of the two middles.
  std::vector<std::size_t> order(parts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return block_loss[a] < block_loss[b]; });
  const std::size_t star = order[(parts.size() - 1) / 2];

  ParamVec acc(oracle.dim(), 0.0);
  for (std::size_t i : parts[star]) add_inplace(acc, oracle.grad(w, i));
  scale_inplace(acc, 1.0 / static_cast<double>(parts[star].size()));
  if (gradients_used) *gradients_used = parts[star].size();
  return acc;
}

std::vector<CheckpointedPoint> run_baseline(const BaselineConfig& cfg, const GradOracle& oracle,
                                            const ParamVec& w0, long long budget,
                                            const FeasibleSet& set,
                                            std::span<const long long> checkpoints) {
  if (budget < 0) throw std::invalid_argument("run_baseline: negative budget");
  const std::size_t n = oracle.size();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  std::vector<CheckpointedPoint> out;
  out.push_back({0, w0, 0.0});
  std::size_t next_cp = 0;
  while (next_cp < checkpoints.size() && checkpoints[next_cp] <= 0) ++next_cp;

  ParamVec w = w0;
  long long cost = 0;
  auto record_crossings = [&]() {
    if (next_cp < checkpoints.size() && cost >= checkpoints[next_cp]) {
      out.push_back({cost, w, elapsed()});
      while (next_cp < checkpoints.size() && checkpoints[next_cp] <= cost) ++next_cp;
    }
  };

  auto record_final = [&]() {
    if (out.back().cost < cost) out.push_back({cost, w, elapsed()});
  };

  if (cfg.method == BaselineMethod::Sgd) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(cfg.shuffle_seed);
    auto reshuffle = [&]() {
      if (!cfg.shuffle) return;
      for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
        std::swap(order[i], order[j]);
      }
    };
    reshuffle();
    std::size_t pos = 0;
    while (cost + 1 <= budget) {
      const ParamVec g = oracle.grad(w, order[pos]);
      w = project(axpy(w, -cfg.alpha, g), set);
      ++cost;
      if (++pos == n) {
        pos = 0;
        reshuffle();
      }
      record_crossings();
    }
    record_final();
    return out;
  }

  // A step only runs if its worst-case cost still fits the budget.
  long long step_limit = static_cast<long long>(n);
  if (cfg.method == BaselineMethod::MomByGd) {
    step_limit = static_cast<long long>((n + static_cast<std::size_t>(cfg.k) - 1) /
                                        static_cast<std::size_t>(cfg.k));
  }
  while (cost + step_limit <= budget) {
    ParamVec dir;
    long long step_cost = static_cast<long long>(n);
    switch (cfg.method) {
      case BaselineMethod::ErmGd:
        dir = direction_erm(oracle, w);
        break;
      case BaselineMethod::RgdMoM:
        dir = direction_rgd_mom(oracle, w, cfg.k, cfg.merge_tol);
        break;
      case BaselineMethod::RgdM:
        dir = direction_rgd_m(oracle, w, cfg.delta);
        break;
      case BaselineMethod::MomByGd: {
        std::size_t used = 0;
        dir = direction_mom_by_gd(oracle, w, cfg.k, &used);
        step_cost = static_cast<long long>(used);
        break;
      }
      case BaselineMethod::Sgd:
        throw std::logic_error("run_baseline: unreachable");
    }
    cost += step_cost;
    w = project(axpy(w, -cfg.alpha, dir), set);
    record_crossings();
  }
  record_final();
  return out;
}

}  // namespace dcsgd
