#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dcsgd/sgd.hpp"
#include "dcsgd/vec.hpp"

namespace dcsgd {

// Comparison methods: full-batch ERM gradient descent, single-process SGD,
// and the robust-gradient-descent family (geometric-median-of-block-means,
// per-coordinate M-estimation, median-of-means block selection).

enum class BaselineMethod { ErmGd, Sgd, RgdMoM, RgdM, MomByGd };

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::ErmGd;
  int k = 10;              // partition-based methods
  double alpha = 0.1;      // fixed step size
  double delta = 0.05;     // RgdM scale calibration
  double merge_tol = 1e-10;
  bool shuffle = false;    // Sgd epoch reshuffling
  std::uint64_t shuffle_seed = 0;
};

// Mean gradient over the whole dataset; costs n evaluations.
ParamVec direction_erm(const GradOracle& oracle, const ParamVec& w);

// Geometric median of the k block-mean gradients; costs n evaluations.
ParamVec direction_rgd_mom(const GradOracle& oracle, const ParamVec& w, int k,
                           double merge_tol = 1e-10);

// Coordinate-wise Catoni M-estimate of the gradient, with the sample
// variance of each coordinate plugged in as the scale; costs n evaluations.
ParamVec direction_rgd_m(const GradOracle& oracle, const ParamVec& w, double delta);

// Mean gradient over the block whose mean loss is the median (lower middle
// for even k); costs |I*| evaluations, reported through gradients_used.
ParamVec direction_mom_by_gd(const GradOracle& oracle, const ParamVec& w, int k,
                             std::size_t* gradients_used = nullptr);

struct CheckpointedPoint {
  long long cost = 0;
  ParamVec w;
  double elapsed_s = 0.0;  // wall clock since the run started
};

// Iterates w <- project(w - alpha * direction(w)) until the gradient budget
// is spent, recording the current iterate whenever the cost crosses the next
// requested checkpoint. The initial point is always recorded at cost 0.
std::vector<CheckpointedPoint> run_baseline(const BaselineConfig& cfg, const GradOracle& oracle,
                                            const ParamVec& w0, long long budget,
                                            const FeasibleSet& set,
                                            std::span<const long long> checkpoints);

}  // namespace dcsgd
