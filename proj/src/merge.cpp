#include "dcsgd/merge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dcsgd {

namespace {

std::size_t checked_dim(const CandidateSet& cands, const char* what) {
  if (cands.empty()) throw std::invalid_argument(std::string(what) + ": empty candidate set");
  const std::size_t d = cands.front().size();
  for (const ParamVec& u : cands) {
    if (u.size() != d) throw std::invalid_argument(std::string(what) + ": mixed dimensions");
  }
  return d;
}

}  // namespace

double geomed_objective(const ParamVec& v, const CandidateSet& cands) {
  double acc = 0.0;
  for (const ParamVec& u : cands) acc += distance2(v, u);
  return acc;
}

namespace {

// Exact first-order test for an anchor point: u_j minimizes the objective
// iff the pull of the other points, || sum_{i: u_i != u_j} (u_i - u_j)/d_i ||,
// does not exceed the multiplicity of u_j. Plain Weiszfeld crawls toward
// optimal anchors, so they are detected and returned directly.
bool anchor_is_optimal(const CandidateSet& cands, std::size_t j) {
  const std::size_t d = cands[j].size();
  ParamVec pull(d, 0.0);
  double multiplicity = 0.0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const double dist = distance2(cands[i], cands[j]);
    if (dist == 0.0) {
      multiplicity += 1.0;
      continue;
    }
    for (std::size_t c = 0; c < d; ++c) pull[c] += (cands[i][c] - cands[j][c]) / dist;
  }
  return norm2(pull) <= multiplicity + 1e-12;
}

}  // namespace

ParamVec geometric_median(const CandidateSet& cands, double tol, int max_iter,
                          std::vector<double>* objective_trace) {
  const std::size_t d = checked_dim(cands, "geometric_median");
  const std::size_t k = cands.size();
  if (tol <= 0.0 || max_iter < 1) throw std::invalid_argument("geometric_median: bad tol/max_iter");
  if (k == 1) return cands.front();

  std::size_t best_anchor = 0;
  double best_anchor_objective = geomed_objective(cands[0], cands);
  for (std::size_t j = 1; j < k; ++j) {
    const double f = geomed_objective(cands[j], cands);
    if (f < best_anchor_objective) {
      best_anchor_objective = f;
      best_anchor = j;
    }
  }
  if (anchor_is_optimal(cands, best_anchor)) {
    if (objective_trace) objective_trace->push_back(best_anchor_objective);
    return cands[best_anchor];
  }

  ParamVec x(d, 0.0);
  for (const ParamVec& u : cands) add_inplace(x, u);
  scale_inplace(x, 1.0 / static_cast<double>(k));
  if (objective_trace) objective_trace->push_back(geomed_objective(x, cands));

  constexpr double kEps = 1e-12;
  ParamVec next(d);
  for (int it = 0; it < max_iter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    double wsum = 0.0;
    for (const ParamVec& u : cands) {
      const double w = 1.0 / (distance2(x, u) + kEps);
      wsum += w;
      for (std::size_t i = 0; i < d; ++i) next[i] += w * u[i];
    }
    for (std::size_t i = 0; i < d; ++i) next[i] /= wsum;
    const double moved = distance2(next, x);
    x = next;
    if (objective_trace) objective_trace->push_back(geomed_objective(x, cands));
    if (moved < tol) break;
  }
  // A nearly-optimal anchor can still beat a slow final approach.
  if (best_anchor_objective < geomed_objective(x, cands)) return cands[best_anchor];
  return x;
}

ParamVec smallest_ball(const CandidateSet& cands, std::optional<double> beta) {
  checked_dim(cands, "smallest_ball");
  const std::size_t k = cands.size();
  if (k == 1) return cands.front();
  std::size_t threshold;
  if (beta) {
    if (!(*beta > 0.0 && *beta < 0.5)) throw std::invalid_argument("smallest_ball: beta outside (0,1/2)");
    threshold = static_cast<std::size_t>(std::ceil(static_cast<double>(k) * (*beta + 0.5)));
  } else {
    threshold = k / 2 + 1;  // bare majority
  }
  threshold = std::clamp<std::size_t>(threshold, 1, k);

  std::size_t best = 0;
  double best_radius = std::numeric_limits<double>::infinity();
  std::vector<double> dists(k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = 0; l < k; ++l) dists[l] = distance2(cands[j], cands[l]);
    auto nth = dists.begin() + static_cast<std::ptrdiff_t>(threshold - 1);
    std::nth_element(dists.begin(), nth, dists.end());
    if (*nth < best_radius) {
      best_radius = *nth;
      best = j;
    }
  }
  return cands[best];
}

ParamVec coordinate_median(const CandidateSet& cands) {
  const std::size_t d = checked_dim(cands, "coordinate_median");
  const std::size_t k = cands.size();
  ParamVec out(d);
  std::vector<double> column(k);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < k; ++j) column[j] = cands[j][i];
    out[i] = scalar_median(column);
  }
  return out;
}

ParamVec merge(const MergeRule& rule, const CandidateSet& cands) {
  switch (rule.kind) {
    case MergeKind::GeoMed:
      return geometric_median(cands, rule.tol, rule.max_iter);
    case MergeKind::SmBall:
      return smallest_ball(cands, rule.beta);
    case MergeKind::CoordMedian:
      return coordinate_median(cands);
  }
  throw std::logic_error("merge: unknown rule");
}

double radius_gamma(const ParamVec& u, double gamma, const CandidateSet& cands) {
  const std::size_t d = checked_dim(cands, "radius_gamma");
  if (u.size() != d) throw std::invalid_argument("radius_gamma: dimension mismatch");
  if (!(gamma >= 0.0 && gamma < 0.5)) throw std::invalid_argument("radius_gamma: gamma outside [0,1/2)");
  const std::size_t k = cands.size();
  std::vector<double> dists(k);
  for (std::size_t j = 0; j < k; ++j) dists[j] = distance2(cands[j], u);
  std::sort(dists.begin(), dists.end());
  // strictly more than k(1/2+gamma) points inside the ball
  std::size_t need = static_cast<std::size_t>(std::floor(static_cast<double>(k) * (0.5 + gamma))) + 1;
  if (need > k) need = k;  // full-majority limit: farthest candidate
  return dists[need - 1];
}

double merge_constant(const MergeRule& rule, std::size_t dim, double gamma) {
  switch (rule.kind) {
    case MergeKind::GeoMed:
      if (!(gamma > 0.0 && gamma < 0.5)) throw std::invalid_argument("merge_constant: geomed needs gamma in (0,1/2)");
      return 1.0 + 1.0 / (2.0 * gamma);
    case MergeKind::SmBall:
      if (!(gamma >= 0.0 && gamma < 0.5)) throw std::invalid_argument("merge_constant: smball needs gamma in [0,1/2)");
      return 3.0;
    case MergeKind::CoordMedian:
      if (!(gamma > 0.0 && gamma < 0.5)) throw std::invalid_argument("merge_constant: median needs gamma in (0,1/2)");
      return std::sqrt(static_cast<double>(dim)) * (1.0 + 1.0 / (2.0 * gamma));
  }
  throw std::logic_error("merge_constant: unknown rule");
}

bool check_merge_requirement(const MergeRule& rule, const CandidateSet& cands, const ParamVec& u,
                             double gamma) {
  const std::size_t d = checked_dim(cands, "check_merge_requirement");
  const double c = merge_constant(rule, d, gamma);
  const ParamVec merged = merge(rule, cands);
  const double lhs = distance2(merged, u);
  const double rhs = c * radius_gamma(u, gamma, cands);
  return lhs <= rhs + 1e-9 * std::max(1.0, rhs);
}

}  // namespace dcsgd
