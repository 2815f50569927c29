#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dcsgd/merge.hpp"
#include "dcsgd/synthetic.hpp"

namespace dcsgd {

struct PropertyReport {
  std::string name;
  int instances = 0;
  int failures = 0;
  double worst_margin = 0.0;  // worst observed lhs/rhs ratio (or violation)
};

// Random candidate clouds and probe points; asserts the merge requirement
// ||merge(cands) - u|| <= c_gamma * radius(u; gamma) at every admissible
// gamma on a fixed grid. The guarantee is deterministic: zero failures expected.
PropertyReport check_merge_deviation(const MergeRule& rule, int n_clouds, int k, int d, std::uint64_t seed);

// excess_risk(w) >= (lambda/2) ||w - w*||^2 with lambda = 2 min Sigma_jj.
PropertyReport check_quadratic_growth(const QuadraticProblem& problem, int n_points,
                                      std::uint64_t seed);

// 0 <= R(u) - R(v) - <grad R(v), u - v> <= (beta/2) ||u - v||^2 with
// beta = 2 max Sigma_jj; exact for the quadratic risk.
PropertyReport check_smoothness(const QuadraticProblem& problem, int n_pairs, std::uint64_t seed);

// Empirical majority probability against the Hoeffding lower bound
// 1 - exp(-2k (p_good - 1/2)^2), within three Monte-Carlo standard errors.
PropertyReport check_majority_concentration(int k, double p_good, int trials, std::uint64_t seed);

// The full battery behind the `verify` CLI verb; reports are printed to
// `log` when given. Returns the total failure count.
int run_verification_battery(std::uint64_t seed, std::ostream* log,
                             std::vector<PropertyReport>* reports = nullptr);

}  // namespace dcsgd
