#pragma once

#include <optional>
#include <vector>

#include "dcsgd/vec.hpp"

namespace dcsgd {

// Robust integration of k candidate parameter vectors. Each rule maps the
// candidate set to a point close to any gamma-majority of the candidates:
// ||merge(cands) - u|| <= c_gamma * radius_gamma(u, gamma, cands) for every
// probe point u, with c_gamma depending on the rule.

enum class MergeKind { GeoMed, SmBall, CoordMedian };

struct MergeRule {
  MergeKind kind = MergeKind::GeoMed;
  std::optional<double> beta;  // SmBall majority margin in (0,1/2); unset = bare majority
  double tol = 1e-10;          // GeoMed iterate-movement stopping tolerance
  int max_iter = 1000;
};

using CandidateSet = std::vector<ParamVec>;

// Weiszfeld iteration for argmin_v sum_j ||v - u_j||, started from the
// coordinate-wise mean, with distance denominators regularized by 1e-12 so
// iterates landing on data points stay defined. If `objective_trace` is
// given it receives the objective value at the start and after every update.
ParamVec geometric_median(const CandidateSet& cands, double tol = 1e-10, int max_iter = 1000,
                          std::vector<double>* objective_trace = nullptr);

double geomed_objective(const ParamVec& v, const CandidateSet& cands);

// Returns the candidate whose distance to its ceil(k(beta+1/2))-th nearest
// candidate is smallest (ties broken by smallest index). With no beta the
// threshold is the bare majority floor(k/2)+1.
ParamVec smallest_ball(const CandidateSet& cands, std::optional<double> beta = std::nullopt);

ParamVec coordinate_median(const CandidateSet& cands);

ParamVec merge(const MergeRule& rule, const CandidateSet& cands);

// Radius of the smallest ball centered at u containing strictly more than
// k(1/2+gamma) of the candidates.
double radius_gamma(const ParamVec& u, double gamma, const CandidateSet& cands);

// c_gamma for the rule: 1 + 1/(2 gamma) for GeoMed, 3 for SmBall,
// sqrt(d)(1 + 1/(2 gamma)) for CoordMedian in the l2 norm.
double merge_constant(const MergeRule& rule, std::size_t dim, double gamma);

// Checks ||merge(cands) - u|| <= c_gamma * radius_gamma(u; gamma) with 1e-9
// floating-point slack. GeoMed/CoordMedian admit gamma in (0,1/2), SmBall
// admits [0,1/2).
bool check_merge_requirement(const MergeRule& rule, const CandidateSet& cands, const ParamVec& u,
                             double gamma);

}  // namespace dcsgd
