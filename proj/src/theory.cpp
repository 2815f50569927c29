#include "dcsgd/theory.hpp"

#include <cmath>
#include <ostream>

#include "dcsgd/boosting.hpp"
#include "dcsgd/rng.hpp"

namespace dcsgd {

namespace {

// Clouds mixing a tight cluster with scattered far points, so gamma-majority
// radii are exercised both near zero and large.
CandidateSet random_cloud(Rng& rng, int k, int d) {
  CandidateSet cloud;
  cloud.reserve(static_cast<std::size_t>(k));
  ParamVec center(static_cast<std::size_t>(d));
  for (double& c : center) c = rng.uniform(-2.0, 2.0);
  for (int j = 0; j < k; ++j) {
    ParamVec u(static_cast<std::size_t>(d));
    const bool outlier = rng.uniform01() < 0.3;
    const double spread = outlier ? 50.0 : 1.0;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = center[i] + spread * rng.normal();
    cloud.push_back(std::move(u));
  }
  return cloud;
}

ParamVec random_probe(Rng& rng, const CandidateSet& cloud) {
  const std::size_t d = cloud.front().size();
  const double which = rng.uniform01();
  if (which < 0.4) {  // centroid-ish
    ParamVec u(d, 0.0);
    for (const ParamVec& c : cloud) add_inplace(u, c);
    scale_inplace(u, 1.0 / static_cast<double>(cloud.size()));
    for (double& x : u) x += 0.1 * rng.normal();
    return u;
  }
  if (which < 0.7) {  // one of the candidates
    const std::size_t j = static_cast<std::size_t>(rng.next_u64() % cloud.size());
    return cloud[j];
  }
  ParamVec u(d);
  for (double& x : u) x = 10.0 * rng.normal();
  return u;
}

}  // namespace

PropertyReport check_merge_deviation(const MergeRule& rule, int n_clouds, int k, int d, std::uint64_t seed) {
  PropertyReport rep;
  rep.name = "merge-requirement";
  Rng rng(seed);
  std::vector<double> gammas;
  if (rule.kind == MergeKind::SmBall) gammas.push_back(0.0);
  for (double g = 0.05; g < 0.46; g += 0.05) gammas.push_back(g);

  for (int c = 0; c < n_clouds; ++c) {
    const CandidateSet cloud = random_cloud(rng, k, d);
    const ParamVec merged = merge(rule, cloud);
    const ParamVec probe = random_probe(rng, cloud);
    for (double gamma : gammas) {
      ++rep.instances;
      const double cg = merge_constant(rule, cloud.front().size(), gamma);
      const double lhs = distance2(merged, probe);
      const double rhs = cg * radius_gamma(probe, gamma, cloud);
      if (lhs > rhs + 1e-9 * std::max(1.0, rhs)) {
        ++rep.failures;
      }
      if (rhs > 0.0) rep.worst_margin = std::max(rep.worst_margin, lhs / rhs);
    }
  }
  return rep;
}

PropertyReport check_quadratic_growth(const QuadraticProblem& problem, int n_points,
                                      std::uint64_t seed) {
  PropertyReport rep;
  rep.name = "quadratic-growth";
  Rng rng(seed);
  double lambda = 2.0 * problem.sigma_diag().front();
  for (double s : problem.sigma_diag()) lambda = std::min(lambda, 2.0 * s);
  for (int i = 0; i < n_points; ++i) {
    ++rep.instances;
    ParamVec w(problem.dim());
    for (std::size_t j = 0; j < w.size(); ++j) {
      w[j] = problem.w_star()[j] + 10.0 * rng.normal();
    }
    const double lhs = problem.excess_risk(w);
    double dist_sq = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double dj = w[j] - problem.w_star()[j];
      dist_sq += dj * dj;
    }
    const double rhs = 0.5 * lambda * dist_sq;
    const double margin = lhs - rhs;
    rep.worst_margin = std::min(i == 0 ? margin : rep.worst_margin, margin);
    if (margin < -1e-12) ++rep.failures;
  }
  return rep;
}

PropertyReport check_smoothness(const QuadraticProblem& problem, int n_pairs, std::uint64_t seed) {
  PropertyReport rep;
  rep.name = "smoothness";
  Rng rng(seed);
  double beta = 0.0;
  for (double s : problem.sigma_diag()) beta = std::max(beta, 2.0 * s);
  const auto& diag = problem.sigma_diag();
  const auto& ws = problem.w_star();
  auto risk_gap = [&](const ParamVec& u, const ParamVec& v) {
    // R(u) - R(v) - <grad R(v), u - v> for the diagonal quadratic risk.
    double gap = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double du = u[j] - ws[j];
      const double dv = v[j] - ws[j];
      gap += diag[j] * (du * du - dv * dv) - 2.0 * diag[j] * dv * (u[j] - v[j]);
    }
    return gap;
  };
  for (int i = 0; i < n_pairs; ++i) {
    ++rep.instances;
    ParamVec u(problem.dim()), v(problem.dim());
    for (std::size_t j = 0; j < u.size(); ++j) {
      u[j] = ws[j] + 8.0 * rng.normal();
      v[j] = ws[j] + 8.0 * rng.normal();
    }
    const double gap = risk_gap(u, v);
    double dist_sq = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double dj = u[j] - v[j];
      dist_sq += dj * dj;
    }
    const double upper = 0.5 * beta * dist_sq;
    const double slack = 1e-9 * std::max(1.0, upper);
    if (gap < -slack || gap > upper + slack) ++rep.failures;
    if (upper > 0.0) rep.worst_margin = std::max(rep.worst_margin, gap / upper);
  }
  return rep;
}

PropertyReport check_majority_concentration(int k, double p_good, int trials, std::uint64_t seed) {
  PropertyReport rep;
  rep.name = "majority-concentration";
  rep.instances = trials;
  const double p_hat = majority_boost_probability(p_good, k, trials, seed);
  const double gap = p_good - 0.5;
  const double bound = 1.0 - std::exp(-2.0 * static_cast<double>(k) * gap * gap);
  const double se = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
  if (p_hat < bound - 3.0 * se) rep.failures = 1;
  rep.worst_margin = p_hat - bound;
  return rep;
}

int run_verification_battery(std::uint64_t seed, std::ostream* log,
                             std::vector<PropertyReport>* reports) {
  std::vector<PropertyReport> all;
  const MergeRule geomed{MergeKind::GeoMed, std::nullopt, 1e-10, 1000};
  const MergeRule smball{MergeKind::SmBall, std::nullopt, 1e-10, 1000};
  const MergeRule median{MergeKind::CoordMedian, std::nullopt, 1e-10, 1000};
  auto named = [](PropertyReport r, const std::string& suffix) {
    r.name += "/" + suffix;
    return r;
  };
  all.push_back(named(check_merge_deviation(geomed, 400, 15, 5, mix_seed(seed, 1)), "geomed"));
  all.push_back(named(check_merge_deviation(smball, 400, 15, 5, mix_seed(seed, 2)), "smball"));
  all.push_back(named(check_merge_deviation(median, 400, 15, 5, mix_seed(seed, 3)), "median"));

  const QuadraticProblem ident =
      make_problem(8, 64, Curvature::Identity, NoiseModel{NoiseFamily::Normal, 2.2}, mix_seed(seed, 4));
  const QuadraticProblem flat = make_problem(8, 64, Curvature::HalfFlat,
                                             NoiseModel{NoiseFamily::LogNormal, 1.75}, mix_seed(seed, 5));
  all.push_back(named(check_quadratic_growth(ident, 2000, mix_seed(seed, 6)), "identity"));
  all.push_back(named(check_quadratic_growth(flat, 2000, mix_seed(seed, 7)), "half-flat"));
  all.push_back(named(check_smoothness(ident, 2000, mix_seed(seed, 8)), "identity"));
  all.push_back(named(check_smoothness(flat, 2000, mix_seed(seed, 9)), "half-flat"));
  all.push_back(check_majority_concentration(20, 0.75, 20000, mix_seed(seed, 10)));

  int failures = 0;
  for (const PropertyReport& r : all) {
    failures += r.failures;
    if (log) {
      *log << (r.failures == 0 ? "[pass] " : "[FAIL] ") << r.name << ": instances=" << r.instances
           << " failures=" << r.failures << " worst_margin=" << r.worst_margin << '\n';
    }
  }
  if (reports) *reports = std::move(all);
  return failures;
}

}  // namespace dcsgd
