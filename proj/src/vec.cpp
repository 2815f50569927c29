#include "dcsgd/vec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dcsgd {

namespace {

void require_same_dim(const ParamVec& a, const ParamVec& b, const char* what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

}  // namespace

FeasibleSet default_feasible_set(std::size_t dim, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("feasible set: radius must be positive");
  return FeasibleSet{ParamVec(dim, 0.0), radius};
}

double dot(const ParamVec& a, const ParamVec& b) {
  require_same_dim(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(const ParamVec& a) { return std::sqrt(dot(a, a)); }

double distance2(const ParamVec& a, const ParamVec& b) {
  require_same_dim(a, b, "distance2");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

ParamVec axpy(const ParamVec& a, double s, const ParamVec& b) {
  require_same_dim(a, b, "axpy");
  ParamVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * b[i];
  return out;
}

void add_inplace(ParamVec& a, const ParamVec& b) {
  require_same_dim(a, b, "add_inplace");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

void scale_inplace(ParamVec& a, double s) {
  for (double& x : a) x *= s;
}

ParamVec project(const ParamVec& w, const FeasibleSet& set) {
  require_same_dim(w, set.center, "project");
  const double dist = distance2(w, set.center);
  if (dist <= set.radius) return w;
  ParamVec out(w.size());
  double scale = set.radius / dist;
  for (;;) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      out[i] = set.center[i] + scale * (w[i] - set.center[i]);
    }
    // Rounding can land a hair outside; shrink until the result is a fixed
    // point of the projection.
    if (distance2(out, set.center) <= set.radius) break;
    scale = std::nextafter(scale, 0.0);
  }
  return out;
}

double quantile(std::span<const double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile: empty input");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0,1]");
  const std::size_t n = xs.size();
  auto rank = static_cast<long long>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<long long>(rank, 1, static_cast<long long>(n));
  std::vector<double> tmp(xs.begin(), xs.end());
  auto nth = tmp.begin() + (rank - 1);
  std::nth_element(tmp.begin(), nth, tmp.end());
  return *nth;
}

double scalar_median(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("scalar_median: empty input");
  const std::size_t n = xs.size();
  std::vector<double> tmp(xs.begin(), xs.end());
  auto mid = tmp.begin() + n / 2;
  std::nth_element(tmp.begin(), mid, tmp.end());
  if (n % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(tmp.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace dcsgd
