#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dcsgd {

// Dense point in d-dimensional parameter space. Length is fixed by the
// problem dimension; all coordinates are expected to be finite.
using ParamVec = std::vector<double>;

// l2 ball the optimizer projects onto.
struct FeasibleSet {
  ParamVec center;
  double radius = 0.0;

  double diameter() const { return 2.0 * radius; }
};

// Origin-centered ball; radius large enough that constraints stay inactive
// in the synthetic experiments while keeping the diameter finite.
FeasibleSet default_feasible_set(std::size_t dim, double radius = 1e6);

double dot(const ParamVec& a, const ParamVec& b);
double norm2(const ParamVec& a);
double distance2(const ParamVec& a, const ParamVec& b);

// a + s*b
ParamVec axpy(const ParamVec& a, double s, const ParamVec& b);
void add_inplace(ParamVec& a, const ParamVec& b);
void scale_inplace(ParamVec& a, double s);

// Euclidean projection onto `set`. Interior points are returned unchanged
// (bitwise); exterior points are radially rescaled onto the sphere. The
// result always satisfies ||result - center|| <= radius, so projecting a
// second time is an exact no-op.
ParamVec project(const ParamVec& w, const FeasibleSet& set);

// Lower empirical quantile: the order statistic of rank ceil(q*n), clamped
// to [1, n]. Deterministic in the input multiset.
double quantile(std::span<const double> xs, double q);

// Odd n: middle order statistic. Even n: mean of the two middle ones.
double scalar_median(std::span<const double> xs);

}  // namespace dcsgd
