#pragma once

#include "econv/convex_set.hpp"
#include "econv/function_model.hpp"

#include <random>

namespace econv::testing {

inline FlaggedConvexSet interval_set(double lo, bool lo_closed, double hi, bool hi_closed) {
  std::vector<XHalfspace> hs;
  if (std::isfinite(lo)) {
    hs.push_back({Vec{-1.0}, -lo, !lo_closed});
  }
  if (std::isfinite(hi)) {
    hs.push_back({Vec{1.0}, hi, !hi_closed});
  }
  return FlaggedConvexSet(1, hs);
}

inline FlaggedConvexSet positive_axis() { return interval_set(0.0, false, INFINITY, false); }

/// {0 < x <= 1, y <= x, y > 0}
inline FlaggedConvexSet wedge_e() {
  return FlaggedConvexSet(2, {{Vec{1.0, 0.0}, 1.0, false}, {Vec{-1.0, 1.0}, 0.0, false}, {Vec{0.0, -1.0}, 0.0, true}});
}

/// {x + y < 2}
inline FlaggedConvexSet open_halfplane() { return FlaggedConvexSet(2, {{Vec{1.0, 1.0}, 2.0, true}}); }

inline FunctionModel square_on_positive() {
  return FunctionModel::quadratic(Matrix::diagonal(Vec{1.0}), Vec{0.0}, 0.0, positive_axis());
}

inline FunctionModel square_on_line() {
  return FunctionModel::quadratic(Matrix::diagonal(Vec{1.0}), Vec{0.0}, 0.0, FlaggedConvexSet::whole_space(1));
}

inline FunctionModel identity_on_positive() {
  return FunctionModel::quadratic(Matrix::zero(1), Vec{1.0}, 0.0, positive_axis());
}

inline FunctionModel xlogxy_example() { return FunctionModel::xlogxy(wedge_e(), true); }

inline FunctionModel halfplane_indicator() { return FunctionModel::indicator(open_halfplane()); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

} // namespace econv::testing
