#pragma once

#include "econv/coupling.hpp"
#include "econv/ext_real.hpp"
#include "econv/tolerance.hpp"
#include "econv/vec.hpp"

#include <optional>
#include <vector>

namespace econv {

/// Supremum of a linear functional over a set, plus whether it is attained.
/// `attained` is only ever true for a finite value.
struct SupportValue {
  ExtReal value;
  bool attained = false;
};

/// A real interval whose ends may be open, closed or infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;
  bool empty = false;

  bool contains(double t) const;
  /// A point of the interval away from its ends where possible. Requires !empty.
  double pick() const;
  static Interval empty_interval() { return {0.0, 0.0, false, false, true}; }
};

/// Finite intersection of halfspaces, each either open (strict) or closed.
/// Such a set is evenly convex; an empty halfspace list is all of R^n.
class FlaggedConvexSet {
public:
  FlaggedConvexSet() = default;
  explicit FlaggedConvexSet(std::size_t dim, std::vector<XHalfspace> halfspaces = {});

  static FlaggedConvexSet whole_space(std::size_t dim) { return FlaggedConvexSet(dim); }

  std::size_t dim() const { return dim_; }
  const std::vector<XHalfspace>& halfspaces() const { return halfspaces_; }

  FlaggedConvexSet intersect(const FlaggedConvexSet& other) const;
  FlaggedConvexSet closure() const;

  /// Exact image {<x, d> : x in C} computed by Fourier-Motzkin elimination,
  /// which keeps track of strict inequalities.
  Interval project(const Vec& d) const;

  /// Section {t : p + t v in C}, of the closure unless `keep_strict`.
  Interval line_section(const Point& p, const Vec& v, bool keep_strict = false) const;

  /// Some point of C (strict constraints honoured), nothing when C is empty.
  std::optional<Point> some_point() const;

  bool is_empty() const;
  /// Bounded in every coordinate direction.
  bool is_bounded() const;

private:
  std::size_t dim_ = 0;
  std::vector<XHalfspace> halfspaces_;
};

bool member(const FlaggedConvexSet& c, const Point& x, const TolerancePolicy& tol = TolerancePolicy::exact());

/// sup_{x in C} <x, d> with attainment. Throws EmptySet when C is empty;
/// an unbounded supremum is (+inf, attained = false).
SupportValue support(const FlaggedConvexSet& c, const Vec& d);

/// A direction x* with <x - x0, x*> < 0 for every x in C when x0 is not in C;
/// nothing when x0 is in C. The direction is the normal of a violated
/// constraint, certified through the attainment-aware support function.
/// Throws SearchFailed when no violated constraint certifies (GRID rounding band).
std::optional<Vec> strictly_separates(const FlaggedConvexSet& c, const Point& x0,
                                      const TolerancePolicy& tol = TolerancePolicy::exact());

/// u in N(C, x0) iff sup_{x in C} <x - x0, u> <= 0. Throws PointNotInSet when x0 is not in C.
bool normal_cone_member(const FlaggedConvexSet& c, const Point& x0, const Vec& u,
                        const TolerancePolicy& tol = TolerancePolicy::exact());

/// A flagged set together with finitely many adjoined points. Effective
/// domains such as E u {(0,0)} are not halfspace intersections; this keeps
/// the isolated points explicit.
struct AugmentedSet {
  FlaggedConvexSet base;
  std::vector<Point> adjoined;
  /// When false the base set contributes no points (only `adjoined` remain).
  bool base_active = true;

  std::size_t dim() const { return base.dim(); }
  bool is_empty() const;
  AugmentedSet intersect(const AugmentedSet& other) const;
};

bool member(const AugmentedSet& c, const Point& x, const TolerancePolicy& tol = TolerancePolicy::exact());
SupportValue support(const AugmentedSet& c, const Vec& d);
bool normal_cone_member(const AugmentedSet& c, const Point& x0, const Vec& u,
                        const TolerancePolicy& tol = TolerancePolicy::exact());

/// Exact inclusion `inner` subset of `outer` for the halfspace part of
/// `outer` (adjoined points of `outer` only cover adjoined points or a
/// singleton base of `inner`).
bool subset_of(const AugmentedSet& inner, const AugmentedSet& outer);

/// Relative width of the band in which an EXACT support value is treated as
/// equal to a level; covers the rounding of sums of computed levels.
inline constexpr double kTieBand = 1e-12;

/// dom subset of H^<_{u*, alpha}, decided by the attainment-aware support.
bool inside_open_halfspace(const AugmentedSet& dom, const Vec& ustar, double alpha,
                           const TolerancePolicy& tol = TolerancePolicy::exact());

} // namespace econv
