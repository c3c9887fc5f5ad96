#include "econv/convex_set.hpp"

#include "econv/errors.hpp"

#include <algorithm>
#include <cmath>

namespace econv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative threshold below which an eliminated coefficient counts as zero.
constexpr double kZeroRel = 1e-12;

/// gamma * t (<|<=) delta
struct Bound1 {
  double gamma;
  double delta;
  bool strict;
};

/// alpha * t + beta * s (<|<=) b
struct Row2 {
  double alpha;
  double beta;
  double b;
  bool strict;
};

double scale_of(std::initializer_list<double> xs) {
  double m = 1.0;
  for (double x : xs) {
    m = std::max(m, std::abs(x));
  }
  return m;
}

/// Reduce one-dimensional constraints to an interval.
Interval solve_1d(const std::vector<Bound1>& rows) {
  Interval out;
  for (const Bound1& r : rows) {
    const double sc = scale_of({r.gamma, r.delta});
    if (std::abs(r.gamma) <= kZeroRel * sc) {
      // 0 (<|<=) delta
      const double d = std::abs(r.delta) <= kZeroRel * sc ? 0.0 : r.delta;
      if (d < 0.0 || (r.strict && d == 0.0)) {
        return Interval::empty_interval();
      }
      continue;
    }
    const double bound = r.delta / r.gamma;
    if (r.gamma > 0.0) {
      if (bound < out.hi) {
        out.hi = bound;
        out.hi_closed = !r.strict;
      } else if (bound == out.hi && r.strict) {
        out.hi_closed = false;
      }
    } else {
      if (bound > out.lo) {
        out.lo = bound;
        out.lo_closed = !r.strict;
      } else if (bound == out.lo && r.strict) {
        out.lo_closed = false;
      }
    }
  }
  if (std::isfinite(out.lo) && std::isfinite(out.hi)) {
    const double tol = kZeroRel * scale_of({out.lo, out.hi});
    if (out.lo > out.hi + tol) {
      return Interval::empty_interval();
    }
    if (std::abs(out.lo - out.hi) <= tol) {
      if (!out.lo_closed || !out.hi_closed) {
        return Interval::empty_interval();
      }
      out.hi = out.lo;
    }
  }
  return out;
}

Interval fourier_motzkin(const std::vector<Row2>& rows) {
  std::vector<Bound1> bounds;
  std::vector<const Row2*> pos;
  std::vector<const Row2*> neg;
  for (const Row2& r : rows) {
    if (std::abs(r.beta) <= kZeroRel * scale_of({r.alpha, r.beta})) {
      bounds.push_back({r.alpha, r.b, r.strict});
    } else if (r.beta > 0.0) {
      pos.push_back(&r);
    } else {
      neg.push_back(&r);
    }
  }
  for (const Row2* p : pos) {
    for (const Row2* n : neg) {
      const double bp = p->beta;
      const double bn = -n->beta;
      bounds.push_back({p->alpha / bp + n->alpha / bn, p->b / bp + n->b / bn, p->strict || n->strict});
    }
  }
  return solve_1d(bounds);
}

bool satisfies(const XHalfspace& h, const Point& x, const TolerancePolicy& tol) {
  const double v = dot(h.normal, x);
  return h.strict ? tol.less(v, h.level) : tol.less_equal(v, h.level);
}

bool points_equal(const Point& a, const Point& b, const TolerancePolicy& tol) {
  if (a.size() != b.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > (tol.is_exact() ? 0.0 : tol.eq_tol)) {
      return false;
    }
  }
  return true;
}

} // namespace

bool Interval::contains(double t) const {
  if (empty) {
    return false;
  }
  const bool above = lo_closed ? t >= lo : t > lo;
  const bool below = hi_closed ? t <= hi : t < hi;
  return above && below;
}

double Interval::pick() const {
  const bool has_lo = std::isfinite(lo);
  const bool has_hi = std::isfinite(hi);
  if (has_lo && has_hi) {
    return lo == hi ? lo : lo + 0.5 * (hi - lo);
  }
  if (has_lo) {
    return lo + 1.0;
  }
  if (has_hi) {
    return hi - 1.0;
  }
  return 0.0;
}

FlaggedConvexSet::FlaggedConvexSet(std::size_t dim, std::vector<XHalfspace> halfspaces)
    : dim_(dim), halfspaces_(std::move(halfspaces)) {
  if (dim_ < 1 || dim_ > Vec::kMaxDim) {
    throw DimensionMismatch("FlaggedConvexSet: dimension must be 1 or 2");
  }
  for (const XHalfspace& h : halfspaces_) {
    if (h.normal.size() != dim_) {
      throw DimensionMismatch("FlaggedConvexSet: halfspace normal has wrong dimension");
    }
    if (!std::isfinite(h.level)) {
      throw Error("FlaggedConvexSet: non-finite halfspace level");
    }
  }
}

FlaggedConvexSet FlaggedConvexSet::intersect(const FlaggedConvexSet& other) const {
  if (other.dim_ != dim_) {
    throw DimensionMismatch("FlaggedConvexSet::intersect: dimension mismatch");
  }
  std::vector<XHalfspace> hs = halfspaces_;
  hs.insert(hs.end(), other.halfspaces_.begin(), other.halfspaces_.end());
  return FlaggedConvexSet(dim_, std::move(hs));
}

FlaggedConvexSet FlaggedConvexSet::closure() const {
  if (is_empty()) {
    return *this;
  }
  std::vector<XHalfspace> hs = halfspaces_;
  for (XHalfspace& h : hs) {
    h.strict = false;
  }
  return FlaggedConvexSet(dim_, std::move(hs));
}

Interval FlaggedConvexSet::project(const Vec& d) const {
  if (d.size() != dim_) {
    throw DimensionMismatch("FlaggedConvexSet::project: direction dimension mismatch");
  }
  if (d.is_zero()) {
    Vec e(dim_, 0.0);
    e[0] = 1.0;
    if (project(e).empty) {
      return Interval::empty_interval();
    }
    return {0.0, 0.0, true, true, false};
  }
  std::vector<Row2> rows;
  rows.reserve(halfspaces_.size());
  if (dim_ == 1) {
    for (const XHalfspace& h : halfspaces_) {
      rows.push_back({h.normal[0] / d[0], 0.0, h.level, h.strict});
    }
  } else {
    // x = t d / |d|^2 + s p with p orthogonal to d
    const double dd = dot(d, d);
    const Vec p{-d[1], d[0]};
    for (const XHalfspace& h : halfspaces_) {
      rows.push_back({dot(h.normal, d) / dd, dot(h.normal, p), h.level, h.strict});
    }
  }
  return fourier_motzkin(rows);
}

Interval FlaggedConvexSet::line_section(const Point& p, const Vec& v, bool keep_strict) const {
  require_same_dim(p, v, "line_section");
  std::vector<Bound1> rows;
  rows.reserve(halfspaces_.size());
  for (const XHalfspace& h : halfspaces_) {
    rows.push_back({dot(h.normal, v), h.level - dot(h.normal, p), keep_strict && h.strict});
  }
  return solve_1d(rows);
}

std::optional<Point> FlaggedConvexSet::some_point() const {
  Vec e(dim_, 0.0);
  e[0] = 1.0;
  const Interval first = project(e);
  if (first.empty) {
    return std::nullopt;
  }
  Point x(dim_, 0.0);
  x[0] = first.pick();
  if (dim_ == 2) {
    const Interval second = line_section(x, Vec{0.0, 1.0}, true);
    if (second.empty) {
      return std::nullopt;
    }
    x[1] = second.pick();
  }
  return x;
}

bool FlaggedConvexSet::is_empty() const {
  Vec e(dim_, 0.0);
  e[0] = 1.0;
  return project(e).empty;
}

bool FlaggedConvexSet::is_bounded() const {
  for (std::size_t i = 0; i < dim_; ++i) {
    Vec e(dim_, 0.0);
    e[i] = 1.0;
    const Interval iv = project(e);
    if (iv.empty) {
      return true;
    }
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      return false;
    }
  }
  return true;
}

bool member(const FlaggedConvexSet& c, const Point& x, const TolerancePolicy& tol) {
  if (x.size() != c.dim()) {
    throw DimensionMismatch("member: point dimension mismatch");
  }
  return std::all_of(c.halfspaces().begin(), c.halfspaces().end(),
                     [&](const XHalfspace& h) { return satisfies(h, x, tol); });
}

SupportValue support(const FlaggedConvexSet& c, const Vec& d) {
  const Interval iv = c.project(d);
  if (iv.empty) {
    throw EmptySet("support: set is empty");
  }
  if (!std::isfinite(iv.hi)) {
    return {ExtReal::pos_inf(), false};
  }
  return {iv.hi, iv.hi_closed};
}

std::optional<Vec> strictly_separates(const FlaggedConvexSet& c, const Point& x0, const TolerancePolicy& tol) {
  if (member(c, x0, tol)) {
    return std::nullopt;
  }
  for (const XHalfspace& h : c.halfspaces()) {
    if (satisfies(h, x0, tol) || h.normal.is_zero()) {
      continue;
    }
    const SupportValue s = support(c, h.normal);
    const double at_x0 = dot(h.normal, x0);
    const double sup = s.value.value();
    const bool certified = tol.is_exact() ? (sup < at_x0 || (sup == at_x0 && !s.attained))
                                          : (sup < at_x0 - tol.margin(sup, at_x0) || (!s.attained && sup <= at_x0));
    if (certified) {
      return h.normal;
    }
  }
  throw SearchFailed("strictly_separates: no certified separator at the configured tolerance");
}

bool normal_cone_member(const FlaggedConvexSet& c, const Point& x0, const Vec& u, const TolerancePolicy& tol) {
  return normal_cone_member(AugmentedSet{c, {}, true}, x0, u, tol);
}

bool AugmentedSet::is_empty() const { return (!base_active || base.is_empty()) && adjoined.empty(); }

AugmentedSet AugmentedSet::intersect(const AugmentedSet& other) const {
  AugmentedSet out{base.intersect(other.base), {}, base_active && other.base_active};
  auto add = [&](const Point& p) {
    for (const Point& q : out.adjoined) {
      if (q == p) {
        return;
      }
    }
    out.adjoined.push_back(p);
  };
  for (const Point& p : adjoined) {
    if (member(other, p)) {
      add(p);
    }
  }
  for (const Point& p : other.adjoined) {
    if (member(*this, p)) {
      add(p);
    }
  }
  return out;
}

bool member(const AugmentedSet& c, const Point& x, const TolerancePolicy& tol) {
  if (c.base_active && member(c.base, x, tol)) {
    return true;
  }
  return std::any_of(c.adjoined.begin(), c.adjoined.end(),
                     [&](const Point& p) { return points_equal(p, x, tol); });
}

SupportValue support(const AugmentedSet& c, const Vec& d) {
  std::optional<SupportValue> best;
  if (c.base_active && !c.base.is_empty()) {
    best = support(c.base, d);
  }
  for (const Point& p : c.adjoined) {
    const double v = dot(p, d);
    if (!best || v > best->value.value()) {
      best = SupportValue{v, true};
    } else if (v == best->value.value()) {
      best->attained = true;
    }
  }
  if (!best) {
    throw EmptySet("support: set is empty");
  }
  return *best;
}

bool normal_cone_member(const AugmentedSet& c, const Point& x0, const Vec& u, const TolerancePolicy& tol) {
  if (!member(c, x0, tol)) {
    throw PointNotInSet("normal_cone_member: x0 " + x0.to_string() + " is not in the set");
  }
  const SupportValue s = support(c, u);
  return tol.less_equal(s.value.value() - dot(x0, u), 0.0);
}

bool inside_open_halfspace(const AugmentedSet& dom, const Vec& ustar, double alpha, const TolerancePolicy& tol) {
  const SupportValue s = support(dom, ustar);
  const double sigma = s.value.value();
  if (s.value.is_finite()) {
    // sigma = alpha up to rounding (EXACT) or the strict margin (GRID): the
    // halfspace contains dom exactly when the supremum is not attained.
    const double band = tol.is_exact() ? kTieBand * std::max({1.0, std::abs(sigma), std::abs(alpha)})
                                       : tol.margin(sigma, alpha);
    if (std::abs(sigma - alpha) <= band) {
      return !s.attained;
    }
  }
  return tol.less(sigma, alpha);
}

bool subset_of(const AugmentedSet& inner, const AugmentedSet& outer) {
  for (const Point& p : inner.adjoined) {
    if (!member(outer, p)) {
      return false;
    }
  }
  if (!inner.base_active || inner.base.is_empty()) {
    return true;
  }
  bool base_inside = outer.base_active;
  if (base_inside) {
    for (const XHalfspace& h : outer.base.halfspaces()) {
      const SupportValue s = support(inner.base, h.normal);
      const double sigma = s.value.value();
      const bool ok = h.strict ? (sigma < h.level || (sigma == h.level && !s.attained)) : sigma <= h.level;
      if (!ok) {
        base_inside = false;
        break;
      }
    }
  }
  if (base_inside) {
    return true;
  }
  // A singleton base can still be covered by an adjoined point of `outer`.
  Point single(inner.dim(), 0.0);
  for (std::size_t i = 0; i < inner.dim(); ++i) {
    Vec e(inner.dim(), 0.0);
    e[i] = 1.0;
    const Interval iv = inner.base.project(e);
    if (!(iv.lo_closed && iv.hi_closed && iv.lo == iv.hi)) {
      return false;
    }
    single[i] = iv.lo;
  }
  return member(outer, single);
}

} // namespace econv
