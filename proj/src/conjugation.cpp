#include "econv/conjugation.hpp"

#include "detail/overloaded.hpp"
#include "econv/errors.hpp"
#include "econv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <mutex>

namespace econv {
namespace {

using detail::Overloaded;

constexpr double kInf = std::numeric_limits<double>::infinity();
// Slopes and curvatures below this (relative) size count as zero.
constexpr double kFlat = 1e-12;
constexpr int kGoldenIters = 100;

struct Candidate {
  ExtReal value = ExtReal::neg_inf();
  std::optional<Point> at;

  void offer(ExtReal v, std::optional<Point> x) {
    if (v > value) {
      value = v;
      at = std::move(x);
    }
  }
  ConjugateResult result() const { return {value, value.is_finite() ? at : std::nullopt}; }
};

/// max over t in iv of a t - m t^2 (m >= 0). Nothing for an empty interval.
std::optional<std::pair<ExtReal, double>> max_concave_1d(double a, double m, double scale, const Interval& iv) {
  if (iv.empty) {
    return std::nullopt;
  }
  double t;
  if (m > kFlat * scale) {
    t = std::clamp(a / (2.0 * m), iv.lo, iv.hi);
  } else if (std::abs(a) <= kFlat * std::max(1.0, scale)) {
    t = iv.pick();
  } else if (a > 0.0) {
    if (!std::isfinite(iv.hi)) {
      return std::make_pair(ExtReal::pos_inf(), 0.0);
    }
    t = iv.hi;
  } else {
    if (!std::isfinite(iv.lo)) {
      return std::make_pair(ExtReal::pos_inf(), 0.0);
    }
    t = iv.lo;
  }
  return std::make_pair(ExtReal(a * t - m * t * t), t);
}

bool closed_member_loose(const FlaggedConvexSet& c, const Point& x) {
  for (const XHalfspace& h : c.halfspaces()) {
    const double v = dot(h.normal, x);
    if (v > h.level + 1e-9 * std::max({1.0, std::abs(h.level), std::abs(v)})) {
      return false;
    }
  }
  return true;
}

/// Eigen-decomposition of a symmetric 2x2 matrix: values ascending, unit vectors.
void eig2(const Matrix& q, double lam[2], Vec vec[2]) {
  const double a = q(0, 0);
  const double b = q(0, 1);
  const double c = q(1, 1);
  const double mean = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  lam[0] = mean - rad;
  lam[1] = mean + rad;
  if (b == 0.0) {
    if (a <= c) {
      vec[0] = Vec{1.0, 0.0};
      vec[1] = Vec{0.0, 1.0};
    } else {
      vec[0] = Vec{0.0, 1.0};
      vec[1] = Vec{1.0, 0.0};
    }
    return;
  }
  Vec v{lam[1] - c, b};
  v *= 1.0 / v.norm();
  vec[1] = v;
  vec[0] = Vec{-v[1], v[0]};
}

/// sup over the closed polyhedron P of <c, x> - x^T Q x - cst.
ConjugateResult concave_qp(const Matrix& q, const Vec& c, double cst, const FlaggedConvexSet& p) {
  auto phi = [&](const Point& x) { return dot(c, x) - q.quad(x) - cst; };
  Candidate best;
  const double qscale = std::max({1.0, std::abs(q.m[0]), std::abs(q.m[1]), std::abs(q.m[3])});
  if (p.dim() == 1) {
    const Interval iv = p.project(Vec{1.0});
    const auto r = max_concave_1d(c[0], q(0, 0), qscale, iv);
    if (!r) {
      return {ExtReal::neg_inf(), std::nullopt};
    }
    if (r->first.is_pos_inf()) {
      return {ExtReal::pos_inf(), std::nullopt};
    }
    best.offer(r->first.value() - cst, Vec{r->second});
    return best.result();
  }

  double lam[2];
  Vec eigv[2];
  eig2(q, lam, eigv);
  const double tol_q = kFlat * std::max(1.0, std::abs(lam[1]));
  const double cnorm = c.norm();

  // Unbounded iff some recession direction of P in ker Q increases <c, .>.
  auto recedes = [&](const Vec& r) {
    return std::all_of(p.halfspaces().begin(), p.halfspaces().end(),
                       [&](const XHalfspace& h) { return dot(h.normal, r) <= kFlat * h.normal.norm(); });
  };
  if (lam[1] <= tol_q) {
    if (cnorm > kFlat) {
      std::vector<XHalfspace> cone;
      for (const XHalfspace& h : p.halfspaces()) {
        cone.push_back({h.normal, 0.0, false});
      }
      if (!std::isfinite(FlaggedConvexSet(2, cone).project(c).hi)) {
        return {ExtReal::pos_inf(), std::nullopt};
      }
    }
  } else if (lam[0] <= tol_q) {
    for (const double sign : {1.0, -1.0}) {
      const Vec r = sign * eigv[0];
      if (recedes(r) && dot(c, r) > kFlat * std::max(1.0, cnorm)) {
        return {ExtReal::pos_inf(), std::nullopt};
      }
    }
  }

  // Interior stationary set.
  if (lam[0] > tol_q) {
    const double det = q(0, 0) * q(1, 1) - q(0, 1) * q(1, 0);
    const Point x{(q(1, 1) * c[0] - q(0, 1) * c[1]) / (2.0 * det), (q(0, 0) * c[1] - q(1, 0) * c[0]) / (2.0 * det)};
    if (closed_member_loose(p, x)) {
      best.offer(phi(x), x);
    }
  } else if (lam[1] > tol_q) {
    if (std::abs(dot(c, eigv[0])) <= kFlat * std::max(1.0, cnorm)) {
      const Point base = (dot(c, eigv[1]) / (2.0 * lam[1])) * eigv[1];
      const Interval iv = p.line_section(base, eigv[0]);
      if (!iv.empty) {
        const Point x = base + iv.pick() * eigv[0];
        best.offer(phi(x), x);
      }
    }
  } else if (cnorm <= kFlat) {
    if (const auto x = p.some_point()) {
      best.offer(phi(*x), *x);
    }
  }

  // Maxima along each constraint line; vertices appear as interval ends.
  for (const XHalfspace& h : p.halfspaces()) {
    const double nn = dot(h.normal, h.normal);
    if (nn == 0.0) {
      continue;
    }
    const Point p0 = (h.level / nn) * h.normal;
    const Vec v{-h.normal[1], h.normal[0]};
    const Interval iv = p.line_section(p0, v);
    const Vec g = c - 2.0 * q.apply(p0);
    const auto r = max_concave_1d(dot(g, v), q.quad(v), qscale * nn, iv);
    if (!r) {
      continue;
    }
    if (r->first.is_pos_inf()) {
      return {ExtReal::pos_inf(), std::nullopt};
    }
    const Point x = p0 + r->second * v;
    best.offer(phi(x), x);
  }
  return best.result();
}

template <class F>
std::pair<ExtReal, double> golden_max(F&& fn, double lo, double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  std::pair<ExtReal, double> best{fn(lo), lo};
  auto offer = [&](ExtReal v, double t) {
    if (v > best.first) {
      best = {v, t};
    }
  };
  offer(fn(hi), hi);
  if (hi <= lo) {
    return best;
  }
  double a = lo;
  double b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  ExtReal f1 = fn(x1);
  ExtReal f2 = fn(x2);
  for (int i = 0; i < kGoldenIters && b - a > 0.0; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = fn(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = fn(x1);
    }
  }
  offer(f1, x1);
  offer(f2, x2);
  return best;
}

/// sup over cl P (bounded) of <c, x> - x^T Q x - cst - k * x ln(x/y).
/// The objective is concave, so nested golden-section search converges.
ConjugateResult perspective_max(const Matrix& q, const Vec& c, double cst, double k, const FlaggedConvexSet& p) {
  if (!p.is_bounded()) {
    throw NotSupported("x ln(x/y) conjugate requires a bounded domain");
  }
  auto phi = [&](double x, double y) -> ExtReal {
    const ExtReal pl = xlogxy_value(x, y);
    if (!pl.is_finite()) {
      return ExtReal::neg_inf();
    }
    const Point z{x, y};
    return dot(c, z) - q.quad(z) - cst - k * pl.value();
  };
  const Interval outer = p.project(Vec{1.0, 0.0});
  if (outer.empty) {
    return {ExtReal::neg_inf(), std::nullopt};
  }
  auto inner = [&](double x) -> std::pair<ExtReal, double> {
    const Interval iv = p.line_section(Point{x, 0.0}, Vec{0.0, 1.0});
    if (iv.empty) {
      return {ExtReal::neg_inf(), 0.0};
    }
    return golden_max([&](double y) { return phi(x, y); }, iv.lo, iv.hi);
  };
  const auto [value, x] = golden_max([&](double t) { return inner(t).first; }, outer.lo, outer.hi);
  if (!value.is_finite()) {
    return {value, std::nullopt};
  }
  return {value, Point{x, inner(x).second}};
}

ConjugateResult fenchel_exact(const NormalForm& nf, const Vec& s) {
  Candidate best;
  for (const Point& p : nf.dom.adjoined) {
    best.offer(sub_conj(dot(s, p), nf.evaluate(p)), p);
  }
  if (nf.dom.base_active && !nf.dom.base.is_empty()) {
    const FlaggedConvexSet closed = nf.dom.base.closure();
    const Vec c = s - nf.b;
    const ConjugateResult r = nf.xlogxy_weight == 0.0 ? concave_qp(nf.q, c, nf.cst, closed)
                                                       : perspective_max(nf.q, c, nf.cst, nf.xlogxy_weight, closed);
    if (r.value.is_pos_inf()) {
      return {ExtReal::pos_inf(), std::nullopt};
    }
    best.offer(r.value, r.argmax);
  }
  return best.result();
}

NormalForm exact_form(const FunctionModel& f) {
  auto nf = f.normal_form();
  if (!nf) {
    throw NotSupported("EXACT conjugate of a grid-sampled function; use GRID mode");
  }
  return *nf;
}

Point to_point(std::span<const double> c) {
  Point x(c.size(), 0.0);
  std::copy(c.begin(), c.end(), x.begin());
  return x;
}

/// Small keyed cache; entries keep their models alive so identities stay unique.
template <class Key, class Value>
class Cache {
public:
  std::shared_ptr<const Value> get_or(const Key& key, auto&& make) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      for (auto it = items_.begin(); it != items_.end(); ++it) {
        if (it->first == key) {
          items_.splice(items_.begin(), items_, it);
          return items_.front().second;
        }
      }
    }
    auto value = std::make_shared<const Value>(make());
    std::lock_guard<std::mutex> lock(mu_);
    items_.emplace_front(key, value);
    if (items_.size() > kCapacity) {
      items_.pop_back();
    }
    return value;
  }

private:
  static constexpr std::size_t kCapacity = 8;
  std::mutex mu_;
  std::list<std::pair<Key, std::shared_ptr<const Value>>> items_;
};

struct LatticeKey {
  std::vector<double> lo;
  std::vector<double> hi;
  double step = 0.0;
  bool operator==(const LatticeKey&) const = default;
};

LatticeKey key_of(const Lattice& l) { return {l.lo(), l.hi(), l.step()}; }

struct TolKey {
  int mode;
  double eq_tol;
  double strict_margin;
  bool operator==(const TolKey&) const = default;
};

TolKey key_of(const TolerancePolicy& t) { return {static_cast<int>(t.mode), t.eq_tol, t.strict_margin}; }

struct ConjKey {
  std::shared_ptr<const void> hold;
  const void* id;
  LatticeKey x;
  TolKey tol;
  bool operator==(const ConjKey& o) const { return id == o.id && x == o.x && tol == o.tol; }
};

struct TableKey {
  std::shared_ptr<const void> hold;
  const void* id;
  LatticeKey x;
  LatticeKey w;
  TolKey tol;
  bool operator==(const TableKey& o) const { return id == o.id && x == o.x && w == o.w && tol == o.tol; }
};

Cache<ConjKey, GridConjugator>& conj_cache() {
  static Cache<ConjKey, GridConjugator> cache;
  return cache;
}

Cache<TableKey, WTable>& table_cache() {
  static Cache<TableKey, WTable> cache;
  return cache;
}

} // namespace

Lattice conjugation_lattice(const FunctionModel& f, const EvalContext& ctx) {
  if (!ctx.grid.x_box) {
    if (const auto* g = std::get_if<GridFn>(&f.variant())) {
      return g->lattice;
    }
  }
  return ctx.grid.x_lattice(f.dim());
}

GridConjugator::GridConjugator(const FunctionModel& f, const Lattice& lattice, TolerancePolicy tol, unsigned threads)
    : n_(f.dim()), tol_(tol), threads_(threads) {
  if (lattice.dim() != n_) {
    throw DimensionMismatch("GridConjugator: lattice dimension differs from the function's");
  }
  std::vector<double> c(n_);
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    lattice.node(i, c);
    const ExtReal v = f.evaluate(to_point(c));
    if (v.is_finite()) {
      coords_.insert(coords_.end(), c.begin(), c.end());
      values_.push_back(v.value());
    }
  }
}

Point GridConjugator::point(std::size_t i) const {
  return to_point(std::span<const double>(coords_.data() + i * n_, n_));
}

ConjugateResult GridConjugator::c_conjugate(const DualTriple& w) const {
  if (w.dim() != n_) {
    throw DimensionMismatch("c_conjugate: triple dimension differs from the function's");
  }
  const ArgMax best = parallel_argmax(values_.size(), threads_, [&](std::size_t i) {
    return sub_conj(coupling_c(point(i), w, tol_), values_[i]);
  });
  if (!best.found()) {
    return {ExtReal::neg_inf(), std::nullopt};
  }
  return {best.value, best.value.is_finite() ? std::optional<Point>(point(best.index)) : std::nullopt};
}

ConjugateResult GridConjugator::fenchel(const Vec& s) const {
  if (s.size() != n_) {
    throw DimensionMismatch("fenchel_conjugate: slope dimension differs from the function's");
  }
  const ArgMax best = parallel_argmax(values_.size(), threads_, [&](std::size_t i) {
    return ExtReal(dot(point(i), s) - values_[i]);
  });
  if (!best.found()) {
    return {ExtReal::neg_inf(), std::nullopt};
  }
  return {best.value, point(best.index)};
}

std::shared_ptr<const GridConjugator> grid_conjugator(const FunctionModel& f, const EvalContext& ctx) {
  const Lattice lat = conjugation_lattice(f, ctx);
  ConjKey key{std::make_shared<FunctionModel>(f), f.id(), key_of(lat), key_of(ctx.tol)};
  return conj_cache().get_or(key, [&] { return GridConjugator(f, lat, ctx.tol, ctx.threads); });
}

ConjugateResult c_conjugate(const FunctionModel& f, const DualTriple& w, const EvalContext& ctx) {
  w.validate();
  if (w.dim() != f.dim()) {
    throw DimensionMismatch("c_conjugate: triple dimension differs from the function's");
  }
  if (!ctx.is_exact()) {
    return grid_conjugator(f, ctx)->c_conjugate(w);
  }
  const NormalForm nf = exact_form(f);
  if (!inside_open_halfspace(nf.dom, w.ustar, w.alpha)) {
    return {ExtReal::pos_inf(), std::nullopt};
  }
  return fenchel_exact(nf, w.xstar);
}

ConjugateResult fenchel_conjugate(const FunctionModel& f, const Vec& s, const EvalContext& ctx) {
  if (s.size() != f.dim()) {
    throw DimensionMismatch("fenchel_conjugate: slope dimension differs from the function's");
  }
  if (!ctx.is_exact()) {
    return grid_conjugator(f, ctx)->fenchel(s);
  }
  return fenchel_exact(exact_form(f), s);
}

ExtReal evaluate(const WFunctionModel& g, const DualTriple& w, const EvalContext& ctx) {
  if (w.dim() != g.dim()) {
    throw DimensionMismatch("evaluate: triple dimension differs from the W function's");
  }
  return std::visit(Overloaded{
                        [&](const ConjugateOfFn& c) { return c_conjugate(c.f, w, ctx).value; },
                        [&](const WGridFn& grid) {
                          const auto coords = coords_from_triple(w);
                          const auto idx = grid.lattice.nearest(coords);
                          return idx ? grid.values[*idx] : ExtReal::pos_inf();
                        },
                    },
                    g.variant());
}

WTable::WTable(std::size_t n, std::vector<DualTriple> nodes, std::vector<double> values, TolerancePolicy tol,
               unsigned threads)
    : n_(n), nodes_(std::move(nodes)), values_(std::move(values)), tol_(tol), threads_(threads) {
  if (nodes_.size() != values_.size()) {
    throw Error("WTable: node and value counts differ");
  }
}

WTable WTable::of_conjugate(const FunctionModel& f, const EvalContext& ctx) {
  const std::size_t n = f.dim();
  const Lattice lat = ctx.grid.w_lattice(n);
  std::vector<DualTriple> nodes;
  std::vector<double> values;
  std::vector<double> c(2 * n + 1);
  std::shared_ptr<const GridConjugator> conj;
  if (!ctx.is_exact()) {
    conj = grid_conjugator(f, ctx);
  }
  for (std::size_t i = 0; i < lat.size(); ++i) {
    lat.node(i, c);
    const DualTriple w = triple_from_coords(c, n);
    const ExtReal v = conj ? conj->c_conjugate(w).value : c_conjugate(f, w, ctx).value;
    if (v.is_finite()) {
      nodes.push_back(w);
      values.push_back(v.value());
    }
  }
  return WTable(n, std::move(nodes), std::move(values), ctx.tol, ctx.threads);
}

WTable WTable::of_grid(const WGridFn& g, const EvalContext& ctx) {
  std::vector<DualTriple> nodes;
  std::vector<double> values;
  std::vector<double> c(2 * g.n + 1);
  for (std::size_t i = 0; i < g.lattice.size(); ++i) {
    if (g.values[i].is_finite()) {
      g.lattice.node(i, c);
      nodes.push_back(triple_from_coords(c, g.n));
      values.push_back(g.values[i].value());
    }
  }
  return WTable(g.n, std::move(nodes), std::move(values), ctx.tol, ctx.threads);
}

ExtReal WTable::c_prime(const Point& x) const {
  if (x.size() != n_) {
    throw DimensionMismatch("c_prime_conjugate: point dimension differs from the W function's");
  }
  const ArgMax best = parallel_argmax(values_.size(), threads_, [&](std::size_t i) {
    return sub_conj(coupling_cprime(nodes_[i], x, tol_), values_[i]);
  });
  return best.found() ? best.value : ExtReal::neg_inf();
}

ExtReal c_prime_conjugate(const WFunctionModel& g, const Point& x, const EvalContext& ctx) {
  if (x.size() != g.dim()) {
    throw DimensionMismatch("c_prime_conjugate: point dimension differs from the W function's");
  }
  return std::visit(
      Overloaded{
          [&](const ConjugateOfFn& c) -> ExtReal {
            if (ctx.is_exact()) {
              if (!c.f.is_econvex()) {
                throw NotSupported("EXACT c'-conjugate needs a function flagged evenly convex");
              }
              return c.f.evaluate(x);
            }
            TableKey key{std::make_shared<FunctionModel>(c.f), c.f.id(), key_of(conjugation_lattice(c.f, ctx)),
                         key_of(ctx.grid.w_lattice(c.f.dim())), key_of(ctx.tol)};
            return table_cache().get_or(key, [&] { return WTable::of_conjugate(c.f, ctx); })->c_prime(x);
          },
          [&](const WGridFn& grid) -> ExtReal {
            if (ctx.is_exact()) {
              throw NotSupported("EXACT c'-conjugate of a W grid function; use GRID mode");
            }
            TableKey key{std::make_shared<WFunctionModel>(g), g.id(), {}, key_of(grid.lattice), key_of(ctx.tol)};
            return table_cache().get_or(key, [&] { return WTable::of_grid(grid, ctx); })->c_prime(x);
          },
      },
      g.variant());
}

ExtReal biconjugate(const FunctionModel& f, const Point& x, const EvalContext& ctx) {
  return c_prime_conjugate(WFunctionModel::conjugate_of(f), x, ctx);
}

bool dom_fc_member(const FunctionModel& f, const DualTriple& w, const EvalContext& ctx) {
  return !c_conjugate(f, w, ctx).value.is_pos_inf();
}

Verdict eprime_convexity_check(const WFunctionModel& g, const std::vector<DualTriple>& samples,
                               const EvalContext& ctx) {
  Verdict v;
  const std::size_t n = g.dim();
  auto compare = [&](const DualTriple& w, ExtReal hull, ExtReal value) {
    const bool same = (hull.is_finite() && value.is_finite()) ? ctx.tol.value_eq(hull.value(), value.value())
                                                               : hull == value;
    if (same) {
      v.record_pass();
    } else {
      v.record_fail({"w", coords_from_triple(w), {{"g_cprime_c", hull}, {"g", value}}, "g^{c'c}(w) != g(w)"});
    }
  };

  if (const auto* c = std::get_if<ConjugateOfFn>(&g.variant()); c && ctx.is_exact()) {
    if (!c->f.is_econvex()) {
      v.record_inconclusive("EXACT check needs a function flagged evenly convex");
      return v;
    }
    // g^{c'} = f for evenly convex f, hence g^{c'c} = f^c.
    for (const DualTriple& w : samples) {
      compare(w, c_conjugate(c->f, w, ctx).value, evaluate(g, w, ctx));
    }
    v.detail = "closed form: g^{c'} equals f";
    return v;
  }
  if (ctx.is_exact()) {
    v.record_inconclusive("EXACT check unavailable for W grid functions; use GRID mode");
    return v;
  }

  const Lattice xl = ctx.grid.x_lattice(n);
  std::vector<Point> xs;
  std::vector<ExtReal> gcp;
  std::vector<double> coords(n);
  for (std::size_t i = 0; i < xl.size(); ++i) {
    xl.node(i, coords);
    xs.push_back(to_point(coords));
    gcp.push_back(c_prime_conjugate(g, xs.back(), ctx));
  }
  for (const DualTriple& w : samples) {
    const ArgMax hull = parallel_argmax(xs.size(), ctx.threads, [&](std::size_t i) {
      return add_conj(coupling_c(xs[i], w, ctx.tol), -gcp[i]);
    });
    compare(w, hull.found() ? hull.value : ExtReal::neg_inf(), evaluate(g, w, ctx));
  }
  v.sampled = true;
  v.detail = "grid suprema over " + std::to_string(xs.size()) + " x nodes";
  return v;
}

} // namespace econv
