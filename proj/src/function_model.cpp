#include "econv/function_model.hpp"

#include "detail/overloaded.hpp"
#include "econv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace econv {

struct FunctionModel::Node {
  FunctionVariant v;
  std::size_t dim = 1;
  bool econvex = false;
  bool has_grid = false;
};

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using detail::Overloaded;

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(want) + ", got " +
                            std::to_string(got));
  }
}

double cross(const Point& o, const Point& a, const Point& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

/// Closed convex hull of finitely many points as a flagged set.
FlaggedConvexSet hull_of(std::vector<Point> pts, std::size_t dim) {
  if (dim == 1) {
    double lo = kInf;
    double hi = -kInf;
    for (const Point& p : pts) {
      lo = std::min(lo, p[0]);
      hi = std::max(hi, p[0]);
    }
    return FlaggedConvexSet(1, {{Vec{-1.0}, -lo, false}, {Vec{1.0}, hi, false}});
  }
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Point> h;
  if (pts.size() >= 3) {
    // Andrew's monotone chain, counter-clockwise, collinear points dropped.
    h.resize(2 * pts.size());
    std::size_t k = 0;
    for (const Point& p : pts) {
      while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0.0) {
        --k;
      }
      h[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = pts.size() - 1; i-- > 0;) {
      while (k >= lower && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) {
        --k;
      }
      h[k++] = pts[i];
    }
    h.resize(k - 1);
  } else {
    h = pts;
  }
  std::vector<XHalfspace> hs;
  if (h.size() >= 3) {
    for (std::size_t i = 0; i < h.size(); ++i) {
      const Point& a = h[i];
      const Point& b = h[(i + 1) % h.size()];
      const Vec normal{b[1] - a[1], a[0] - b[0]};
      hs.push_back({normal, dot(normal, a), false});
    }
  } else if (h.size() == 2) {
    const Vec v = h[1] - h[0];
    const Vec normal{-v[1], v[0]};
    hs.push_back({normal, dot(normal, h[0]), false});
    hs.push_back({-normal, -dot(normal, h[0]), false});
    hs.push_back({v, dot(v, h[1]), false});
    hs.push_back({-v, -dot(v, h[0]), false});
  } else {
    const Point& p = h.front();
    hs.push_back({Vec{1.0, 0.0}, p[0], false});
    hs.push_back({Vec{-1.0, 0.0}, -p[0], false});
    hs.push_back({Vec{0.0, 1.0}, p[1], false});
    hs.push_back({Vec{0.0, -1.0}, -p[1], false});
  }
  return FlaggedConvexSet(2, std::move(hs));
}

FlaggedConvexSet grid_hull(const Lattice& lat, const std::vector<ExtReal>& values) {
  std::vector<Point> pts;
  const std::size_t dim = lat.dim();
  if (dim == 1) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i].is_finite()) {
        pts.push_back(Vec{lat.node(i)[0]});
      }
    }
    return hull_of(std::move(pts), 1);
  }
  // Per row only the outermost finite nodes can be hull vertices.
  const std::size_t cols = lat.count(1);
  for (std::size_t r = 0; r < lat.count(0); ++r) {
    std::optional<std::size_t> first;
    std::optional<std::size_t> last;
    for (std::size_t c = 0; c < cols; ++c) {
      if (values[r * cols + c].is_finite()) {
        if (!first) {
          first = c;
        }
        last = c;
      }
    }
    if (first) {
      const auto a = lat.node(r * cols + *first);
      const auto b = lat.node(r * cols + *last);
      pts.push_back(Vec{a[0], a[1]});
      pts.push_back(Vec{b[0], b[1]});
    }
  }
  return hull_of(std::move(pts), 2);
}

std::string flagged_to_string(const FlaggedConvexSet& c) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const XHalfspace& h : c.halfspaces()) {
    os << (first ? "" : ", ") << "<x," << h.normal.to_string() << "> " << (h.strict ? "<" : "<=") << " "
       << ExtReal(h.level).to_string();
    first = false;
  }
  os << "}";
  return os.str();
}

} // namespace

Matrix Matrix::zero(std::size_t n) {
  Matrix out;
  out.n = n;
  return out;
}

Matrix Matrix::diagonal(const Vec& d) {
  Matrix out = zero(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    out(i, i) = d[i];
  }
  return out;
}

Vec Matrix::apply(const Vec& x) const {
  require_dim(x.size(), n, "Matrix::apply");
  Vec out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out[i] += (*this)(i, j) * x[j];
    }
  }
  return out;
}

double Matrix::quad(const Vec& x) const { return dot(x, apply(x)); }

bool Matrix::is_zero() const {
  return std::all_of(m.begin(), m.end(), [](double v) { return v == 0.0; });
}

bool Matrix::is_psd() const {
  constexpr double kTol = 1e-12;
  if (n == 1) {
    return m[0] >= -kTol;
  }
  const double a = (*this)(0, 0);
  const double b = (*this)(0, 1);
  const double c = (*this)(1, 1);
  if (std::abs(b - (*this)(1, 0)) > kTol * std::max({1.0, std::abs(b)})) {
    return false;
  }
  const double scale = std::max({1.0, std::abs(a), std::abs(c)});
  return a >= -kTol * scale && c >= -kTol * scale && a * c - b * b >= -kTol * scale * scale;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  require_dim(o.n, n, "Matrix::operator+=");
  for (std::size_t i = 0; i < 4; ++i) {
    m[i] += o.m[i];
  }
  return *this;
}

ExtReal xlogxy_value(double x, double y) {
  if (x < 0.0 || y < 0.0) {
    return ExtReal::pos_inf();
  }
  if (x == 0.0) {
    return 0.0;
  }
  if (y == 0.0) {
    return ExtReal::pos_inf();
  }
  return x * std::log(x / y);
}

ExtReal NormalForm::evaluate(const Point& x) const {
  if (!member(dom, x)) {
    return ExtReal::pos_inf();
  }
  double v = q.quad(x) + dot(b, x) + cst;
  if (xlogxy_weight != 0.0) {
    const ExtReal p = xlogxy_value(x[0], x[1]);
    if (!p.is_finite()) {
      return ExtReal::pos_inf();
    }
    v += xlogxy_weight * p.value();
  }
  return v;
}

FunctionModel FunctionModel::affine(Vec a, double b) {
  if (a.empty() || !std::isfinite(b)) {
    throw Error("affine: need a non-empty slope and a finite offset");
  }
  auto node = std::make_shared<Node>();
  node->dim = a.size();
  node->v = AffineFn{std::move(a), b};
  node->econvex = true;
  return FunctionModel(std::move(node));
}

FunctionModel FunctionModel::quadratic(Matrix q, Vec b, double cst, FlaggedConvexSet dom) {
  require_dim(q.n, dom.dim(), "quadratic: Q");
  require_dim(b.size(), dom.dim(), "quadratic: b");
  if (!q.is_psd()) {
    throw Error("quadratic: Q must be positive semidefinite");
  }
  if (!std::isfinite(cst)) {
    throw Error("quadratic: constant must be finite");
  }
  if (dom.is_empty()) {
    throw Error("quadratic: empty domain, function is not proper");
  }
  auto node = std::make_shared<Node>();
  node->dim = dom.dim();
  node->v = QuadraticFn{q, std::move(b), cst, std::move(dom)};
  node->econvex = true;
  return FunctionModel(std::move(node));
}

FunctionModel FunctionModel::indicator(FlaggedConvexSet dom) {
  if (dom.is_empty()) {
    throw Error("indicator: empty set, function is not proper");
  }
  auto node = std::make_shared<Node>();
  node->dim = dom.dim();
  node->v = IndicatorFn{std::move(dom)};
  node->econvex = true;
  return FunctionModel(std::move(node));
}

FunctionModel FunctionModel::xlogxy(FlaggedConvexSet dom, bool include_origin) {
  require_dim(dom.dim(), 2, "xlogxy");
  const bool base_empty = dom.is_empty();
  if (base_empty && !include_origin) {
    throw Error("xlogxy: empty domain, function is not proper");
  }
  if (!base_empty) {
    const AugmentedSet d{dom, {}, true};
    if (!inside_open_halfspace(d, Vec{-1.0, 0.0}, 0.0) || !inside_open_halfspace(d, Vec{0.0, -1.0}, 0.0)) {
      throw Error("xlogxy: domain must lie in the open quadrant x > 0, y > 0");
    }
  }
  auto node = std::make_shared<Node>();
  node->dim = 2;
  node->v = XLogXoverYFn{std::move(dom), include_origin};
  node->econvex = true;
  return FunctionModel(std::move(node));
}

FunctionModel FunctionModel::grid(Lattice lattice, std::vector<ExtReal> values) {
  if (lattice.dim() < 1 || lattice.dim() > Vec::kMaxDim) {
    throw DimensionMismatch("grid: lattice dimension must be 1 or 2");
  }
  if (values.size() != lattice.size()) {
    throw Error("grid: expected " + std::to_string(lattice.size()) + " values, got " + std::to_string(values.size()));
  }
  bool any_finite = false;
  for (const ExtReal& v : values) {
    if (v.is_neg_inf()) {
      throw Error("grid: value -inf, function is not proper");
    }
    any_finite = any_finite || v.is_finite();
  }
  if (!any_finite) {
    throw Error("grid: no finite value, function is not proper");
  }
  auto node = std::make_shared<Node>();
  node->dim = lattice.dim();
  FlaggedConvexSet hull = grid_hull(lattice, values);
  node->v = GridFn{std::move(lattice), std::move(values), std::move(hull)};
  node->econvex = false;
  node->has_grid = true;
  return FunctionModel(std::move(node));
}

FunctionModel FunctionModel::sum(std::vector<FunctionModel> terms) {
  if (terms.empty()) {
    throw Error("sum: needs at least one term");
  }
  auto node = std::make_shared<Node>();
  node->dim = terms.front().dim();
  node->econvex = true;
  for (const FunctionModel& t : terms) {
    require_dim(t.dim(), node->dim, "sum");
    node->econvex = node->econvex && t.is_econvex();
    node->has_grid = node->has_grid || t.has_grid_term();
  }
  node->v = SumFn{std::move(terms)};
  FunctionModel out(std::move(node));
  const AugmentedSet dom = out.effective_domain();
  if (dom.is_empty()) {
    throw Error("sum: empty domain, function is not proper");
  }
  if (out.has_grid_term()) {
    // The hull of finite nodes over-approximates; look for a finite node.
    bool found = false;
    for (const FunctionModel& t : std::get<SumFn>(out.variant()).terms) {
      if (const auto* g = std::get_if<GridFn>(&t.variant())) {
        for (std::size_t i = 0; i < g->values.size() && !found; ++i) {
          if (g->values[i].is_finite()) {
            const auto c = g->lattice.node(i);
            Point x(c.size(), 0.0);
            std::copy(c.begin(), c.end(), x.begin());
            found = out.evaluate(x).is_finite();
          }
        }
        break;
      }
    }
    if (!found) {
      throw Error("sum: no point where every term is finite, function is not proper");
    }
  }
  return out;
}

std::size_t FunctionModel::dim() const { return node_->dim; }
const FunctionVariant& FunctionModel::variant() const { return node_->v; }
bool FunctionModel::is_econvex() const { return node_->econvex; }
bool FunctionModel::has_grid_term() const { return node_->has_grid; }

std::string FunctionModel::kind() const {
  static constexpr const char* kNames[] = {"affine", "quadratic", "indicator", "xlogxy", "grid", "sum"};
  return kNames[node_->v.index()];
}

std::string FunctionModel::describe() const {
  return std::visit(
      Overloaded{
          [](const AffineFn& f) { return "affine(a=" + f.a.to_string() + ", b=" + ExtReal(f.b).to_string() + ")"; },
          [](const QuadraticFn& f) {
            return "quadratic(b=" + f.b.to_string() + ", cst=" + ExtReal(f.cst).to_string() +
                   ", dom=" + flagged_to_string(f.dom) + ")";
          },
          [](const IndicatorFn& f) { return "indicator(" + flagged_to_string(f.dom) + ")"; },
          [](const XLogXoverYFn& f) {
            return std::string("xlogxy(dom=") + flagged_to_string(f.dom) +
                   (f.include_origin ? " + origin)" : ")");
          },
          [](const GridFn& f) {
            return "grid(nodes=" + std::to_string(f.lattice.size()) + ", step=" + ExtReal(f.lattice.step()).to_string() +
                   ")";
          },
          [](const SumFn& f) {
            std::string s = "sum(";
            for (std::size_t i = 0; i < f.terms.size(); ++i) {
              s += (i ? ", " : "") + f.terms[i].describe();
            }
            return s + ")";
          },
      },
      node_->v);
}

ExtReal FunctionModel::evaluate(const Point& x) const {
  require_dim(x.size(), dim(), "evaluate");
  return std::visit(Overloaded{
                        [&](const AffineFn& f) -> ExtReal { return dot(f.a, x) + f.b; },
                        [&](const QuadraticFn& f) -> ExtReal {
                          if (!member(f.dom, x)) {
                            return ExtReal::pos_inf();
                          }
                          return f.q.quad(x) + dot(f.b, x) + f.cst;
                        },
                        [&](const IndicatorFn& f) -> ExtReal {
                          return member(f.dom, x) ? ExtReal(0.0) : ExtReal::pos_inf();
                        },
                        [&](const XLogXoverYFn& f) -> ExtReal {
                          if (f.include_origin && x[0] == 0.0 && x[1] == 0.0) {
                            return 0.0;
                          }
                          if (!member(f.dom, x)) {
                            return ExtReal::pos_inf();
                          }
                          return xlogxy_value(x[0], x[1]);
                        },
                        [&](const GridFn& f) -> ExtReal {
                          const auto idx = f.lattice.nearest(std::span<const double>(x.begin(), x.size()));
                          return idx ? f.values[*idx] : ExtReal::pos_inf();
                        },
                        [&](const SumFn& f) -> ExtReal {
                          ExtReal acc = 0.0;
                          for (const FunctionModel& t : f.terms) {
                            acc = add_conj(acc, t.evaluate(x));
                            if (acc.is_pos_inf()) {
                              break;
                            }
                          }
                          return acc;
                        },
                    },
                    node_->v);
}

FlaggedConvexSet FunctionModel::domain() const {
  return std::visit(Overloaded{
                        [&](const AffineFn&) { return FlaggedConvexSet::whole_space(dim()); },
                        [](const QuadraticFn& f) { return f.dom; },
                        [](const IndicatorFn& f) { return f.dom; },
                        [](const XLogXoverYFn& f) { return f.dom; },
                        [](const GridFn& f) { return f.hull; },
                        [&](const SumFn& f) {
                          FlaggedConvexSet d = FlaggedConvexSet::whole_space(dim());
                          for (const FunctionModel& t : f.terms) {
                            d = d.intersect(t.domain());
                          }
                          return d;
                        },
                    },
                    node_->v);
}

AugmentedSet FunctionModel::effective_domain() const {
  return std::visit(Overloaded{
                        [&](const XLogXoverYFn& f) {
                          AugmentedSet d{f.dom, {}, true};
                          if (f.include_origin) {
                            d.adjoined.push_back(Vec{0.0, 0.0});
                          }
                          return d;
                        },
                        [&](const SumFn& f) {
                          AugmentedSet d{FlaggedConvexSet::whole_space(dim()), {}, true};
                          for (const FunctionModel& t : f.terms) {
                            d = d.intersect(t.effective_domain());
                          }
                          return d;
                        },
                        [&](const auto&) { return AugmentedSet{domain(), {}, true}; },
                    },
                    node_->v);
}

std::optional<NormalForm> FunctionModel::normal_form() const {
  if (has_grid_term()) {
    return std::nullopt;
  }
  const std::size_t n = dim();
  NormalForm nf{Matrix::zero(n), Vec(n, 0.0), 0.0, 0.0, effective_domain()};
  auto add_term = [&](const FunctionModel& t, auto&& self) -> void {
    std::visit(Overloaded{
                   [&](const AffineFn& f) {
                     nf.b += f.a;
                     nf.cst += f.b;
                   },
                   [&](const QuadraticFn& f) {
                     nf.q += f.q;
                     nf.b += f.b;
                     nf.cst += f.cst;
                   },
                   [](const IndicatorFn&) {},
                   [&](const XLogXoverYFn&) { nf.xlogxy_weight += 1.0; },
                   [](const GridFn&) {},
                   [&](const SumFn& f) {
                     for (const FunctionModel& u : f.terms) {
                       self(u, self);
                     }
                   },
               },
               t.variant());
  };
  add_term(*this, add_term);
  return nf;
}

std::optional<Vec> FunctionModel::reference_subgradient(const Point& x0) const {
  const auto nf = normal_form();
  if (!nf || !member(nf->dom, x0)) {
    return std::nullopt;
  }
  Vec s = 2.0 * nf->q.apply(x0) + nf->b;
  if (nf->xlogxy_weight != 0.0) {
    if (x0[0] == 0.0 && x0[1] == 0.0) {
      // x ln(x/y) >= x - y on the quadrant.
      s += nf->xlogxy_weight * Vec{1.0, -1.0};
    } else {
      s += nf->xlogxy_weight * Vec{std::log(x0[0] / x0[1]) + 1.0, -x0[0] / x0[1]};
    }
  }
  return s;
}

FunctionModel grid_sample(const FunctionModel& f, const Lattice& lattice) {
  require_dim(lattice.dim(), f.dim(), "grid_sample");
  std::vector<ExtReal> values(lattice.size());
  std::vector<double> c(lattice.dim());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    lattice.node(i, c);
    Point x(c.size(), 0.0);
    std::copy(c.begin(), c.end(), x.begin());
    values[i] = f.evaluate(x);
  }
  return FunctionModel::grid(lattice, std::move(values));
}

FunctionModel grid_sample(const FunctionModel& f, std::vector<double> lo, std::vector<double> hi, double step,
                          std::size_t max_nodes) {
  return grid_sample(f, Lattice(std::move(lo), std::move(hi), step, max_nodes));
}

DualTriple triple_from_coords(std::span<const double> coords, std::size_t n) {
  require_dim(coords.size(), 2 * n + 1, "triple_from_coords");
  DualTriple w{Vec(n, 0.0), Vec(n, 0.0), coords[2 * n]};
  for (std::size_t i = 0; i < n; ++i) {
    w.xstar[i] = coords[i];
    w.ustar[i] = coords[n + i];
  }
  return w;
}

std::vector<double> coords_from_triple(const DualTriple& w) {
  std::vector<double> c(w.xstar.begin(), w.xstar.end());
  c.insert(c.end(), w.ustar.begin(), w.ustar.end());
  c.push_back(w.alpha);
  return c;
}

WFunctionModel WFunctionModel::conjugate_of(FunctionModel f) {
  return WFunctionModel(std::make_shared<const WFunctionVariant>(ConjugateOfFn{std::move(f)}));
}

WFunctionModel WFunctionModel::grid(std::size_t n, Lattice lattice, std::vector<ExtReal> values) {
  if (n < 1 || n > Vec::kMaxDim) {
    throw DimensionMismatch("W grid: n must be 1 or 2");
  }
  require_dim(lattice.dim(), 2 * n + 1, "W grid lattice");
  if (values.size() != lattice.size()) {
    throw Error("W grid: expected " + std::to_string(lattice.size()) + " values, got " +
                std::to_string(values.size()));
  }
  bool any_finite = false;
  for (const ExtReal& v : values) {
    if (v.is_neg_inf()) {
      throw Error("W grid: value -inf, function is not proper");
    }
    any_finite = any_finite || v.is_finite();
  }
  if (!any_finite) {
    throw Error("W grid: no finite value, function is not proper");
  }
  return WFunctionModel(std::make_shared<const WFunctionVariant>(WGridFn{n, std::move(lattice), std::move(values)}));
}

std::size_t WFunctionModel::dim() const {
  return std::visit(Overloaded{[](const ConjugateOfFn& g) { return g.f.dim(); }, [](const WGridFn& g) { return g.n; }},
                    *v_);
}

std::string WFunctionModel::kind() const { return v_->index() == 0 ? "conjugate" : "wgrid"; }

} // namespace econv
