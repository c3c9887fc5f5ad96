#include "econv/directional_dc.hpp"

#include "econv/errors.hpp"
#include "econv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace econv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kTNodes = 121;
constexpr int kGoldenIters = 100;
constexpr int kBisect = 50;
constexpr std::size_t kDirections2d = 360;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Point to_point(std::span<const double> c) {
  Point p(c.size(), 0.0);
  std::copy(c.begin(), c.end(), p.begin());
  return p;
}

Witness w_witness(const DualTriple& w, std::vector<NamedValue> values, std::string note) {
  return {"w", coords_from_triple(w), std::move(values), std::move(note)};
}

ExtReal flag(bool b) { return ExtReal(b ? 1.0 : 0.0); }

std::string eps_label(double eps) {
  std::ostringstream os;
  os << eps;
  return os.str();
}

/// Quotient (f(x0 + t u) - f(x0) + eps) / t.
double quotient(const FunctionModel& f, const Point& x0, double fx0, const Vec& u, double eps, double t) {
  const ExtReal v = f.evaluate(x0 + t * u);
  if (v.is_pos_inf()) {
    return kInf;
  }
  if (v.is_neg_inf()) {
    return -kInf;
  }
  return (v.value() - fx0 + eps) / t;
}

/// Unit directions used for the sublinear derivative function.
std::vector<Vec> unit_directions(std::size_t n) {
  if (n == 1) {
    return {Vec{1.0}, Vec{-1.0}};
  }
  std::vector<Vec> out;
  for (std::size_t j = 0; j < kDirections2d; ++j) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(j) / kDirections2d;
    out.push_back(Vec{std::cos(a), std::sin(a)});
  }
  return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Directional derivatives

ExtReal eps_directional_derivative(const FunctionModel& f, const Point& x0, const Vec& u, double eps) {
  require_same_dim(x0, u, "eps_directional_derivative");
  if (!(eps >= 0.0)) {
    throw std::invalid_argument("eps_directional_derivative: eps must be >= 0");
  }
  const ExtReal fx = f.evaluate(x0);
  if (!fx.is_finite()) {
    throw PointNotInDomain("eps_directional_derivative: f(x0) is not finite");
  }
  if (u.is_zero()) {
    return 0.0;
  }
  const double fx0 = fx.value();
  std::vector<double> ts(kTNodes);
  std::vector<double> qs(kTNodes);
  for (int k = 0; k < kTNodes; ++k) {
    ts[k] = std::pow(10.0, -6.0 + 0.1 * k);
    qs[k] = quotient(f, x0, fx0, u, eps, ts[k]);
    if (qs[k] == -kInf) {
      return ExtReal::neg_inf();
    }
  }
  const int kb = static_cast<int>(std::min_element(qs.begin(), qs.end()) - qs.begin());
  const double qb = qs[kb];
  if (qb == kInf) {
    return ExtReal::pos_inf();
  }

  // Geometric extrapolation: differences shrinking by r = d0 / d1 per step.
  auto extrapolate = [&](double q0, double q1, double q2) -> ExtReal {
    if (!std::isfinite(q1) || !std::isfinite(q2)) {
      return q0;
    }
    const double d0 = q1 - q0;
    const double d1 = q2 - q1;
    if (d0 <= 0.0) {
      return q0;
    }
    if (d1 <= d0) {
      return ExtReal::neg_inf();
    }
    const double r = d0 / d1;
    return q0 - d0 * r / (1.0 - r);
  };
  // Decades apart: near t = 1e-6 neighbouring quotients differ by little more
  // than the cancellation noise in f(x0 + t u) - f(x0).
  if (kb == 0) {
    return extrapolate(qs[0], qs[10], qs[20]);
  }
  if (kb == kTNodes - 1) {
    return extrapolate(qs[kTNodes - 1], qs[kTNodes - 11], qs[kTNodes - 21]);
  }

  // Golden-section search in log t between the neighbours of the best node.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto q_log = [&](double s) { return quotient(f, x0, fx0, u, eps, std::pow(10.0, s)); };
  double a = std::log10(ts[kb - 1]);
  double b = std::log10(ts[kb + 1]);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = q_log(c);
  double fd = q_log(d);
  double best = qb;
  for (int i = 0; i < kGoldenIters; ++i) {
    best = std::min({best, fc, fd});
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = q_log(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = q_log(d);
    }
  }
  return std::min({best, fc, fd});
}

Verdict check_theorem_dd(const FunctionModel& f, const Point& x0, double eps, const std::vector<DualTriple>& samples,
                         const EvalContext& ctx) {
  const std::size_t n = f.dim();
  if (!f.evaluate(x0).is_finite()) {
    throw PointNotInDomain("check_theorem_dd: x0 is outside dom f");
  }
  const std::vector<Vec> dirs = unit_directions(n);
  std::vector<ExtReal> h;
  h.reserve(dirs.size());
  for (const Vec& d : dirs) {
    h.push_back(eps_directional_derivative(f, x0, d, eps));
  }
  const bool h_proper = std::none_of(h.begin(), h.end(), [](ExtReal v) { return v.is_neg_inf(); });
  const AugmentedSet dom = f.effective_domain();

  Verdict v;
  std::size_t ambiguous = 0;
  for (const DualTriple& w : samples) {
    // Left: x* in the subdifferential of h at 0, (u*, alpha) in V(dom h), <x0,u*> < alpha.
    bool left = h_proper && w.alpha > 0.0 && ctx.tol.less(dot(x0, w.ustar), w.alpha);
    double margin = kInf;
    for (std::size_t j = 0; j < dirs.size() && left; ++j) {
      if (h[j].is_pos_inf()) {
        continue;
      }
      const double slack = h[j].value() - dot(w.xstar, dirs[j]);
      margin = std::min(margin, std::abs(slack));
      if (slack < -kDirectionalTol * std::max(1.0, std::abs(h[j].value())) || dot(w.ustar, dirs[j]) > 0.0) {
        left = false;
      }
    }
    const bool right = w.alpha > 0.0 && c_eps_subdiff_member(f, x0, w, eps, ctx) &&
                       normal_cone_member(dom, x0, w.ustar, ctx.tol);
    if (left == right) {
      v.record_pass();
    } else if (margin <= 10.0 * kDirectionalTol) {
      ++ambiguous;
    } else {
      v.record_fail(w_witness(w, {{"left", flag(left)}, {"right", flag(right)}}, "memberships differ"));
    }
  }
  v.sampled = n > 1 && v.outcome == Outcome::Pass;
  v.values.emplace_back("ambiguous", ExtReal(static_cast<double>(ambiguous)));
  v.detail = std::to_string(v.checked) + " triples compared";
  if (ambiguous > 0) {
    v.record_inconclusive(std::to_string(ambiguous) + " triples within derivative tolerance of the boundary disagreed");
  }
  return v;
}

Verdict check_corollary_dd_bound(const FunctionModel& f, const Point& x0, const Vec& u, double eps,
                                 const std::vector<DualTriple>& samples, const EvalContext& ctx, std::uint64_t seed) {
  const ExtReal lhs = eps_directional_derivative(f, x0, u, eps);
  std::vector<DualTriple> pool = samples;
  if (pool.empty()) {
    Rng rng(seed);
    pool = c_subdiff_descriptor(f, x0, eps, ctx).sample_members(rng, 100);
  }
  const AugmentedSet dom = f.effective_domain();
  ExtReal sup = ExtReal::neg_inf();
  std::optional<DualTriple> arg;
  std::size_t members = 0;
  for (const DualTriple& w : pool) {
    if (!(w.alpha > 0.0) || !c_eps_subdiff_member(f, x0, w, eps, ctx) ||
        !normal_cone_member(dom, x0, w.ustar, ctx.tol)) {
      continue;
    }
    ++members;
    const ExtReal c = coupling_c(u, w, ctx.tol);
    if (c > sup) {
      sup = c;
      arg = w;
    }
  }
  Verdict v;
  v.values = {{"directional_derivative", lhs}, {"sampled_sup", sup}};
  v.checked = members;
  if (members == 0) {
    v.detail = "no sampled member of the restricted subdifferential";
    return v;
  }
  const bool ok = lhs.is_pos_inf() || sup.is_neg_inf() ||
                  (lhs.is_finite() && sup.is_finite() &&
                   sup.value() <= lhs.value() + kDirectionalTol * std::max(1.0, std::abs(lhs.value())));
  v.sampled = true;
  if (ok) {
    v.outcome = Outcome::Pass;
  } else {
    v.record_fail(w_witness(*arg, v.values, "coupling value exceeds the directional derivative"));
  }
  v.detail = "derivative " + lhs.to_string() + " against sup " + sup.to_string() + " over " +
             std::to_string(members) + " members";
  return v;
}

// ---------------------------------------------------------------------------
// DC problems

DCProblem::DCProblem(FunctionModel f_in, FunctionModel g_in, Box box, double step)
    : f(std::move(f_in)), g(std::move(g_in)), search_box(std::move(box)), search_step(step) {
  if (f.dim() != g.dim() || search_box.dim() != f.dim() || search_box.hi.size() != f.dim()) {
    throw DimensionMismatch("DCProblem: f, g and the search box must share a dimension");
  }
  if (!(search_step > 0.0)) {
    throw std::invalid_argument("DCProblem: search step must be positive");
  }
  for (std::size_t i = 0; i < search_box.dim(); ++i) {
    if (!(std::isfinite(search_box.lo[i]) && std::isfinite(search_box.hi[i]) && search_box.lo[i] <= search_box.hi[i])) {
      throw std::invalid_argument("DCProblem: search box must be bounded and non-empty");
    }
  }
  if (!g.is_econvex()) {
    throw HypothesisNotCertified("DCProblem: g must be flagged evenly convex, got " + g.describe());
  }
}

Lattice DCProblem::lattice(std::size_t max_nodes) const {
  return Lattice(search_box.lo, search_box.hi, search_step, max_nodes);
}

ExtReal dc_value(const DCProblem& p, const Point& x, Diagnostics* diag) {
  return sub_dc(p.f.evaluate(x), p.g.evaluate(x), diag);
}

Verdict is_eps_minimizer(const DCProblem& p, const Point& a, double eps, const EvalContext& ctx) {
  const ExtReal va = dc_value(p, a);
  if (va.is_pos_inf()) {
    throw PointNotInDomain("is_eps_minimizer: f - g is +inf at " + a.to_string());
  }
  const Lattice lat = p.lattice(ctx.grid.max_nodes);
  const ArgMax best = parallel_argmax(lat.size(), ctx.threads, [&](std::size_t i) {
    return -dc_value(p, to_point(lat.node(i)));
  });
  const ExtReal min_value = -best.value;
  const Point at = to_point(lat.node(best.index));
  Verdict v;
  v.values = {{"dc_value_at_a", va}, {"grid_min", min_value}};
  v.checked = lat.size();
  bool ok;
  if (va.is_neg_inf() || min_value.is_pos_inf()) {
    ok = true;
  } else if (min_value.is_neg_inf()) {
    ok = false;
  } else {
    ok = ctx.tol.value_le(va.value() - eps, min_value.value());
  }
  if (ok) {
    v.record_pass();
    v.detail = "h(a) - eps <= h(x) on all " + std::to_string(lat.size()) + " lattice points";
  } else {
    v.record_fail({"x", std::vector<double>(at.begin(), at.end()),
                   {{"dc_value_at_a", va}, {"dc_value_at_witness", min_value}}, "h(a) - eps > h(x)"});
    v.detail = "h(a) - eps = " + sub_dc(va, eps).to_string() + " exceeds h" + at.to_string() + " = " +
               min_value.to_string();
  }
  return v;
}

// ---------------------------------------------------------------------------
// Product sets and star-differences

ProductWSet ProductWSet::from_descriptor(const CSubdiffDescriptor& d) {
  ProductWSet s;
  s.n_ = d.function().dim();
  s.empty_ = d.empty();
  s.interval_ = d.fenchel_interval();
  s.descriptor_ = d;
  s.dom_ = d.vcone_domain();
  s.tol_ = d.context().tol;
  return s;
}

ProductWSet ProductWSet::from_interval(Interval fenchel, AugmentedSet vcone_dom, TolerancePolicy tol) {
  ProductWSet s;
  s.n_ = 1;
  s.empty_ = fenchel.empty || vcone_dom.is_empty();
  s.interval_ = fenchel;
  s.dom_ = std::move(vcone_dom);
  s.tol_ = tol;
  return s;
}

ProductWSet ProductWSet::empty_set(std::size_t n) {
  ProductWSet s;
  s.n_ = n;
  s.empty_ = true;
  return s;
}

bool ProductWSet::fenchel_member(const Vec& s) const {
  if (empty_) {
    return false;
  }
  if (descriptor_) {
    return descriptor_->fenchel_member(s);
  }
  const Interval& iv = *interval_;
  const double t = s[0];
  const bool above = iv.lo_closed ? tol_.value_le(iv.lo, t) : iv.lo < t;
  const bool below = iv.hi_closed ? tol_.value_le(t, iv.hi) : t < iv.hi;
  return (std::isinf(iv.lo) || above) && (std::isinf(iv.hi) || below);
}

bool ProductWSet::vcone_member(const Vec& ustar, double alpha) const {
  return !empty_ && v_cone_member(dom_, ustar, alpha, tol_);
}

bool ProductWSet::member(const DualTriple& w) const {
  return fenchel_member(w.xstar) && vcone_member(w.ustar, w.alpha);
}

std::vector<Vec> ProductWSet::sample_fenchel(Rng& rng, std::size_t k) const {
  if (empty_) {
    return {};
  }
  if (descriptor_) {
    return descriptor_->sample_fenchel(rng, k);
  }
  const Interval& iv = *interval_;
  std::vector<Vec> out;
  if (std::isfinite(iv.lo) && iv.lo_closed) {
    out.push_back(Vec{iv.lo});
  }
  if (std::isfinite(iv.hi) && iv.hi_closed) {
    out.push_back(Vec{iv.hi});
  }
  const double lo = std::isfinite(iv.lo) ? iv.lo : (std::isfinite(iv.hi) ? iv.hi : 0.0) - 10.0;
  const double hi = std::isfinite(iv.hi) ? iv.hi : (std::isfinite(iv.lo) ? iv.lo : 0.0) + 10.0;
  while (out.size() < k) {
    out.push_back(Vec{lo == hi ? lo : uniform(rng, lo, hi)});
  }
  return out;
}

std::vector<std::pair<Vec, double>> ProductWSet::sample_vcone(Rng& rng, std::size_t k) const {
  if (empty_) {
    return {};
  }
  return VConeSampler(dom_).sample(rng, k);
}

StarDifferenceResult star_difference_member(const ProductWSet& a, const ProductWSet& b, const DualTriple& w, Rng& rng,
                                            std::size_t k) {
  StarDifferenceResult r;
  if (b.empty()) {
    r.member = a.member(w);
    return r;
  }
  const auto b_pairs = b.sample_vcone(rng, k);
  if (a.empty()) {
    r.offending = DualTriple{*b.sample_fenchel(rng, 1).begin(), b_pairs.front().first, b_pairs.front().second};
    return r;
  }

  // Fenchel part: w1 + B1 inside A1.
  std::optional<Vec> bad_s;
  const auto& ia = a.fenchel_interval();
  const auto& ib = b.fenchel_interval();
  if (ia && ib) {
    const double x = w.xstar[0];
    const TolerancePolicy tol = TolerancePolicy::exact();
    const bool lo_ok = std::isinf(ia->lo) || (std::isfinite(ib->lo) && tol.value_le(ia->lo, x + ib->lo));
    const bool hi_ok = std::isinf(ia->hi) || (std::isfinite(ib->hi) && tol.value_le(x + ib->hi, ia->hi));
    if (!lo_ok) {
      bad_s = Vec{std::isfinite(ib->lo) ? ib->lo : std::min(ib->hi, ia->lo - x) - 1.0};
    } else if (!hi_ok) {
      bad_s = Vec{std::isfinite(ib->hi) ? ib->hi : std::max(ib->lo, ia->hi - x) + 1.0};
    }
  } else {
    r.sampled = true;
    for (const Vec& s : b.sample_fenchel(rng, k)) {
      if (!a.fenchel_member(w.xstar + s)) {
        bad_s = s;
        break;
      }
    }
  }

  // Separation-cone part: (w.u* , w.alpha) + V(dom B) inside V(dom A).
  std::optional<std::pair<Vec, double>> bad_pair;
  if (subset_of(a.vcone_dom(), b.vcone_dom())) {
    const SupportValue sv = support(a.vcone_dom(), w.ustar);
    const bool ok = sv.value.is_finite() && sv.value.value() <= w.alpha;
    if (!ok) {
      // (0, beta) lies in every V-cone; a small beta exposes the failure.
      const double beta = sv.value.is_finite() ? (sv.value.value() - w.alpha) / 2.0 : 1.0;
      bad_pair = std::make_pair(Vec(w.dim(), 0.0), beta);
    }
  } else {
    r.sampled = true;
    for (const auto& [u, beta] : b_pairs) {
      if (!a.vcone_member(w.ustar + u, w.alpha + beta)) {
        bad_pair = std::make_pair(u, beta);
        break;
      }
    }
  }

  r.member = !bad_s && !bad_pair;
  if (!r.member) {
    const Vec s = bad_s ? *bad_s : b.sample_fenchel(rng, 1).front();
    const auto pr = bad_pair ? *bad_pair : b_pairs.front();
    r.offending = DualTriple{s, pr.first, pr.second};
  }
  return r;
}

TolandGap toland_gap(const FunctionModel& f, const FunctionModel& g, const Lattice& x_grid,
                     const std::vector<DualTriple>& w_samples, const EvalContext& ctx) {
  if (f.dim() != g.dim() || x_grid.dim() != f.dim()) {
    throw DimensionMismatch("toland_gap: dimensions differ");
  }
  TolandGap out{ExtReal::neg_inf(), ExtReal::neg_inf(), std::nullopt, std::nullopt};
  const ArgMax left = parallel_argmax(x_grid.size(), ctx.threads, [&](std::size_t i) {
    const Point x = to_point(x_grid.node(i));
    return sub_conj(g.evaluate(x), f.evaluate(x));
  });
  if (left.found()) {
    out.lhs = left.value;
    out.lhs_at = to_point(x_grid.node(left.index));
  }

  const std::size_t n = f.dim();
  std::vector<DualTriple> candidates = w_samples;
  const Lattice slopes(std::vector<double>(n, -5.0), std::vector<double>(n, 5.0), n == 1 ? 1e-2 : 0.1);
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    candidates.push_back(DualTriple{to_point(slopes.node(i)), Vec(n, 0.0), 1.0});
  }
  for (const DualTriple& w : candidates) {
    const ExtReal fc = c_conjugate(f, w, ctx).value;
    const ExtReal gc = c_conjugate(g, w, ctx).value;
    const ExtReal d = sub_conj(fc, gc);
    if (d > out.rhs) {
      out.rhs = d;
      out.rhs_at = w;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subdifferential of f - g from a grid conjugate

namespace {

/// f - g tabulated on the search lattice, with the grid eps-c-subdifferential
/// characterisation h(x0) + h^c(w) <= c(x0, w) + eps.
class DcGrid {
public:
  DcGrid(const DCProblem& p, const Point& x0, double eps, const EvalContext& ctx)
      : p_(p), x0_(x0), eps_(eps), lat_(p.lattice(ctx.grid.max_nodes)), threads_(ctx.threads),
        tol_(ctx.is_exact() ? TolerancePolicy::grid() : ctx.tol) {
    hx0_ = dc_value(p, x0);
    values_.resize(lat_.size());
    for (std::size_t i = 0; i < lat_.size(); ++i) {
      values_[i] = dc_value(p, to_point(lat_.node(i)));
    }
  }

  bool defined() const { return hx0_.is_finite(); }

  /// h^c(w) on the lattice and the maximising node.
  ArgMax conjugate(const DualTriple& w) const {
    return parallel_argmax(lat_.size(), threads_, [&](std::size_t i) {
      return sub_conj(coupling_c(to_point(lat_.node(i)), w, tol_), values_[i]);
    });
  }

  double gap(const DualTriple& w) const {
    if (!in_open_halfspace(x0_, w.ustar, w.alpha, tol_)) {
      return kInf;
    }
    const ExtReal hc = conjugate(w).value;
    if (!hc.is_finite()) {
      return hc.is_pos_inf() ? kInf : -kInf;
    }
    return hx0_.value() + hc.value() - dot(x0_, w.xstar) - eps_;
  }

  bool member(const DualTriple& w) const { return gap(w) <= tol_.eq_tol; }
  bool member_sharp(const Vec& s) const { return gap(DualTriple{s, Vec(s.size(), 0.0), 1.0}) <= 0.0; }

  /// Undershoot bound of the grid conjugate at w: (|x*|_1 + local slope of h) * step.
  double slack(const DualTriple& w) const {
    const ArgMax best = conjugate(w);
    if (!best.found() || !best.value.is_finite()) {
      return 0.0;
    }
    const std::size_t n = lat_.dim();
    const std::vector<double> at = lat_.node(best.index);
    const double h0 = values_[best.index].value();
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (double dir : {-1.0, 1.0}) {
        std::vector<double> nb = at;
        nb[i] += dir * lat_.step();
        if (auto j = lat_.nearest(nb); j && values_[*j].is_finite()) {
          slope = std::max(slope, std::abs(values_[*j].value() - h0) / lat_.step());
        }
      }
    }
    double norm1 = 0.0;
    for (double c : w.xstar) {
      norm1 += std::abs(c);
    }
    return (norm1 + slope) * lat_.step();
  }

  /// Grid members of the Fenchel-type part (u* = 0, alpha = 1 slice).
  std::vector<Vec> fenchel_candidates(Rng& rng, std::size_t k) const {
    const std::size_t n = lat_.dim();
    std::optional<Vec> seed;
    auto sf = p_.f.reference_subgradient(x0_);
    auto sg = p_.g.reference_subgradient(x0_);
    if (sf && sg && member_sharp(*sf - *sg)) {
      seed = *sf - *sg;
    }
    if (!seed) {
      // Lattice slopes of h at x0 (central differences).
      Vec s(n, 0.0);
      bool ok = true;
      for (std::size_t i = 0; i < n; ++i) {
        Point up = x0_;
        Point dn = x0_;
        up[i] += lat_.step();
        dn[i] -= lat_.step();
        const ExtReal hu = dc_value(p_, up);
        const ExtReal hd = dc_value(p_, dn);
        if (hu.is_finite() && hd.is_finite()) {
          s[i] = (hu.value() - hd.value()) / (2.0 * lat_.step());
        } else {
          ok = false;
        }
      }
      if (ok && member_sharp(s)) {
        seed = s;
      }
    }
    if (!seed) {
      return {};
    }
    std::vector<Vec> out{*seed};
    const std::vector<Vec> dirs = n == 1 ? std::vector<Vec>{Vec{1.0}, Vec{-1.0}} : [&] {
      std::vector<Vec> d;
      for (int j = 0; j < 8; ++j) {
        d.push_back(Vec{std::cos(j * std::numbers::pi / 4.0), std::sin(j * std::numbers::pi / 4.0)});
      }
      return d;
    }();
    std::vector<double> extent;
    for (const Vec& d : dirs) {
      double in = 0.0;
      double r = 1e-3;
      while (r <= 1e4 && member_sharp(*seed + r * d)) {
        in = r;
        r *= 4.0;
      }
      if (r <= 1e4) {
        double outr = r;
        for (int i = 0; i < kBisect; ++i) {
          const double mid = 0.5 * (in + outr);
          (member_sharp(*seed + mid * d) ? in : outr) = mid;
        }
      }
      extent.push_back(in);
      if (in > 0.0) {
        out.push_back(*seed + in * d);
      }
    }
    while (out.size() < k) {
      const std::size_t j = std::uniform_int_distribution<std::size_t>(0, dirs.size() - 1)(rng);
      out.push_back(*seed + uniform(rng, 0.0, extent[j]) * dirs[j]);
    }
    return out;
  }

private:
  const DCProblem& p_;
  Point x0_;
  double eps_;
  Lattice lat_;
  unsigned threads_;
  TolerancePolicy tol_;
  ExtReal hx0_;
  std::vector<ExtReal> values_;
};

/// Shared body of the two necessary-condition checks: for each (eps_g, eps_f)
/// pair, eps_g-c-subdiff g(a) inside eps_f-c-subdiff f(a).
Verdict inclusion_battery(const DCProblem& p, const Point& a, const std::vector<std::pair<double, double>>& levels,
                          const std::string& label, const EvalContext& ctx, std::uint64_t seed, std::size_t k,
                          InclusionParts parts) {
  Verdict total;
  std::string lines;
  for (const auto& [eg, ef] : levels) {
    Rng rng(seed);
    const Verdict v = check_inclusion(c_subdiff_descriptor(p.g, a, eg, ctx), c_subdiff_descriptor(p.f, a, ef, ctx),
                                      rng, k, parts);
    total.merge(v);
    for (const NamedValue& nv : v.values) {
      total.values.emplace_back(label + "=" + eps_label(eg) + ":" + nv.first, nv.second);
    }
    lines += (lines.empty() ? "" : "; ") + label + "=" + eps_label(eg) + ": " +
             (v.outcome == Outcome::Fail ? "FAILS" : v.outcome == Outcome::Inconclusive ? "INCONCLUSIVE" : "HOLDS") +
             " (" + v.detail + ")";
  }
  total.detail = "necessary, not sufficient; " + lines;
  return total;
}

} // namespace

Verdict check_dc_subdiff_inclusion(const DCProblem& p, const Point& x0, double eps, const std::vector<double>& lambdas,
                                   const EvalContext& ctx, std::uint64_t seed, std::size_t k) {
  Verdict v;
  const DcGrid h(p, x0, eps, ctx);
  if (!h.defined()) {
    v.detail = "f - g is not finite at x0; its c-subdifferential is empty";
    return v;
  }
  Rng rng(seed);
  const std::vector<Vec> slopes = h.fenchel_candidates(rng, k);
  const auto pairs = VConeSampler(p.f.effective_domain()).sample(rng, k);
  std::vector<DualTriple> members;
  for (std::size_t i = 0; i < std::max(slopes.size(), pairs.size()) && !slopes.empty(); ++i) {
    const DualTriple w{slopes[i % slopes.size()], pairs[i % pairs.size()].first, pairs[i % pairs.size()].second};
    if (h.member(w)) {
      members.push_back(w);
    }
  }
  if (members.empty()) {
    v.detail = "no member of the eps-c-subdifferential of f - g found; vacuous";
    return v;
  }
  double slack = 0.0;
  for (const DualTriple& w : members) {
    slack = std::max(slack, h.slack(w));
  }
  v.values.emplace_back("grid_slack", ExtReal(slack));
  v.values.emplace_back("members", ExtReal(static_cast<double>(members.size())));
  bool sampled = false;
  for (double lambda : lambdas) {
    const ProductWSet a = ProductWSet::from_descriptor(c_subdiff_descriptor(p.f, x0, eps + lambda + slack, ctx));
    const ProductWSet b = ProductWSet::from_descriptor(c_subdiff_descriptor(p.g, x0, lambda, ctx));
    for (const DualTriple& w : members) {
      const StarDifferenceResult r = star_difference_member(a, b, w, rng, k);
      sampled = sampled || r.sampled;
      if (r.member) {
        v.record_pass();
      } else {
        Witness wit = w_witness(w, {{"lambda", ExtReal(lambda)}}, "w + b leaves the (eps+lambda)-subdifferential of f");
        if (r.offending) {
          wit.note += " for b = " + r.offending->to_string();
        }
        v.record_fail(std::move(wit));
      }
    }
  }
  v.sampled = sampled || v.outcome == Outcome::Pass;
  v.detail = std::to_string(members.size()) + " members checked against " + std::to_string(lambdas.size()) +
             " lambda values";
  return v;
}

Verdict check_global_necessary(const DCProblem& p, const Point& a, const std::vector<double>& eps_list,
                               const EvalContext& ctx, std::uint64_t seed, std::size_t k, InclusionParts parts) {
  std::vector<std::pair<double, double>> levels;
  for (double e : eps_list) {
    levels.emplace_back(e, e);
  }
  return inclusion_battery(p, a, levels, "eps", ctx, seed, k, parts);
}

Verdict check_eps_necessary(const DCProblem& p, const Point& a, double eps, const std::vector<double>& lambdas,
                            const EvalContext& ctx, std::uint64_t seed, std::size_t k, InclusionParts parts) {
  std::vector<std::pair<double, double>> levels;
  for (double l : lambdas) {
    levels.emplace_back(l, eps + l);
  }
  return inclusion_battery(p, a, levels, "lambda", ctx, seed, k, parts);
}

} // namespace econv
