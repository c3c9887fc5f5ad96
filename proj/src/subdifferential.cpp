#include "econv/subdifferential.hpp"

#include "detail/overloaded.hpp"
#include "econv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace econv {
namespace {

using detail::Overloaded;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRayCap = 1e6;
constexpr int kBisect = 60;
constexpr int kRayBisect = 40;
constexpr int kGolden = 200;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Vec unit_direction(std::size_t n, double angle) {
  if (n == 1) {
    return Vec{std::cos(angle) >= 0.0 ? 1.0 : -1.0};
  }
  return Vec{std::cos(angle), std::sin(angle)};
}

Witness w_witness(const DualTriple& w, std::vector<NamedValue> values, std::string note) {
  return {"w", coords_from_triple(w), std::move(values), std::move(note)};
}

ExtReal flag(bool b) { return ExtReal(b ? 1.0 : 0.0); }

} // namespace

bool v_cone_member(const AugmentedSet& dom, const Vec& ustar, double alpha, const TolerancePolicy& tol) {
  if (dom.is_empty()) {
    throw EmptySet("v_cone_member: empty domain");
  }
  return inside_open_halfspace(dom, ustar, alpha, tol);
}

bool v_cone_member(const FlaggedConvexSet& dom, const Vec& ustar, double alpha, const TolerancePolicy& tol) {
  return v_cone_member(AugmentedSet{dom, {}, true}, ustar, alpha, tol);
}

bool fenchel_eps_subdiff_member(const FunctionModel& f, const Point& x0, const Vec& s, double eps,
                                const EvalContext& ctx) {
  require_same_dim(x0, s, "fenchel_eps_subdiff_member");
  const ExtReal fx0 = f.evaluate(x0);
  if (!fx0.is_finite()) {
    return false;
  }
  const ExtReal fs = fenchel_conjugate(f, s, ctx).value;
  if (!fs.is_finite()) {
    return false;
  }
  return ctx.tol.value_le(fx0.value() + fs.value(), dot(x0, s) + eps);
}

bool c_eps_subdiff_member(const FunctionModel& f, const Point& x0, const DualTriple& w, double eps,
                          const EvalContext& ctx) {
  require_same_dim(x0, w.xstar, "c_eps_subdiff_member");
  const ExtReal fx0 = f.evaluate(x0);
  if (!fx0.is_finite() || !in_open_halfspace(x0, w.ustar, w.alpha, ctx.tol)) {
    return false;
  }
  const ExtReal fc = c_conjugate(f, w, ctx).value;
  if (!fc.is_finite()) {
    return false;
  }
  return ctx.tol.value_le(fx0.value() + fc.value(), dot(x0, w.xstar) + eps);
}

// ---------------------------------------------------------------------------
// V-cone sampling

VConeSampler::VConeSampler(AugmentedSet dom) : dom_(std::move(dom)) {
  const std::size_t n = dom_.dim();
  const bool base_points = dom_.base_active && !dom_.base.is_empty();
  if (base_points) {
    for (const XHalfspace& h : dom_.base.halfspaces()) {
      if (!h.normal.is_zero()) {
        generators_.push_back(h.normal);
      }
    }
  }
  if (!base_points || dom_.base.is_bounded()) {
    for (std::size_t i = 0; i < n; ++i) {
      Vec e(n, 0.0);
      e[i] = 1.0;
      generators_.push_back(e);
      generators_.push_back(-e);
    }
  }
}

std::optional<std::pair<Vec, double>> VConeSampler::pair_for(const Vec& u, bool at_support, double slack) const {
  const SupportValue sv = support(dom_, u);
  if (!sv.value.is_finite()) {
    return std::nullopt;
  }
  const double sigma = sv.value.value();
  if (at_support && !sv.attained) {
    return std::make_pair(u, sigma);
  }
  return std::make_pair(u, sigma + slack * std::max(1.0, std::abs(sigma)));
}

std::vector<std::pair<Vec, double>> VConeSampler::structured() const {
  const std::size_t n = dom_.dim();
  std::vector<std::pair<Vec, double>> out;
  out.emplace_back(Vec(n, 0.0), 1.0);
  for (const Vec& g : generators_) {
    if (auto p = pair_for(g, true, 1e-6)) {
      out.push_back(*p);
    }
  }
  return out;
}

std::pair<Vec, double> VConeSampler::random(Rng& rng) const {
  const std::size_t n = dom_.dim();
  std::bernoulli_distribution coin(0.5);
  std::exponential_distribution<double> expo(1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Vec u(n, 0.0);
    if (!generators_.empty() && uniform(rng, 0.0, 1.0) > 0.1) {
      for (const Vec& g : generators_) {
        if (coin(rng)) {
          u += uniform(rng, 0.0, 2.0) * g;
        }
      }
    }
    if (auto p = pair_for(u, coin(rng), 0.5 * expo(rng) + 1e-6)) {
      return *p;
    }
  }
  return {Vec(n, 0.0), 1.0};
}

std::vector<std::pair<Vec, double>> VConeSampler::sample(Rng& rng, std::size_t k) const {
  auto out = structured();
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back(random(rng));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Descriptor

CSubdiffDescriptor::CSubdiffDescriptor(FunctionModel f, Point x0, double eps, EvalContext ctx)
    : f_(std::move(f)), x0_(x0), eps_(eps), ctx_(std::move(ctx)) {
  if (x0_.size() != f_.dim()) {
    throw DimensionMismatch("c_subdiff_descriptor: basepoint dimension");
  }
  if (!(eps_ >= 0.0)) {
    throw std::invalid_argument("c_subdiff_descriptor: eps must be >= 0");
  }
  dom_ = f_.effective_domain();
  fx0_ = f_.evaluate(x0_);
  if (!fx0_.is_finite()) {
    return;
  }
  seed_ = find_seed();
  if (!seed_) {
    return;
  }
  empty_ = false;
  // Extract boundaries with the unslackened inequality when the seed satisfies
  // it; the value slack would widen tangent-type boundaries by sqrt(slack).
  if (fenchel_member_sharp(*seed_)) {
    member_predicate_ = &CSubdiffDescriptor::fenchel_member_sharp;
  }
  if (f_.dim() == 1) {
    interval_ = extract_interval((*seed_)[0]);
  }
}

double CSubdiffDescriptor::gap(const Vec& s) const {
  const ExtReal fs = fenchel_conjugate(f_, s, ctx_).value;
  if (!fs.is_finite()) {
    return fs.is_pos_inf() ? kInf : -kInf;
  }
  return fx0_.value() + fs.value() - dot(x0_, s) - eps_;
}

bool CSubdiffDescriptor::fenchel_member(const Vec& s) const {
  if (!fx0_.is_finite()) {
    return false;
  }
  const ExtReal fs = fenchel_conjugate(f_, s, ctx_).value;
  if (!fs.is_finite()) {
    return false;
  }
  return ctx_.tol.value_le(fx0_.value() + fs.value(), dot(x0_, s) + eps_);
}

bool CSubdiffDescriptor::fenchel_member_inner(const Vec& s) const {
  const ExtReal fs = fenchel_conjugate(f_, s, ctx_).value;
  if (!fs.is_finite()) {
    return false;
  }
  const double lhs = fx0_.value() + fs.value();
  const double rhs = dot(x0_, s) + eps_;
  return lhs <= rhs + 0.25 * ctx_.tol.value_tol(lhs, rhs);
}

bool CSubdiffDescriptor::fenchel_member_sharp(const Vec& s) const {
  const ExtReal fs = fenchel_conjugate(f_, s, ctx_).value;
  return fs.is_finite() && fx0_.value() + fs.value() <= dot(x0_, s) + eps_;
}

bool CSubdiffDescriptor::vcone_member(const Vec& ustar, double alpha) const {
  return v_cone_member(dom_, ustar, alpha, ctx_.tol);
}

bool CSubdiffDescriptor::member(const DualTriple& w) const {
  return !empty_ && in_open_halfspace(x0_, w.ustar, w.alpha, ctx_.tol) && fenchel_member(w.xstar) &&
         vcone_member(w.ustar, w.alpha);
}

std::optional<Vec> CSubdiffDescriptor::find_seed() const {
  const std::size_t n = f_.dim();
  std::vector<Vec> candidates;
  if (auto s = f_.reference_subgradient(x0_)) {
    candidates.push_back(*s);
  }
  if (f_.has_grid_term()) {
    // Central differences at the lattice resolution.
    const Lattice lat = conjugation_lattice(f_, ctx_);
    const double h = lat.step();
    Vec s(n, 0.0);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      Point up = x0_;
      Point dn = x0_;
      up[i] += h;
      dn[i] -= h;
      const ExtReal fu = f_.evaluate(up);
      const ExtReal fd = f_.evaluate(dn);
      if (fu.is_finite() && fd.is_finite()) {
        s[i] = (fu.value() - fd.value()) / (2.0 * h);
      } else if (fu.is_finite()) {
        s[i] = (fu.value() - fx0_.value()) / h;
      } else if (fd.is_finite()) {
        s[i] = (fx0_.value() - fd.value()) / h;
      } else {
        ok = false;
      }
    }
    if (ok) {
      candidates.push_back(s);
    }
  }
  for (const Vec& s : candidates) {
    if (fenchel_member_inner(s)) {
      return s;
    }
  }

  // Minimise the convex gap s -> f(x0) + f*(s) - <x0,s> by (nested) golden search.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto golden = [&](auto&& fn, double lo, double hi, int iters) {
    double a = lo;
    double b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = fn(c);
    double fd = fn(d);
    for (int i = 0; i < iters; ++i) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = fn(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = fn(d);
      }
    }
    return fc <= fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
  };
  Vec best(n, 0.0);
  if (n == 1) {
    best[0] = golden([&](double t) { return gap(Vec{t}); }, -1e3, 1e3, kGolden).first;
  } else {
    auto row_min = [&](double t) {
      return golden([&](double y) { return gap(Vec{t, y}); }, -100.0, 100.0, 40);
    };
    const double t = golden([&](double t) { return row_min(t).second; }, -100.0, 100.0, 40).first;
    best = Vec{t, row_min(t).first};
  }
  if (fenchel_member_inner(best)) {
    return best;
  }
  return std::nullopt;
}

Interval CSubdiffDescriptor::extract_interval(double seed) const {
  auto side = [&](double dir, double& end, bool& finite) {
    double in = seed;
    double step = 1.0;
    while (step <= 1e12) {
      const double t = seed + dir * step;
      if (!(this->*member_predicate_)(Vec{t})) {
        break;
      }
      in = t;
      step *= 2.0;
    }
    if (step > 1e12) {
      finite = false;
      return;
    }
    double out = seed + dir * step;
    for (int i = 0; i < kBisect; ++i) {
      const double mid = 0.5 * (in + out);
      if (mid == in || mid == out) {
        break;
      }
      if ((this->*member_predicate_)(Vec{mid})) {
        in = mid;
      } else {
        out = mid;
      }
    }
    // Ends within rounding of the seed collapse onto it (degenerate parts such as {a}).
    end = std::abs(in - seed) <= 1e-9 * std::max(1.0, std::abs(seed)) ? seed : in;
    finite = true;
  };
  Interval iv;
  bool lo_finite = false;
  bool hi_finite = false;
  side(-1.0, iv.lo, lo_finite);
  side(1.0, iv.hi, hi_finite);
  if (!lo_finite) {
    iv.lo = -kInf;
  }
  if (!hi_finite) {
    iv.hi = kInf;
  }
  iv.lo_closed = lo_finite;
  iv.hi_closed = hi_finite;
  return iv;
}

double CSubdiffDescriptor::ray_extent(const Vec& d) const {
  const Vec& s0 = *seed_;
  double in = 0.0;
  double r = 1e-3;
  while (r <= kRayCap) {
    if (!(this->*member_predicate_)(s0 + r * d)) {
      break;
    }
    in = r;
    r *= 4.0;
  }
  if (r > kRayCap) {
    return in;
  }
  double out = r;
  for (int i = 0; i < kRayBisect; ++i) {
    const double mid = 0.5 * (in + out);
    if ((this->*member_predicate_)(s0 + mid * d)) {
      in = mid;
    } else {
      out = mid;
    }
  }
  return in;
}

std::vector<Vec> CSubdiffDescriptor::sample_fenchel(Rng& rng, std::size_t k) const {
  std::vector<Vec> out;
  if (empty_) {
    return out;
  }
  out.push_back(*seed_);
  if (interval_) {
    const Interval& iv = *interval_;
    if (std::isfinite(iv.lo)) {
      out.push_back(Vec{iv.lo});
    }
    if (std::isfinite(iv.hi)) {
      out.push_back(Vec{iv.hi});
    }
    const double lo = std::isfinite(iv.lo) ? iv.lo : (std::isfinite(iv.hi) ? iv.hi : (*seed_)[0]) - 10.0;
    const double hi = std::isfinite(iv.hi) ? iv.hi : (std::isfinite(iv.lo) ? iv.lo : (*seed_)[0]) + 10.0;
    while (out.size() < k) {
      out.push_back(Vec{lo == hi ? lo : uniform(rng, lo, hi)});
    }
    return out;
  }
  if (f_.dim() == 1) {
    return out;
  }
  // Rays from the seed: eight fixed angles, then random ones.
  const std::size_t rays = std::max<std::size_t>(8, std::min<std::size_t>(k / 4, 24));
  const std::size_t per_ray = std::max<std::size_t>(1, (k + rays - 1) / rays);
  for (std::size_t j = 0; j < rays && out.size() < k + 1; ++j) {
    const double angle = j < 8 ? j * std::numbers::pi / 4.0 : uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const Vec d = unit_direction(2, angle);
    const double r = ray_extent(d);
    out.push_back(*seed_ + r * d);
    for (std::size_t i = 1; i < per_ray; ++i) {
      out.push_back(*seed_ + uniform(rng, 0.0, r) * d);
    }
  }
  return out;
}

std::vector<std::pair<Vec, double>> CSubdiffDescriptor::sample_vcone(Rng& rng, std::size_t k) const {
  return VConeSampler(dom_).sample(rng, k);
}

std::vector<DualTriple> CSubdiffDescriptor::sample_members(Rng& rng, std::size_t k) const {
  std::vector<DualTriple> out;
  if (empty_) {
    return out;
  }
  const auto fs = sample_fenchel(rng, k);
  const auto vs = sample_vcone(rng, k);
  const std::size_t total = std::max({k, fs.size(), vs.size()});
  for (std::size_t i = 0; i < total; ++i) {
    const auto& [u, alpha] = vs[i % vs.size()];
    out.push_back(DualTriple{fs[i % fs.size()], u, alpha});
  }
  return out;
}

CSubdiffDescriptor c_subdiff_descriptor(const FunctionModel& f, const Point& x0, double eps, const EvalContext& ctx) {
  return CSubdiffDescriptor(f, x0, eps, ctx);
}

// ---------------------------------------------------------------------------
// Inclusion of descriptors

Verdict check_inclusion(const CSubdiffDescriptor& a, const CSubdiffDescriptor& b, Rng& rng, std::size_t k,
                        InclusionParts parts) {
  const bool want_fenchel = parts != InclusionParts::VCone;
  const bool want_vcone = parts != InclusionParts::Fenchel;
  Verdict v;
  if (a.empty()) {
    v.detail = "included set is empty";
    return v;
  }
  std::vector<Vec> fenchel_bad;
  std::vector<std::pair<Vec, double>> vcone_bad;
  bool sampled = false;
  std::size_t samples = 0;

  const auto& ia = a.fenchel_interval();
  const auto& ib = b.fenchel_interval();
  if (!want_fenchel) {
  } else if (b.empty()) {
    fenchel_bad.push_back(*a.seed());
  } else if (ia && ib) {
    for (double e : {ia->lo, ia->hi}) {
      if (std::isfinite(e)) {
        ++samples;
        if (!b.fenchel_member(Vec{e})) {
          fenchel_bad.push_back(Vec{e});
        }
      }
    }
    // An unbounded end of a inside a bounded b.
    if (!std::isfinite(ia->lo) && std::isfinite(ib->lo)) {
      fenchel_bad.push_back(Vec{std::min((*a.seed())[0], ib->lo) - 1.0});
    }
    if (!std::isfinite(ia->hi) && std::isfinite(ib->hi)) {
      fenchel_bad.push_back(Vec{std::max((*a.seed())[0], ib->hi) + 1.0});
    }
  } else {
    sampled = true;
    for (const Vec& s : a.sample_fenchel(rng, k)) {
      ++samples;
      if (!b.fenchel_member(s)) {
        fenchel_bad.push_back(s);
        break;
      }
    }
  }

  const auto a_pairs = a.sample_vcone(rng, k);
  const bool vcone_exact = !want_vcone || subset_of(b.vcone_domain(), a.vcone_domain());
  if (!vcone_exact) {
    sampled = true;
    for (const auto& p : a_pairs) {
      ++samples;
      if (!b.vcone_member(p.first, p.second)) {
        vcone_bad.push_back(p);
        break;
      }
    }
  }

  if (want_fenchel) {
    v.values.emplace_back("fenchel_part_included", flag(fenchel_bad.empty()));
  }
  if (want_vcone) {
    v.values.emplace_back("vcone_part_included", flag(vcone_bad.empty()));
  }
  v.values.emplace_back("samples", ExtReal(static_cast<double>(samples)));
  v.checked = samples;

  std::vector<std::pair<DualTriple, std::string>> candidates;
  for (const Vec& s : fenchel_bad) {
    candidates.emplace_back(DualTriple{s, a_pairs.front().first, a_pairs.front().second},
                            "Fenchel part of the first set not contained in the second");
  }
  for (const auto& [u, alpha] : vcone_bad) {
    candidates.emplace_back(DualTriple{*a.seed(), u, alpha},
                            "separation-cone pair of the first domain not in the cone of the second");
  }
  for (const auto& [w, note] : candidates) {
    if (a.member(w) && (parts == InclusionParts::Both ? !b.member(w)
                        : parts == InclusionParts::Fenchel ? !b.fenchel_member(w.xstar)
                                                           : !b.vcone_member(w.ustar, w.alpha))) {
      const ExtReal ca = c_conjugate(a.function(), w, a.context()).value;
      const ExtReal cb = c_conjugate(b.function(), w, b.context()).value;
      v.record_fail(w_witness(w, {{"conj_first", ca}, {"conj_second", cb}}, note));
      break;
    }
  }
  if (v.outcome == Outcome::Fail) {
    v.detail = "not included:";
    if (want_fenchel) {
      v.detail += std::string(" Fenchel part ") + (fenchel_bad.empty() ? "included" : "not included");
    }
    if (want_vcone) {
      v.detail += std::string(want_fenchel ? "," : "") + " separation-cone part " +
                  (vcone_bad.empty() ? "included" : "not included");
    }
    return v;
  }
  if (!candidates.empty()) {
    v.record_inconclusive("violation found on a component but no triple re-verified");
    return v;
  }
  v.outcome = Outcome::Pass;
  v.sampled = sampled;
  v.detail = !want_vcone    ? "Fenchel part included"
             : vcone_exact  ? "included; domain inclusion gives the separation-cone part exactly"
                            : "included on all samples";
  return v;
}

// ---------------------------------------------------------------------------
// c'-subdifferential and the characterisation checks

bool cprime_subdiff_member(const WFunctionModel& g, const DualTriple& w0, const Point& x, const EvalContext& ctx) {
  require_same_dim(x, w0.xstar, "cprime_subdiff_member");
  const ExtReal gw0 = evaluate(g, w0, ctx);
  if (!gw0.is_finite() || !in_open_halfspace(x, w0.ustar, w0.alpha, ctx.tol)) {
    return false;
  }
  const ExtReal gcp = c_prime_conjugate(g, x, ctx);
  if (!gcp.is_finite()) {
    return false;
  }
  // g(w0) + g^{c'}(x) >= c'(w0, x) always; membership is the reverse inequality.
  return ctx.tol.value_le(gw0.value() + gcp.value(), dot(x, w0.xstar));
}

Verdict check_conjugate_flip(const FunctionModel& f, const Point& x0, const DualTriple& w, const EvalContext& ctx) {
  Verdict v;
  const bool forward = c_eps_subdiff_member(f, x0, w, 0.0, ctx);
  bool backward = false;
  try {
    backward = cprime_subdiff_member(WFunctionModel::conjugate_of(f), w, x0, ctx);
  } catch (const NotSupported& e) {
    v.values.emplace_back("c_subdiff_member", flag(forward));
    v.record_inconclusive(std::string("c'-conjugate unavailable: ") + e.what());
    return v;
  }
  v.values.emplace_back("c_subdiff_member", flag(forward));
  v.values.emplace_back("cprime_subdiff_member", flag(backward));
  if (forward && !backward) {
    v.record_fail(w_witness(w, v.values, "forward implication fails"));
  } else if (!forward && backward && f.is_econvex()) {
    v.record_fail(w_witness(w, v.values, "converse fails for an evenly convex function"));
  } else {
    v.record_pass();
  }
  v.detail = std::string("c-subdifferential: ") + (forward ? "member" : "not a member") +
             "; c'-subdifferential of the conjugate: " + (backward ? "member" : "not a member");
  return v;
}

Verdict check_sum_rule(const FunctionModel& f, const FunctionModel& g, const Point& x0, double eps, double eta,
                       const DualTriple& wf, const DualTriple& wg, const EvalContext& ctx) {
  if (!(eta >= 0.0 && eta <= eps)) {
    throw std::invalid_argument("check_sum_rule: need 0 <= eta <= eps");
  }
  Verdict v;
  const bool in_f = c_eps_subdiff_member(f, x0, wf, eta, ctx);
  const bool in_g = c_eps_subdiff_member(g, x0, wg, eps - eta, ctx);
  v.values.emplace_back("wf_member", flag(in_f));
  v.values.emplace_back("wg_member", flag(in_g));
  if (!in_f || !in_g) {
    v.detail = std::string("precondition not met: ") + (in_f ? "" : "wf not in the subdifferential of f") +
               (!in_f && !in_g ? "; " : "") + (in_g ? "" : "wg not in the subdifferential of g");
    return v;
  }
  const DualTriple sum = wf + wg;
  const bool in_sum = c_eps_subdiff_member(FunctionModel::sum({f, g}), x0, sum, eps, ctx);
  v.values.emplace_back("sum_member", flag(in_sum));
  if (in_sum) {
    v.record_pass();
    v.detail = "sum " + sum.to_string() + " is a member for f + g";
  } else {
    v.record_fail(w_witness(sum, v.values, "sum of members is not a member for f + g"));
    v.detail = "sum " + sum.to_string() + " is not a member for f + g";
  }
  return v;
}

Verdict check_subdiff_in_domfc(const FunctionModel& f, const Point& x0, const std::vector<DualTriple>& samples,
                               const EvalContext& ctx) {
  Verdict v;
  std::size_t members = 0;
  for (const DualTriple& w : samples) {
    if (!c_eps_subdiff_member(f, x0, w, 0.0, ctx)) {
      continue;
    }
    ++members;
    if (dom_fc_member(f, w, ctx)) {
      v.record_pass();
    } else {
      v.record_fail(w_witness(w, {{"f_c", c_conjugate(f, w, ctx).value}}, "member outside dom f^c"));
    }
  }
  v.sampled = v.outcome == Outcome::Pass;
  v.detail = std::to_string(members) + " of " + std::to_string(samples.size()) + " samples were members";
  return v;
}

Verdict check_theorem1_iv(const WFunctionModel& g, const DualTriple& w0, const Point& x0, const EvalContext& ctx,
                          std::uint64_t seed, std::size_t k) {
  Verdict v;
  const std::size_t n = g.dim();
  const ExtReal gw0 = evaluate(g, w0, ctx);
  if (!gw0.is_finite()) {
    v.detail = "g(w0) is not finite; the c'-subdifferential is empty";
    return v;
  }

  // Points of dom g with their values.
  std::vector<std::pair<DualTriple, double>> dom_points;
  bool exhaustive = false;
  std::visit(Overloaded{
                 [&](const WGridFn& grid) {
                   exhaustive = true;
                   std::vector<double> c(grid.lattice.dim());
                   for (std::size_t i = 0; i < grid.lattice.size(); ++i) {
                     if (grid.values[i].is_finite()) {
                       grid.lattice.node(i, c);
                       dom_points.emplace_back(triple_from_coords(c, n), grid.values[i].value());
                     }
                   }
                 },
                 [&](const ConjugateOfFn& cf) {
                   Rng rng(seed);
                   const VConeSampler vs(cf.f.effective_domain());
                   std::vector<Vec> slopes{w0.xstar};
                   if (auto s = cf.f.reference_subgradient(x0)) {
                     slopes.push_back(*s);
                   }
                   for (std::size_t i = 0; i < k; ++i) {
                     Vec s(n, 0.0);
                     for (double& c : s) {
                       c = uniform(rng, -5.0, 5.0);
                     }
                     slopes.push_back(s);
                   }
                   const auto pairs = vs.sample(rng, k);
                   for (std::size_t i = 0; i < std::max(slopes.size(), pairs.size()); ++i) {
                     const DualTriple w{slopes[i % slopes.size()], pairs[i % pairs.size()].first,
                                        pairs[i % pairs.size()].second};
                     const ExtReal gw = evaluate(g, w, ctx);
                     if (gw.is_finite()) {
                       dom_points.emplace_back(w, gw.value());
                     }
                   }
                 },
             },
             g.variant());

  const bool premise = cprime_subdiff_member(g, w0, x0, ctx);
  std::optional<DualTriple> outside;
  for (const auto& [w, gw] : dom_points) {
    if (!ctx.tol.less(dot(x0, w.ustar) - w.alpha, 0.0)) {
      outside = w;
      break;
    }
  }
  v.values.emplace_back("premise_member", flag(premise));
  v.values.emplace_back("domain_condition", flag(!outside));
  if (!premise || outside) {
    std::string why;
    if (!premise) {
      why = "x0 is not in the c'-subdifferential of g at w0";
    }
    if (outside) {
      why += std::string(why.empty() ? "" : "; ") + "hypothesis fails: " + outside->to_string() +
             " in dom g violates <x0,u*> - alpha < 0";
      v.witnesses.push_back(w_witness(*outside, {{"g", evaluate(g, *outside, ctx)}}, "domain condition violated"));
    }
    v.detail = why;
    return v;
  }
  for (const auto& [w, gw] : dom_points) {
    const double rhs = gw0.value() + dot(x0, w.xstar - w0.xstar);
    if (ctx.tol.value_le(rhs, gw)) {
      v.record_pass();
    } else {
      v.record_fail(w_witness(w, {{"g", ExtReal(gw)}, {"affine_minorant", ExtReal(rhs)}},
                              "subgradient inequality fails"));
    }
  }
  v.sampled = !exhaustive && v.outcome == Outcome::Pass;
  v.detail = "subgradient inequality checked at " + std::to_string(dom_points.size()) + " points of dom g";
  return v;
}

Verdict envelope_reconstruct(const FunctionModel& f, const Point& x0, const Point& x, const EvalContext& ctx,
                             std::uint64_t seed, std::size_t k) {
  if (f.kind() != "affine") {
    throw HypothesisNotCertified("envelope_reconstruct: the c-subdifferential equals dom f^c only for affine "
                                 "catalog entries; got " + f.describe());
  }
  const CSubdiffDescriptor d(f, x0, 0.0, ctx);
  Rng rng(seed);
  ExtReal sup = ExtReal::neg_inf();
  for (const DualTriple& w : d.sample_members(rng, k)) {
    const ExtReal term = sub_conj(coupling_c(x, w, ctx.tol), coupling_c(x0, w, ctx.tol));
    sup = std::max(sup, term);
  }
  const ExtReal diff = sub_conj(f.evaluate(x), f.evaluate(x0));
  Verdict v;
  v.values = {{"sup", sup}, {"difference", diff}};
  v.sampled = true;
  if (sup.is_finite() && diff.is_finite() ? ctx.tol.value_eq(sup.value(), diff.value()) : sup == diff) {
    v.record_pass();
    v.detail = "f(x) - f(x0) = " + diff.to_string() + " recovered from c-subgradients";
  } else {
    v.record_fail({"x", std::vector<double>(x.begin(), x.end()), v.values, "envelope differs"});
    v.detail = "sup " + sup.to_string() + " differs from f(x) - f(x0) = " + diff.to_string();
  }
  return v;
}

} // namespace econv
