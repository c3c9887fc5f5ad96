#include "internal.hpp"

#include "econv/conjugation.hpp"
#include "econv/subdifferential.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <thread>

namespace econv::harness {

using detail::Node;

namespace {

struct Prepared {
  std::function<Verdict()> run;
  /// Checks whose computation is a lattice search whatever the tolerance mode.
  bool grid_only = false;
};

struct Input {
  const Problem& p;
  Node node;
  EvalContext ctx;
  std::optional<std::uint64_t> seed;

  std::size_t n() const { return p.space_dim; }

  FunctionModel function(const std::string& key) const {
    const Node name = node.at(key);
    auto it = p.functions.find(name.string());
    if (it == p.functions.end()) {
      name.fail("unknown function \"" + name.string() + "\"");
    }
    return it->second;
  }

  WFunctionModel w_function(const std::string& key) const {
    const Node name = node.at(key);
    auto it = p.w_functions.find(name.string());
    if (it == p.w_functions.end()) {
      name.fail("unknown W function \"" + name.string() + "\"");
    }
    return it->second;
  }

  const DCProblem& dc() const {
    if (!p.dc) {
      node.fail("this check needs a \"dc\" section");
    }
    return *p.dc;
  }

  std::uint64_t required_seed() const {
    if (!seed) {
      node.fail("\"seed\" is required for checks that sample");
    }
    return *seed;
  }

  Point point(const std::string& key = "point") const { return node.at(key).vec(n()); }
  DualTriple triple(const std::string& key) const { return node.at(key).triple(n()); }

  double eps(const std::string& key = "eps", double fallback = 0.0) const {
    if (!node.has(key)) {
      return fallback;
    }
    const double e = node.at(key).real();
    if (e < 0.0) {
      node.at(key).fail("must be non-negative");
    }
    return e;
  }

  std::vector<double> grid_list(const std::string& key, const std::vector<double>& fallback) const {
    if (!node.has(key)) {
      return fallback;
    }
    std::vector<double> out = node.at(key).numbers();
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!(out[i] >= 0.0) || !std::isfinite(out[i])) {
        node.at(key).index(i).fail("must be a finite non-negative number");
      }
    }
    if (out.empty()) {
      node.at(key).fail("must not be empty");
    }
    return out;
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    if (!node.has(key)) {
      return fallback;
    }
    const std::uint64_t c = node.at(key).unsigned_int();
    if (c == 0) {
      node.at(key).fail("must be positive");
    }
    return static_cast<std::size_t>(c);
  }

  InclusionParts parts() const {
    if (!node.has("parts")) {
      return InclusionParts::Both;
    }
    const std::string s = node.at("parts").string();
    if (s == "both") {
      return InclusionParts::Both;
    }
    if (s == "fenchel") {
      return InclusionParts::Fenchel;
    }
    if (s == "vcone") {
      return InclusionParts::VCone;
    }
    node.at("parts").fail("parts must be \"both\", \"fenchel\" or \"vcone\"");
  }
};

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

DualTriple random_triple(Rng& rng, const Vec& center) {
  const std::size_t n = center.size();
  DualTriple w{Vec(n), Vec(n), uniform(rng, -2.0, 3.0)};
  for (std::size_t i = 0; i < n; ++i) {
    w.xstar[i] = center[i] + uniform(rng, -3.0, 3.0);
    w.ustar[i] = uniform(rng, -2.0, 2.0);
  }
  return w;
}

/// Descriptor members followed by random triples around the seed subgradient.
std::vector<DualTriple> mixed_triples(const CSubdiffDescriptor& d, Rng& rng, std::size_t k) {
  std::vector<DualTriple> out;
  const Vec center = d.seed() ? *d.seed() : Vec(d.basepoint().size());
  if (!d.empty()) {
    out = d.sample_members(rng, k / 2);
  }
  while (out.size() < k) {
    out.push_back(random_triple(rng, center));
  }
  return out;
}

Witness triple_witness(const DualTriple& w, std::vector<NamedValue> values, std::string note) {
  return {"w", coords_from_triple(w), std::move(values), std::move(note)};
}

Witness point_witness(const Point& x, std::vector<NamedValue> values, std::string note) {
  return {"x", std::vector<double>(x.begin(), x.end()), std::move(values), std::move(note)};
}

ExtReal flag(bool b) { return ExtReal(b ? 1.0 : 0.0); }

bool ext_close(ExtReal a, ExtReal b, double tol) {
  if (a.is_finite() && b.is_finite()) {
    return std::abs(a.value() - b.value()) <= tol;
  }
  return a == b;
}

Prepared separation(const Input& in) {
  const FlaggedConvexSet set = detail::parse_flagged_set(in.node.at("set"), in.n());
  const std::vector<Point> points = in.node.at("points").points(in.n());
  const TolerancePolicy tol = in.ctx.tol;
  return {[=] {
    Verdict v;
    std::size_t inside = 0;
    for (const Point& x0 : points) {
      if (member(set, x0, tol)) {
        ++inside;
        continue;
      }
      std::optional<Vec> dir;
      try {
        dir = strictly_separates(set, x0, tol);
      } catch (const SearchFailed& e) {
        v.record_inconclusive(std::string("no certified separator at ") + x0.to_string() + ": " + e.what());
        continue;
      }
      if (!dir) {
        v.record_fail(point_witness(x0, {}, "outside the set but no separator found"));
        continue;
      }
      const SupportValue sv = support(set, *dir);
      const double pairing = dot(x0, *dir);
      std::vector<NamedValue> vals;
      for (std::size_t i = 0; i < dir->size(); ++i) {
        vals.emplace_back("direction_" + std::to_string(i), (*dir)[i]);
      }
      vals.emplace_back("support", sv.value);
      vals.emplace_back("support_attained", flag(sv.attained));
      vals.emplace_back("pairing_at_point", pairing);
      const bool strict = sv.value < ExtReal(pairing) || (sv.value == ExtReal(pairing) && !sv.attained);
      if (strict) {
        v.record_pass();
        v.witnesses.push_back(point_witness(x0, std::move(vals), "separator"));
      } else {
        v.record_fail(point_witness(x0, std::move(vals), "direction does not separate strictly"));
      }
    }
    v.values.emplace_back("points_inside", static_cast<double>(inside));
    v.values.emplace_back("points_separated", static_cast<double>(v.checked));
    if (v.detail.empty()) {
      v.detail = "every outside point has a strict separator";
      if (v.outcome == Outcome::Fail) {
        v.detail = "an outside point without a strict separator";
      }
    }
    return v;
  }};
}

Prepared biconjugate_check(const Input& in) {
  const FunctionModel f = in.function("function");
  std::vector<Point> points;
  if (in.node.has("points")) {
    points = in.node.at("points").points(in.n());
  } else {
    const Node g = in.node.at("eval_grid");
    const Vec lo = g.at("lo").vec(in.n());
    const Vec hi = g.at("hi").vec(in.n());
    const Lattice lat(std::vector<double>(lo.begin(), lo.end()), std::vector<double>(hi.begin(), hi.end()),
                      g.at("step").real(), in.ctx.grid.max_nodes);
    for (std::size_t i = 0; i < lat.size(); ++i) {
      const std::vector<double> c = lat.node(i);
      Point x(in.n());
      std::copy(c.begin(), c.end(), x.begin());
      points.push_back(x);
    }
  }
  std::optional<double> approx_tol;
  FlaggedConvexSet region = FlaggedConvexSet::whole_space(in.n());
  if (auto a = in.node.find("approx")) {
    approx_tol = a->at("tol").real();
    if (auto r = a->find("region")) {
      region = detail::parse_flagged_set(*r, in.n());
    }
  }
  const EvalContext ctx = in.ctx;
  return {[=] {
    Verdict v;
    std::optional<WTable> table;
    if (!ctx.is_exact()) {
      table.emplace(WTable::of_conjugate(f, ctx));
    }
    double worst = 0.0;
    std::size_t approx_points = 0;
    for (const Point& x : points) {
      const ExtReal bic = table ? table->c_prime(x) : biconjugate(f, x, ctx);
      const ExtReal fx = f.evaluate(x);
      const bool below = fx.is_pos_inf() || bic.is_neg_inf() ||
                         (bic.is_finite() && ctx.tol.value_le(bic.value(), fx.value()));
      if (!below) {
        v.record_fail(point_witness(x, {{"biconjugate", bic}, {"f", fx}}, "biconjugate exceeds f"));
        continue;
      }
      if (approx_tol && fx.is_finite() && member(region, x)) {
        ++approx_points;
        const double gap = bic.is_finite() ? std::abs(fx.value() - bic.value()) : INFINITY;
        worst = std::max(worst, gap);
        if (!(gap <= *approx_tol)) {
          v.record_fail(point_witness(x, {{"biconjugate", bic}, {"f", fx}}, "biconjugate too far below f"));
          continue;
        }
      }
      v.record_pass();
    }
    v.values.emplace_back("points", static_cast<double>(points.size()));
    if (approx_tol) {
      v.values.emplace_back("approx_points", static_cast<double>(approx_points));
      v.values.emplace_back("max_gap", worst);
    }
    v.detail = v.outcome == Outcome::Fail ? "biconjugate inequality or approximation violated"
                                          : "biconjugate below f at every point";
    return v;
  }};
}

std::vector<DualTriple> w_lattice_samples(const EvalContext& ctx, std::size_t n, Rng& rng, std::size_t k) {
  const Lattice lat = ctx.grid.w_lattice(n);
  std::uniform_int_distribution<std::size_t> pick(0, lat.size() - 1);
  std::vector<DualTriple> out;
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back(triple_from_coords(lat.node(pick(rng)), n));
  }
  return out;
}

Prepared eprime_convexity(const Input& in) {
  const WFunctionModel g = in.w_function("w_function");
  std::vector<DualTriple> samples;
  std::optional<std::uint64_t> seed;
  std::size_t k = 0;
  if (in.node.has("samples")) {
    samples = in.node.at("samples").triples(in.n());
  } else {
    seed = in.required_seed();
    k = in.count("count", 50);
  }
  const EvalContext ctx = in.ctx;
  const std::size_t n = in.n();
  return {[=] {
    std::vector<DualTriple> ws = samples;
    if (seed) {
      Rng rng(*seed);
      ws = w_lattice_samples(ctx, n, rng, k);
    }
    return eprime_convexity_check(g, ws, ctx);
  }};
}

Prepared product_form(const Input& in) {
  const FunctionModel f = in.function("function");
  const Point x0 = in.point();
  const double eps = in.eps();
  const std::uint64_t seed = in.required_seed();
  const std::size_t k = in.count("count", 200);
  const EvalContext ctx = in.ctx;
  return {[=] {
    Rng rng(seed);
    Verdict v;
    const CSubdiffDescriptor d(f, x0, eps, ctx);
    const AugmentedSet dom = f.effective_domain();
    std::size_t members = 0;
    for (const DualTriple& w : mixed_triples(d, rng, k)) {
      const bool direct = c_eps_subdiff_member(f, x0, w, eps, ctx);
      const bool fen = fenchel_eps_subdiff_member(f, x0, w.xstar, eps, ctx);
      const bool vc = v_cone_member(dom, w.ustar, w.alpha, ctx.tol);
      members += direct ? 1 : 0;
      if (direct == (fen && vc)) {
        v.record_pass();
      } else {
        v.record_fail(triple_witness(w, {{"direct", flag(direct)}, {"fenchel_part", flag(fen)}, {"vcone_part", flag(vc)}},
                                     "direct membership differs from the product"));
      }
    }
    v.sampled = true;
    v.values.emplace_back("samples", static_cast<double>(v.checked));
    v.values.emplace_back("members", static_cast<double>(members));
    v.detail = v.outcome == Outcome::Fail ? "product form violated" : "direct membership equals the product on all samples";
    return v;
  }};
}

Prepared conjugate_flip(const Input& in) {
  const FunctionModel f = in.function("function");
  const Point x0 = in.point();
  std::vector<DualTriple> ws;
  if (in.node.has("w")) {
    ws.push_back(in.triple("w"));
  } else {
    ws = in.node.at("triples").triples(in.n());
  }
  const EvalContext ctx = in.ctx;
  return {[=] {
    Verdict v;
    for (const DualTriple& w : ws) {
      v.merge(check_conjugate_flip(f, x0, w, ctx));
    }
    return v;
  }};
}

Prepared sum_rule(const Input& in) {
  const FunctionModel f = in.function("f");
  const FunctionModel g = in.function("g");
  const Point x0 = in.point();
  const double eps = in.eps();
  const EvalContext ctx = in.ctx;
  if (in.node.has("wf")) {
    const double eta = in.eps("eta");
    if (eta > eps) {
      in.node.at("eta").fail("eta must not exceed eps");
    }
    const DualTriple wf = in.triple("wf");
    const DualTriple wg = in.triple("wg");
    return {[=] { return check_sum_rule(f, g, x0, eps, eta, wf, wg, ctx); }};
  }
  const std::uint64_t seed = in.required_seed();
  const std::size_t k = in.count("count", 100);
  return {[=] {
    Rng rng(seed);
    Verdict v;
    const double etas[] = {0.0, eps / 2.0, eps};
    for (std::size_t i = 0; i < k; ++i) {
      const double eta = etas[i % 3];
      const CSubdiffDescriptor df(f, x0, eta, ctx);
      const CSubdiffDescriptor dg(g, x0, eps - eta, ctx);
      if (df.empty() || dg.empty()) {
        continue;
      }
      const DualTriple wf = df.sample_members(rng, 1).back();
      const DualTriple wg = dg.sample_members(rng, 1).back();
      v.merge(check_sum_rule(f, g, x0, eps, eta, wf, wg, ctx));
    }
    v.sampled = true;
    if (v.outcome == Outcome::Vacuous) {
      v.detail = "no instance met the precondition";
    }
    return v;
  }};
}

Prepared subdiff_in_domfc(const Input& in) {
  const FunctionModel f = in.function("function");
  const Point x0 = in.point();
  std::vector<DualTriple> samples;
  std::optional<std::uint64_t> seed;
  std::size_t k = 0;
  if (in.node.has("samples")) {
    samples = in.node.at("samples").triples(in.n());
  } else {
    seed = in.required_seed();
    k = in.count("count", 200);
  }
  const EvalContext ctx = in.ctx;
  return {[=] {
    std::vector<DualTriple> ws = samples;
    if (seed) {
      Rng rng(*seed);
      ws = mixed_triples(CSubdiffDescriptor(f, x0, 0.0, ctx), rng, k);
    }
    Verdict v = check_subdiff_in_domfc(f, x0, ws, ctx);
    v.sampled = true;
    return v;
  }};
}

Prepared cprime_iv(const Input& in) {
  const WFunctionModel g = in.w_function("w_function");
  const DualTriple w0 = in.triple("w0");
  const Point x0 = in.point();
  const std::uint64_t seed = in.required_seed();
  const std::size_t k = in.count("count", 200);
  const EvalContext ctx = in.ctx;
  return {[=] { return check_theorem1_iv(g, w0, x0, ctx, seed, k); }};
}

Prepared envelope(const Input& in) {
  const FunctionModel f = in.function("function");
  const Point x0 = in.point();
  const std::vector<Point> xs = in.node.at("x").points(in.n());
  const std::uint64_t seed = in.required_seed();
  const std::size_t k = in.count("count", 50);
  const EvalContext ctx = in.ctx;
  return {[=] {
    Verdict v;
    for (const Point& x : xs) {
      v.merge(envelope_reconstruct(f, x0, x, ctx, seed, k));
    }
    return v;
  }};
}

Prepared dirderiv_identity(const Input& in) {
  const FunctionModel f = in.function("function");
  const Point x0 = in.point();
  const double eps = in.eps();
  std::vector<DualTriple> samples;
  std::optional<std::uint64_t> seed;
  std::size_t k = 0;
  if (in.node.has("samples")) {
    samples = in.node.at("samples").triples(in.n());
  } else {
    seed = in.required_seed();
    k = in.count("count", 200);
  }
  const EvalContext ctx = in.ctx;
  return {[=] {
    std::vector<DualTriple> ws = samples;
    if (seed) {
      Rng rng(*seed);
      ws = mixed_triples(CSubdiffDescriptor(f, x0, eps, ctx), rng, k);
    }
    return check_theorem_dd(f, x0, eps, ws, ctx);
  }};
}

Prepared dirderiv_bound(const Input& in) {
  const FunctionModel f = in.function("function");
  const Point x0 = in.point();
  const Vec u = in.node.at("direction").vec(in.n());
  const double eps = in.eps();
  std::vector<DualTriple> samples;
  if (in.node.has("samples")) {
    samples = in.node.at("samples").triples(in.n());
  }
  const std::uint64_t seed = in.required_seed();
  const EvalContext ctx = in.ctx;
  return {[=] { return check_corollary_dd_bound(f, x0, u, eps, samples, ctx, seed); }};
}

Prepared sup_identity(const Input& in) {
  const FunctionModel f = in.function("f");
  const FunctionModel g = in.function("g");
  const double tol = in.node.has("tol") ? in.node.at("tol").real() : 1e-3;
  std::vector<DualTriple> ws;
  if (in.node.has("w_samples")) {
    ws = in.node.at("w_samples").triples(in.n());
  }
  const EvalContext ctx = in.ctx;
  const std::size_t n = in.n();
  return {[=] {
    const TolandGap gap = toland_gap(f, g, ctx.grid.x_lattice(n), ws, ctx);
    Verdict v;
    v.values.emplace_back("lhs", gap.lhs);
    v.values.emplace_back("rhs", gap.rhs);
    if (ext_close(gap.lhs, gap.rhs, tol)) {
      v.record_pass();
      v.detail = "both suprema agree";
    } else {
      v.detail = "suprema differ";
      if (gap.lhs_at) {
        v.record_fail(point_witness(*gap.lhs_at, {{"lhs", gap.lhs}, {"rhs", gap.rhs}}, "maximiser of g - f"));
      }
      if (gap.rhs_at) {
        v.record_fail(triple_witness(*gap.rhs_at, {{"lhs", gap.lhs}, {"rhs", gap.rhs}}, "maximiser of f^c - g^c"));
      }
      if (v.witnesses.empty()) {
        v.record_inconclusive("suprema differ but neither side has a maximiser");
      }
    }
    return v;
  },
          true};
}

Prepared dc_inclusion(const Input& in) {
  const DCProblem& p = in.dc();
  const Point x0 = in.point();
  const double eps = in.eps();
  const std::vector<double> lambdas = in.grid_list("lambdas", kDefaultLambdas);
  const std::uint64_t seed = in.required_seed();
  const std::size_t k = in.count("count", 100);
  const EvalContext ctx = in.ctx;
  return {[=, &p] { return check_dc_subdiff_inclusion(p, x0, eps, lambdas, ctx, seed, k); }, true};
}

Prepared global_necessary(const Input& in) {
  const DCProblem& p = in.dc();
  const Point a = in.point();
  const std::vector<double> eps_grid = in.grid_list("eps_grid", kDefaultEpsilons);
  const InclusionParts parts = in.parts();
  const std::uint64_t seed = in.required_seed();
  const std::size_t k = in.count("count", 100);
  const EvalContext ctx = in.ctx;
  return {[=, &p] { return check_global_necessary(p, a, eps_grid, ctx, seed, k, parts); }};
}

Prepared eps_necessary(const Input& in) {
  const DCProblem& p = in.dc();
  const Point a = in.point();
  const double eps = in.eps();
  const std::vector<double> lambdas = in.grid_list("lambdas", kDefaultLambdas);
  const InclusionParts parts = in.parts();
  const std::uint64_t seed = in.required_seed();
  const std::size_t k = in.count("count", 100);
  const EvalContext ctx = in.ctx;
  return {[=, &p] { return check_eps_necessary(p, a, eps, lambdas, ctx, seed, k, parts); }};
}

Prepared eps_minimizer(const Input& in) {
  const DCProblem& p = in.dc();
  const Point a = in.point();
  const double eps = in.eps();
  const EvalContext ctx = in.ctx;
  return {[=, &p] { return is_eps_minimizer(p, a, eps, ctx); }, true};
}

Prepared dc_value_check(const Input& in) {
  const DCProblem& p = in.dc();
  const Point x = in.point();
  std::optional<ExtReal> expected;
  if (in.node.has("expect_value")) {
    expected = in.node.at("expect_value").ext();
  }
  const double tol = in.node.has("value_tol") ? in.node.at("value_tol").real() : 0.0;
  return {[=, &p] {
    Verdict v;
    Diagnostics diag;
    const ExtReal value = dc_value(p, x, &diag);
    v.values.emplace_back("f", p.f.evaluate(x));
    v.values.emplace_back("g", p.g.evaluate(x));
    v.values.emplace_back("dc_value", value);
    if (!expected || ext_close(value, *expected, tol)) {
      v.record_pass();
      v.detail = expected ? "value as expected" : "value computed";
    } else {
      v.record_fail(point_witness(x, {{"dc_value", value}, {"expected", *expected}}, "unexpected value"));
      v.detail = "value differs from the expected one";
    }
    for (const std::string& w : diag.warnings) {
      v.detail += "; " + w;
    }
    return v;
  }};
}

Prepared monotonicity(const Input& in) {
  const FunctionModel f = in.function("function");
  const Point x0 = in.point();
  const std::uint64_t seed = in.required_seed();
  const std::size_t k = in.count("count", 200);
  const EvalContext ctx = in.ctx;
  return {[=] {
    Rng rng(seed);
    Verdict v;
    const ExtReal fx0 = f.evaluate(x0);
    if (!fx0.is_finite()) {
      v.detail = "f(x0) is not finite; every subdifferential is empty";
      return v;
    }
    const CSubdiffDescriptor wide(f, x0, 2.0, ctx);
    const std::vector<DualTriple> ws = mixed_triples(wide, rng, k);
    std::size_t implications = 0;
    for (const DualTriple& w : ws) {
      const double e1 = uniform(rng, 0.0, 1.0);
      const double e2 = e1 + uniform(rng, 0.0, 1.0);
      const bool in1 = c_eps_subdiff_member(f, x0, w, e1, ctx);
      const bool in2 = c_eps_subdiff_member(f, x0, w, e2, ctx);
      if (in1) {
        ++implications;
        if (!in2) {
          v.record_fail(triple_witness(w, {{"eps_small", e1}, {"eps_large", e2}}, "member at the smaller eps only"));
          continue;
        }
      }
      // Nested intersection: membership for every eps' > e1 on a decreasing
      // sequence against membership at e1, away from the boundary band.
      bool all = true;
      for (int j = 1; j <= 6; ++j) {
        all = all && c_eps_subdiff_member(f, x0, w, e1 + std::pow(10.0, -j), ctx);
      }
      const ExtReal conj = c_conjugate(f, w, ctx).value;
      const ExtReal pair = coupling_c(x0, w, ctx.tol);
      const bool in_band = conj.is_finite() && pair.is_finite() &&
                           std::abs(fx0.value() + conj.value() - pair.value() - e1) <= 1e-5;
      if (all != in1 && !in_band) {
        v.record_fail(triple_witness(w, {{"eps", e1}, {"member_at_eps", flag(in1)}, {"member_above_eps", flag(all)}},
                                     "nested intersection differs from the set at eps"));
        continue;
      }
      v.record_pass();
    }
    v.sampled = true;
    v.values.emplace_back("samples", static_cast<double>(ws.size()));
    v.values.emplace_back("implications_tested", static_cast<double>(implications));
    v.detail = v.outcome == Outcome::Fail ? "monotonicity or nesting violated" : "monotone and nested on all samples";
    return v;
  }};
}

Prepared conjugate_value(const Input& in) {
  const FunctionModel f = in.function("function");
  const DualTriple w = in.triple("w");
  std::optional<ExtReal> expected;
  if (in.node.has("expect_value")) {
    expected = in.node.at("expect_value").ext();
  }
  std::optional<double> value_tol;
  if (in.node.has("value_tol")) {
    value_tol = in.node.at("value_tol").real();
  }
  std::optional<Point> expected_argmax;
  double argmax_tol = 0.0;
  if (in.node.has("expect_argmax")) {
    expected_argmax = in.node.at("expect_argmax").vec(in.n());
    argmax_tol = in.node.has("argmax_tol") ? in.node.at("argmax_tol").real() : 0.0;
  }
  const EvalContext ctx = in.ctx;
  return {[=] {
    Verdict v;
    const ConjugateResult r = c_conjugate(f, w, ctx);
    v.values.emplace_back("value", r.value);
    if (r.argmax) {
      for (std::size_t i = 0; i < r.argmax->size(); ++i) {
        v.values.emplace_back("argmax_" + std::to_string(i), (*r.argmax)[i]);
      }
    }
    bool ok = true;
    if (expected) {
      const double tol = value_tol ? *value_tol
                                   : (r.value.is_finite() && expected->is_finite()
                                          ? ctx.tol.value_tol(r.value.value(), expected->value())
                                          : 0.0);
      ok = ext_close(r.value, *expected, tol);
    }
    if (ok && expected_argmax) {
      ok = r.argmax && (*r.argmax - *expected_argmax).norm() <= argmax_tol;
    }
    if (ok) {
      v.record_pass();
      v.detail = expected ? "value as expected" : "value computed";
    } else {
      std::vector<NamedValue> vals{{"value", r.value}};
      if (expected) {
        vals.emplace_back("expected", *expected);
      }
      v.record_fail(triple_witness(w, std::move(vals), "unexpected conjugate value or maximiser"));
      v.detail = "conjugate differs from the expectation";
    }
    return v;
  }};
}

struct Labelled {
  DualTriple w;
  bool member = false;
};

std::vector<Labelled> labelled_triples(const Input& in) {
  const Node list = in.node.at("triples");
  std::vector<Labelled> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Node item = list.index(i);
    out.push_back({item.at("w").triple(in.n()), item.at("member").boolean()});
  }
  return out;
}

Verdict classify(const std::vector<Labelled>& items, const std::function<bool(const DualTriple&)>& member) {
  Verdict v;
  std::size_t members = 0;
  for (const Labelled& item : items) {
    const bool got = member(item.w);
    members += got ? 1 : 0;
    if (got == item.member) {
      v.record_pass();
    } else {
      v.record_fail(triple_witness(item.w, {{"computed", flag(got)}, {"labelled", flag(item.member)}},
                                   "classification differs from the label"));
    }
  }
  v.values.emplace_back("triples", static_cast<double>(items.size()));
  v.values.emplace_back("members", static_cast<double>(members));
  v.values.emplace_back("mismatches", static_cast<double>(v.witnesses.size()));
  v.detail = v.outcome == Outcome::Fail ? "mismatched labels" : "every label reproduced";
  return v;
}

Prepared domfc_classification(const Input& in) {
  const FunctionModel f = in.function("function");
  const std::vector<Labelled> items = labelled_triples(in);
  const EvalContext ctx = in.ctx;
  return {[=] { return classify(items, [&](const DualTriple& w) { return dom_fc_member(f, w, ctx); }); }};
}

Prepared subdiff_membership(const Input& in) {
  const FunctionModel f = in.function("function");
  const Point x0 = in.point();
  const double eps = in.eps();
  const std::vector<Labelled> items = labelled_triples(in);
  const EvalContext ctx = in.ctx;
  return {[=] {
    return classify(items, [&](const DualTriple& w) { return c_eps_subdiff_member(f, x0, w, eps, ctx); });
  }};
}

struct Entry {
  const char* id;
  const char* anchor;
  Prepared (*prepare)(const Input&);
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {"def-econvex-separation", "a point outside an evenly convex set is strictly separated from it by a linear functional",
       separation},
      {"thm-biconjugate", "f^{cc'} is the evenly convex hull of f: never above f, equal to f when f is evenly convex",
       biconjugate_check},
      {"thm-eprime-convexity", "a c-conjugate is e'-convex: g^{c'c} = g", eprime_convexity},
      {"eq-product-form", "eps-c-subdifferential = Fenchel eps-subdifferential x separation cone of dom f", product_form},
      {"prop-conjugate-flip", "w is a c-subgradient of f at x0 iff x0 is a c'-subgradient of f^c at w (converse for evenly convex f)",
       conjugate_flip},
      {"thm-sum-rule", "an eta-c-subgradient of f plus an (eps-eta)-c-subgradient of g is an eps-c-subgradient of f+g",
       sum_rule},
      {"prop-subdiff-in-domfc", "the c-subdifferential of f at x0 lies in dom f^c", subdiff_in_domfc},
      {"thm-cprime-iv", "a c'-subgradient of g, with dom g on the right side of its halfspace, gives an affine minorant of g",
       cprime_iv},
      {"prop-envelope", "f(x) - f(x0) is the supremum of c(x,w) - c(x0,w) over c-subgradients at x0", envelope},
      {"thm-dirderiv-identity",
       "the c-subdifferential of the eps-directional derivative at 0 equals the eps-c-subdifferential restricted to normal directions",
       dirderiv_identity},
      {"cor-dirderiv-bound", "the eps-directional derivative dominates c(u,w) over restricted eps-c-subgradients",
       dirderiv_bound},
      {"lemma-sup-identity", "sup (g - f) = sup (f^c - g^c)", sup_identity},
      {"thm-dc-inclusion", "eps-c-subdifferential of f-g inside the star-difference of the (eps+lambda)- and lambda-subdifferentials",
       dc_inclusion},
      {"cor-global-necessary", "at a global minimiser of f-g every eps-c-subdifferential of g lies in that of f",
       global_necessary},
      {"cor-eps-necessary", "at an eps-minimiser of f-g the lambda-c-subdifferential of g lies in the (eps+lambda)-one of f",
       eps_necessary},
      {"eps-minimizer", "h(a) - eps <= h(x) for every x of the search lattice", eps_minimizer},
      {"dc-value", "value of f-g with +inf - (+inf) = +inf", dc_value_check},
      {"monotonicity-nested", "eps-c-subdifferentials grow with eps; each is the intersection of the larger ones",
       monotonicity},
      {"conjugate-value", "value and maximiser of the c-conjugate at a triple", conjugate_value},
      {"dom-fc-classification", "membership of triples in dom f^c", domfc_classification},
      {"subdiff-membership", "membership of triples in the eps-c-subdifferential at x0", subdiff_membership},
  };
  return entries;
}

const Entry& entry(const CheckSpec& spec) {
  for (const Entry& e : registry()) {
    if (spec.id == e.id) {
      return e;
    }
  }
  throw ValidationError(spec.path + "/id", "unknown check id \"" + spec.id + "\"");
}

Prepared prepare(const Problem& p, const CheckSpec& spec, const RunOptions& opt, unsigned inner_threads) {
  const Node node(spec.params, spec.path);
  EvalContext ctx = apply_options(detail::check_context(p, node), opt);
  ctx.threads = inner_threads;
  const Input in{p, node, ctx, opt.seed ? opt.seed : spec.seed};
  try {
    return entry(spec).prepare(in);
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(spec.path, e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(spec.path, e.what());
  }
}

std::string mode_name(const Problem& p, const CheckSpec& spec, bool grid_only) {
  if (grid_only) {
    return "GRID";
  }
  const EvalContext ctx = detail::check_context(p, Node(spec.params, spec.path));
  return ctx.is_exact() ? "EXACT" : "GRID";
}

CheckRecord run_prepared(const Problem& p, const CheckSpec& spec, const RunOptions& opt, unsigned inner_threads) {
  CheckRecord rec;
  rec.check_id = spec.id;
  rec.label = spec.label;
  rec.anchor = entry(spec).anchor;
  const Prepared prep = prepare(p, spec, opt, inner_threads);
  rec.mode = mode_name(p, spec, prep.grid_only);
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = prep.run();
  } catch (const HypothesisNotCertified& e) {
    v = Verdict{};
    v.detail = std::string("hypothesis not certified: ") + e.what();
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    v = Verdict{};
    v.record_inconclusive(e.what());
  } catch (const std::invalid_argument& e) {
    v = Verdict{};
    v.record_inconclusive(e.what());
  }
  rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rec.outcome = v.outcome;
  if (spec.expect) {
    rec.expected = spec.expect;
    if (v.outcome == *spec.expect) {
      v.outcome = Outcome::Pass;
    } else {
      v.outcome = Outcome::Fail;
      if (v.witnesses.empty()) {
        const Node node(spec.params, spec.path);
        Witness w;
        if (node.has("point")) {
          const Point x = node.at("point").vec(p.space_dim);
          w = point_witness(x, v.values, "");
        } else if (node.has("w")) {
          w = triple_witness(node.at("w").triple(p.space_dim), v.values, "");
        } else {
          w.kind = "none";
          w.values = v.values;
        }
        w.note = "expected " + to_string(*spec.expect) + ", got " + to_string(*rec.outcome);
        v.witnesses.push_back(std::move(w));
      }
    }
  }
  rec.verdict = std::move(v);
  return rec;
}

} // namespace

EvalContext apply_options(EvalContext ctx, const RunOptions& opt) {
  if (opt.tol && !ctx.tol.is_exact()) {
    ctx.tol = TolerancePolicy::grid(*opt.tol, *opt.tol);
  }
  if (opt.max_nodes) {
    ctx.grid.max_nodes = *opt.max_nodes;
  }
  ctx.threads = std::max(1U, opt.threads);
  return ctx;
}

const std::vector<std::string>& registry_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const Entry& e : registry()) {
      out.emplace_back(e.id);
    }
    return out;
  }();
  return ids;
}

std::string anchor_for(const std::string& id) {
  for (const Entry& e : registry()) {
    if (id == e.id) {
      return e.anchor;
    }
  }
  throw ValidationError("/id", "unknown check id \"" + id + "\"");
}

void validate_checks(const Problem& p) {
  for (const CheckSpec& spec : p.checks) {
    (void)prepare(p, spec, {}, 1);
  }
}

CheckRecord run_check(const Problem& p, const CheckSpec& spec, const RunOptions& opt) {
  return run_prepared(p, spec, opt, std::max(1U, opt.threads));
}

Report run_problem(const Problem& p, const std::string& input_hash, const RunOptions& opt,
                   const std::vector<std::string>& only) {
  std::vector<const CheckSpec*> selected;
  for (const CheckSpec& spec : p.checks) {
    if (only.empty() || std::find(only.begin(), only.end(), spec.id) != only.end() ||
        std::find(only.begin(), only.end(), spec.label) != only.end()) {
      selected.push_back(&spec);
    }
  }
  for (const std::string& id : only) {
    if (std::find(registry_ids().begin(), registry_ids().end(), id) == registry_ids().end() &&
        std::none_of(p.checks.begin(), p.checks.end(), [&](const CheckSpec& s) { return s.label == id; })) {
      throw ValidationError("--only", "unknown check id or label \"" + id + "\"");
    }
  }

  Report r;
  r.input_hash = input_hash;
  r.timing = opt.timing;
  r.records.resize(selected.size());
  const unsigned threads = std::max(1U, opt.threads);
  const unsigned workers = std::min<unsigned>(threads, std::max<std::size_t>(1, selected.size()));
  const unsigned inner = std::max(1U, threads / workers);
  std::vector<std::exception_ptr> errors(selected.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < selected.size(); i = next++) {
      try {
        r.records[i] = run_prepared(p, *selected[i], opt, inner);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) {
    pool.emplace_back(work);
  }
  work();
  for (auto& t : pool) {
    t.join();
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return r;
}

} // namespace econv::harness
