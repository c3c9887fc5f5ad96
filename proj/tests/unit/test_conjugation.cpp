#include "doctest.h"

#include "test_support.hpp"

#include "econv/conjugation.hpp"
#include "econv/errors.hpp"

#include <cmath>
#include <random>

using namespace econv;
using namespace econv::testing;

namespace {

EvalContext grid_ctx(double x_lo, double x_hi, double x_step, double w_lo = -2.0, double w_hi = 2.0,
                     double w_step = 0.5) {
  GridConfig g;
  g.x_box = Box::cube(1, x_lo, x_hi);
  g.x_step = x_step;
  g.w_box = Box::cube(3, w_lo, w_hi);
  g.w_step = w_step;
  return EvalContext::grid_mode(g, TolerancePolicy::grid(1e-9, 1e-9));
}

/// Conjugate of x ln(x/y) on E plus the origin, in closed form.
double xlogxy_conjugate_oracle(double s1, double s2) {
  const double peak = s2 >= -1.0 ? s1 + s2 : s1 - 1.0 - std::log(-s2);
  return std::max(0.0, peak);
}

} // namespace

TEST_CASE("c-conjugate of x^2 on x > 0") {
  const FunctionModel f = square_on_positive();
  const ConjugateResult r = c_conjugate(f, {Vec{3.0}, Vec{0.0}, 1.0});
  CHECK(r.value == ExtReal(2.25));
  REQUIRE(r.argmax.has_value());
  CHECK((*r.argmax)[0] == 1.5);

  // x = 6 lies in dom f and violates <x, 1> < 5, so the supremum is +inf.
  CHECK(member(f.domain(), Vec{6.0}));
  CHECK_FALSE(6.0 * 1.0 < 5.0);
  CHECK(c_conjugate(f, {Vec{0.0}, Vec{1.0}, 5.0}).value.is_pos_inf());

  CHECK(c_conjugate(FunctionModel::affine(Vec{1.0}, 0.0), {Vec{1.0}, Vec{0.0}, 1.0}).value == ExtReal(0.0));
  CHECK(c_conjugate(FunctionModel::affine(Vec{1.0}, 0.0), {Vec{1.5}, Vec{0.0}, 1.0}).value.is_pos_inf());
}

TEST_CASE("GRID c-conjugate of x^2 on x > 0") {
  const EvalContext ctx = grid_ctx(0.0, 10.0, 1e-3);
  const ConjugateResult r = c_conjugate(square_on_positive(), {Vec{3.0}, Vec{0.0}, 1.0}, ctx);
  CHECK(std::abs(r.value.value() - 2.25) <= 1e-3);
  REQUIRE(r.argmax.has_value());
  CHECK(std::abs((*r.argmax)[0] - 1.5) <= 1e-2);
}

TEST_CASE("Fenchel conjugates") {
  CHECK(fenchel_conjugate(square_on_line(), Vec{2.0}).value == ExtReal(1.0));
  const ConjugateResult r = fenchel_conjugate(square_on_positive(), Vec{-1.0});
  CHECK(r.value == ExtReal(0.0));
  // Oracle: -x - x^2 < 0 on x > 0 and tends to 0.
  for (double x : {1e-1, 1e-4, 1e-8}) {
    CHECK(-x - x * x < 0.0);
    CHECK(-x - x * x > -2.0 * x);
  }
  const ConjugateResult h = fenchel_conjugate(halfplane_indicator(), Vec{1.0, 1.0});
  CHECK(h.value.value() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fenchel_conjugate(halfplane_indicator(), Vec{1.0, 0.0}).value.is_pos_inf());
  CHECK(fenchel_conjugate(halfplane_indicator(), Vec{0.0, 0.0}).value == ExtReal(0.0));
}

TEST_CASE("conjugate of x ln(x/y) on E with the origin") {
  const FunctionModel f = xlogxy_example();
  std::mt19937_64 rng(51);
  for (int i = 0; i < 200; ++i) {
    const double s1 = uniform(rng, -3.0, 3.0);
    const double s2 = uniform(rng, -6.0, 3.0);
    const double got = fenchel_conjugate(f, Vec{s1, s2}).value.value();
    CHECK(got == doctest::Approx(xlogxy_conjugate_oracle(s1, s2)).epsilon(1e-7));
  }
  for (double t : {0.0, 0.25, 0.5, 1.0}) {
    CHECK(fenchel_conjugate(f, Vec{t, t}).value.value() == doctest::Approx(2.0 * t).epsilon(1e-9));
  }
  // The origin is attained, so sup of <x, (-1, 0)> over dom f is 0 and attained.
  CHECK(c_conjugate(f, {Vec{0.0, 0.0}, Vec{-1.0, 0.0}, 0.0}).value.is_pos_inf());
  CHECK(c_conjugate(f, {Vec{0.0, 0.0}, Vec{1.0, 0.0}, 1.5}).value == ExtReal(0.0));
}

TEST_CASE("two-dimensional concave QP conjugates agree with brute force") {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 16; ++trial) {
    Matrix q = Matrix::zero(2);
    const double a = uniform(rng, -1.0, 1.0);
    const double b = uniform(rng, -1.0, 1.0);
    const int rank = trial % 3;
    if (rank >= 1) {
      q(0, 0) = a * a;
      q(0, 1) = q(1, 0) = a * b;
      q(1, 1) = b * b;
    }
    if (rank == 2) {
      q(0, 0) += 0.5;
      q(1, 1) += 0.2;
    }
    std::vector<XHalfspace> hs;
    for (int k = 0; k < 4; ++k) {
      const double ang = uniform(rng, 0.0, 6.283185307179586);
      hs.push_back({Vec{std::cos(ang), std::sin(ang)}, uniform(rng, 0.2, 1.0), rng() % 2 == 0});
    }
    hs.push_back({Vec{1.0, 0.0}, 1.5, false});
    hs.push_back({Vec{-1.0, 0.0}, 1.5, true});
    hs.push_back({Vec{0.0, 1.0}, 1.5, true});
    hs.push_back({Vec{0.0, -1.0}, 1.5, false});
    const FlaggedConvexSet dom(2, hs);
    const Vec lin{uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
    const FunctionModel f = FunctionModel::quadratic(q, lin, 0.3, dom);
    const Vec s{uniform(rng, -3.0, 3.0), uniform(rng, -3.0, 3.0)};

    double brute = -INFINITY;
    const double step = 0.004;
    for (double x = -1.5; x <= 1.5; x += step) {
      for (double y = -1.5; y <= 1.5; y += step) {
        const ExtReal v = f.evaluate(Point{x, y});
        if (v.is_finite()) {
          brute = std::max(brute, x * s[0] + y * s[1] - v.value());
        }
      }
    }
    const ConjugateResult r = fenchel_conjugate(f, s);
    REQUIRE(r.value.is_finite());
    CHECK(r.value.value() >= brute - 1e-9);
    CHECK(r.value.value() <= brute + 0.05);
  }
}

TEST_CASE("unbounded two-dimensional conjugates") {
  const FlaggedConvexSet half(2, {{Vec{0.0, -1.0}, 0.0, false}}); // y >= 0
  const FunctionModel lin = FunctionModel::indicator(half);
  CHECK(fenchel_conjugate(lin, Vec{0.0, 1.0}).value.is_pos_inf());
  CHECK(fenchel_conjugate(lin, Vec{0.0, -1.0}).value == ExtReal(0.0));
  CHECK(fenchel_conjugate(lin, Vec{1.0, -1.0}).value.is_pos_inf());
  // x^2 on y >= 0: bounded in x, unbounded along +y for s2 > 0.
  const FunctionModel q = FunctionModel::quadratic(Matrix::diagonal(Vec{1.0, 0.0}), Vec{0.0, 0.0}, 0.0, half);
  CHECK(fenchel_conjugate(q, Vec{2.0, 0.5}).value.is_pos_inf());
  CHECK(fenchel_conjugate(q, Vec{2.0, -0.5}).value == ExtReal(1.0));
  CHECK(fenchel_conjugate(q, Vec{2.0, 0.0}).value == ExtReal(1.0));
}

TEST_CASE("c'-conjugates and biconjugates") {
  const WFunctionModel g = WFunctionModel::conjugate_of(square_on_positive());
  CHECK(c_prime_conjugate(g, Vec{1.0}) == ExtReal(1.0));
  CHECK(c_prime_conjugate(g, Vec{-1.0}).is_pos_inf());
  const WFunctionModel ga = WFunctionModel::conjugate_of(FunctionModel::affine(Vec{1.0}, 0.0));
  CHECK(c_prime_conjugate(ga, Vec{5.0}) == ExtReal(5.0));

  CHECK(biconjugate(identity_on_positive(), Vec{1.0}) == ExtReal(1.0));
  CHECK(biconjugate(FunctionModel::affine(Vec{-2.0}, 1.0), Vec{3.0}) == ExtReal(-5.0));
  CHECK(biconjugate(square_on_positive(), Vec{0.0}).is_pos_inf());

  // GRID oracle: the hull is +inf at 0 and matches f away from the boundary.
  const EvalContext ctx = grid_ctx(0.0, 3.0, 0.01, -4.0, 4.0, 0.25);
  CHECK(biconjugate(square_on_positive(), Vec{0.0}, ctx).is_pos_inf());
  for (double x : {0.5, 1.0, 1.5}) {
    const ExtReal v = biconjugate(square_on_positive(), Vec{x}, ctx);
    CHECK(v.value() <= x * x + 1e-12);
    CHECK(v.value() >= x * x - 0.05);
  }
  CHECK(c_prime_conjugate(g, Vec{1.0}, ctx).value() == doctest::Approx(1.0).epsilon(0.05));

  const FunctionModel grid = grid_sample(square_on_line(), {-1.0}, {1.0}, 0.5);
  CHECK_THROWS_AS(biconjugate(grid, Vec{0.0}), NotSupported);
  CHECK_THROWS_AS(c_conjugate(grid, {Vec{0.0}, Vec{0.0}, 1.0}), NotSupported);
}

TEST_CASE("dom f^c membership") {
  const FunctionModel f = square_on_positive();
  CHECK(dom_fc_member(f, {Vec{7.0}, Vec{-1.0}, 0.0}));
  CHECK_FALSE(dom_fc_member(f, {Vec{7.0}, Vec{0.0}, 0.0}));
  CHECK_FALSE(dom_fc_member(f, {Vec{7.0}, Vec{1.0}, 1.0}));
  CHECK(dom_fc_member(f, {Vec{7.0}, Vec{0.0}, 1.0}));
  CHECK(dom_fc_member(f, {Vec{-1.0}, Vec{-2.0}, 0.5}));
}

TEST_CASE("e'-convexity checks") {
  const WFunctionModel g = WFunctionModel::conjugate_of(square_on_positive());
  const std::vector<DualTriple> samples = {
      {Vec{3.0}, Vec{0.0}, 1.0}, {Vec{-1.0}, Vec{-1.0}, 0.0}, {Vec{2.0}, Vec{-0.5}, 2.0}, {Vec{1.0}, Vec{1.0}, 1.0}};
  const Verdict v = eprime_convexity_check(g, samples);
  CHECK(v.outcome == Outcome::Pass);
  CHECK(v.checked == samples.size());

  // A c'-elementary function w -> c'(w, 0.5) - 0.25 tabulated on a W lattice.
  const Lattice lat({-2.0, -2.0, -2.0}, {2.0, 2.0, 2.0}, 0.5);
  const Point xbar{0.5};
  std::vector<ExtReal> values(lat.size());
  std::vector<DualTriple> nodes;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const DualTriple w = triple_from_coords(lat.node(i), 1);
    nodes.push_back(w);
    values[i] = sub_conj(coupling_cprime(w, xbar), 0.25);
  }
  const EvalContext ctx = grid_ctx(-2.0, 2.0, 0.25);
  const Verdict ok = eprime_convexity_check(WFunctionModel::grid(1, lat, values), nodes, ctx);
  CHECK(ok.outcome == Outcome::Pass);

  const DualTriple bumped{Vec{1.0}, Vec{0.0}, 1.0};
  const std::size_t k = *lat.nearest(coords_from_triple(bumped));
  auto raised = values;
  raised[k] = raised[k].value() + 1.0;
  const Verdict up = eprime_convexity_check(WFunctionModel::grid(1, lat, raised), nodes, ctx);
  CHECK(up.outcome == Outcome::Fail);
  REQUIRE(up.witnesses.size() == 1);
  CHECK(up.witnesses[0].coords == coords_from_triple(bumped));

  auto lowered = values;
  lowered[k] = lowered[k].value() - 1.0;
  const Verdict down = eprime_convexity_check(WFunctionModel::grid(1, lat, lowered), nodes, ctx);
  CHECK(down.outcome == Outcome::Fail);
  CHECK_FALSE(down.witnesses.empty());
}

TEST_CASE("property: the biconjugate never exceeds f on the grid") {
  const EvalContext ctx = grid_ctx(-2.0, 3.0, 0.05, -3.0, 3.0, 0.5);
  const std::vector<FunctionModel> fs = {square_on_positive(), identity_on_positive(), square_on_line(),
                                         FunctionModel::affine(Vec{1.5}, -0.5),
                                         FunctionModel::indicator(interval_set(-1.0, true, 2.0, false))};
  const Lattice xl = ctx.grid.x_lattice(1);
  for (const FunctionModel& f : fs) {
    for (std::size_t i = 0; i < xl.size(); ++i) {
      const Point x{xl.node(i)[0]};
      const ExtReal hull = biconjugate(f, x, ctx);
      const ExtReal fx = f.evaluate(x);
      INFO(f.describe() << " at " << x.to_string() << ": " << hull.to_string());
      if (hull.is_finite() && fx.is_finite()) {
        CHECK(ctx.tol.less_equal(hull.value(), fx.value()));
      } else {
        CHECK(hull <= fx);
      }
    }
  }
}

TEST_CASE("property: u* = 0 slices are constant in alpha and equal the Fenchel conjugate") {
  std::mt19937_64 rng(53);
  const std::vector<FunctionModel> fs = {square_on_positive(), square_on_line(), identity_on_positive(),
                                         FunctionModel::indicator(interval_set(-1.0, true, 2.0, false))};
  for (int i = 0; i < 300; ++i) {
    const FunctionModel& f = fs[i % fs.size()];
    const double s = uniform(rng, -4.0, 4.0);
    const ExtReal ref = fenchel_conjugate(f, Vec{s}).value;
    for (double alpha : {0.5, 1.0, 10.0}) {
      CHECK(c_conjugate(f, {Vec{s}, Vec{0.0}, alpha}).value == ref);
    }
  }
  const FunctionModel e = xlogxy_example();
  for (int i = 0; i < 40; ++i) {
    const Vec s{uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)};
    const ExtReal ref = fenchel_conjugate(e, s).value;
    for (double alpha : {0.5, 1.0, 10.0}) {
      CHECK(c_conjugate(e, {s, Vec{0.0, 0.0}, alpha}).value == ref);
    }
  }
}

TEST_CASE("property: GRID conjugates converge under step halving") {
  const std::vector<std::pair<FunctionModel, DualTriple>> cases = {
      {square_on_positive(), {Vec{3.0}, Vec{0.0}, 1.0}},
      {square_on_positive(), {Vec{1.0}, Vec{-1.0}, 0.0}},
      {square_on_line(), {Vec{2.0}, Vec{0.0}, 1.0}},
      {identity_on_positive(), {Vec{0.5}, Vec{0.0}, 1.0}}};
  for (const auto& [f, w] : cases) {
    const double exact = c_conjugate(f, w).value.value();
    double prev = INFINITY;
    for (double step : {4e-3, 2e-3, 1e-3}) {
      const double v = c_conjugate(f, w, grid_ctx(-5.0, 5.0, step)).value.value();
      CHECK(v <= exact + 1e-12);
      CHECK(exact - v <= 4.0 * step);
      if (std::isfinite(prev)) {
        CHECK(std::abs(v - prev) <= 4.0 * step);
      }
      prev = v;
    }
  }
}

TEST_CASE("property: c-elementary minorants of f stay below the biconjugate") {
  std::mt19937_64 rng(54);
  const FunctionModel f = square_on_positive();
  for (int i = 0; i < 300; ++i) {
    const DualTriple w{Vec{uniform(rng, -4.0, 4.0)}, Vec{uniform(rng, -2.0, 0.0)}, uniform(rng, 0.0, 2.0)};
    const ExtReal fc = c_conjugate(f, w).value;
    if (!fc.is_finite()) {
      continue;
    }
    // beta >= f^c(w) makes x -> c(x,w) - beta a minorant of f.
    const CElementaryMinorant m{w, fc.value() + uniform(rng, 0.0, 1.0)};
    for (double x : {-1.0, 0.0, 1e-3, 0.5, 1.0, 2.5}) {
      const ExtReal mv = m(Vec{x});
      CHECK(mv <= f.evaluate(Vec{x}));
      CHECK(mv <= biconjugate(f, Vec{x}));
    }
  }
}
