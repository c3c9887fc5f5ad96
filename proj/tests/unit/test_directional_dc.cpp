#include "doctest.h"

#include "test_support.hpp"

#include "econv/directional_dc.hpp"
#include "econv/errors.hpp"

#include <cmath>

using namespace econv;
using namespace econv::testing;

namespace {

DualTriple w1(double xs, double us, double a) { return {Vec{xs}, Vec{us}, a}; }

FunctionModel quad1(double a, double b, FlaggedConvexSet dom = FlaggedConvexSet::whole_space(1)) {
  return FunctionModel::quadratic(Matrix::diagonal(Vec{a}), Vec{b}, 0.0, std::move(dom));
}

DCProblem parabola_problem() {
  return DCProblem(square_on_line(), FunctionModel::affine(Vec{2.0}, 0.0), Box{{-3.0}, {3.0}}, 1e-3);
}

DCProblem wedge_problem() {
  return DCProblem(xlogxy_example(), halfplane_indicator(), Box{{0.0, 0.0}, {2.0, 2.0}}, 0.25);
}

/// Brute-force infimum of the eps-quotient over a fine log grid.
double quotient_oracle(double a, double b, double x0, double u, double eps) {
  double best = INFINITY;
  for (double s = -8.0; s <= 8.0; s += 1e-4) {
    const double t = std::pow(10.0, s);
    const double x = x0 + t * u;
    best = std::min(best, (a * x * x + b * x - a * x0 * x0 - b * x0 + eps) / t);
  }
  return best;
}

} // namespace

TEST_CASE("eps-directional derivative") {
  CHECK(std::abs(eps_directional_derivative(square_on_line(), Vec{0.0}, Vec{1.0}, 0.0).value()) <= 1e-12);
  for (double u : {1.0, -1.0, 2.0, -2.0}) {
    CHECK(std::abs(eps_directional_derivative(square_on_line(), Vec{0.0}, Vec{u}, 1.0).value() - 2.0 * std::abs(u)) <=
          1e-9);
  }
  CHECK(std::abs(eps_directional_derivative(square_on_positive(), Vec{1.0}, Vec{-2.0}, 0.0).value() + 4.0) <= 1e-8);
  // inf_{0<t<1} 1/t over the open domain x < 1.
  const FunctionModel below = FunctionModel::indicator(interval_set(-INFINITY, false, 1.0, false));
  CHECK(std::abs(eps_directional_derivative(below, Vec{0.0}, Vec{1.0}, 1.0).value() - 1.0) <= 1e-9);
  CHECK(eps_directional_derivative(square_on_positive(), Vec{1.0}, Vec{0.0}, 0.3) == ExtReal(0.0));
  // Every step leaves the singleton domain.
  CHECK(eps_directional_derivative(FunctionModel::indicator(interval_set(0.0, true, 0.0, true)), Vec{0.0}, Vec{1.0},
                                   0.0)
            .is_pos_inf());
  // Affine tail: the quotient a u + eps / t decreases to a u as t grows.
  CHECK(std::abs(eps_directional_derivative(FunctionModel::affine(Vec{3.0}, 1.0), Vec{0.0}, Vec{1.0}, 0.5).value() -
                 3.0) <= 1e-9);
  CHECK_THROWS_AS(eps_directional_derivative(square_on_positive(), Vec{-1.0}, Vec{1.0}, 0.0), PointNotInDomain);
}

TEST_CASE("directional derivative of quadratics matches brute force and the support identity") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 60; ++i) {
    const double a = uniform(rng, 0.2, 3.0);
    const double b = uniform(rng, -2.0, 2.0);
    const double x0 = uniform(rng, -2.0, 2.0);
    const double u = uniform(rng, -3.0, 3.0);
    const double eps = uniform(rng, 0.05, 2.0);
    const FunctionModel f = quad1(a, b);
    const double dd = eps_directional_derivative(f, Vec{x0}, Vec{u}, eps).value();
    // Support of [f'(x0) - 2 sqrt(a eps), f'(x0) + 2 sqrt(a eps)] in direction u.
    const double slope = 2.0 * a * x0 + b;
    const double support = slope * u + 2.0 * std::abs(u) * std::sqrt(a * eps);
    CHECK(std::abs(dd - support) <= 1e-8 * std::max(1.0, std::abs(support)));
    CHECK(std::abs(dd - quotient_oracle(a, b, x0, u, eps)) <= 1e-6);
    const CSubdiffDescriptor d = c_subdiff_descriptor(f, Vec{x0}, eps);
    const Interval iv = *d.fenchel_interval();
    CHECK(std::abs(dd - std::max(u * iv.lo, u * iv.hi)) <= 1e-8 * std::max(1.0, std::abs(support)));
  }
}

TEST_CASE("the eps-quotient of a convex quadratic is unimodal on the t grid") {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 50; ++i) {
    const double a = uniform(rng, 0.2, 3.0);
    const double x0 = uniform(rng, -2.0, 2.0);
    const double u = uniform(rng, -3.0, 3.0);
    const double eps = uniform(rng, 0.05, 2.0);
    int turns = 0;
    double prev = INFINITY;
    bool falling = true;
    for (int k = 0; k <= 120; ++k) {
      const double t = std::pow(10.0, -6.0 + 0.1 * k);
      const double x = x0 + t * u;
      const double q = (a * x * x - a * x0 * x0 + eps) / t;
      if (falling && q > prev) {
        falling = false;
        ++turns;
      } else if (!falling && q < prev) {
        ++turns;
      }
      prev = q;
    }
    CHECK(turns <= 1);
  }
}

TEST_CASE("derivative set identity on x^2 over x > 0") {
  const FunctionModel f = square_on_positive();
  const Verdict v = check_theorem_dd(f, Vec{1.0}, 0.0, {w1(2.0, 0.0, 1.0), w1(2.0, -1.0, 1.0), w1(3.0, 0.0, 1.0)});
  CHECK(v.outcome == Outcome::Pass);
  CHECK(v.checked == 3);
  CHECK(c_eps_subdiff_member(f, Vec{1.0}, w1(2.0, -1.0, 1.0), 0.0));
  CHECK_FALSE(normal_cone_member(f.effective_domain(), Vec{1.0}, Vec{-1.0}));

  std::mt19937_64 rng(6);
  std::vector<DualTriple> samples;
  for (int i = 0; i < 400; ++i) {
    const double xs = i % 3 == 0 ? 2.0 : uniform(rng, -1.0, 5.0);
    const double us = i % 2 == 0 ? 0.0 : uniform(rng, -2.0, 2.0);
    const double a = i % 5 == 0 ? 0.0 : uniform(rng, -1.0, 3.0);
    samples.push_back(w1(xs, us, a));
  }
  for (double eps : {0.0, 0.25, 1.0}) {
    const Verdict r = check_theorem_dd(f, Vec{1.0}, eps, samples);
    CHECK(r.outcome == Outcome::Pass);
  }
  const Verdict q = check_theorem_dd(square_on_line(), Vec{0.5}, 0.5, samples);
  CHECK(q.outcome == Outcome::Pass);
}

TEST_CASE("directional derivative bounds the coupling over the restricted subdifferential") {
  const Verdict a = check_corollary_dd_bound(square_on_line(), Vec{0.0}, Vec{1.0}, 1.0);
  CHECK(a.outcome == Outcome::Pass);
  CHECK(std::abs(a.values[1].second.value() - 2.0) <= 1e-6);
  CHECK(check_corollary_dd_bound(square_on_positive(), Vec{1.0}, Vec{1.0}, 0.01).outcome == Outcome::Pass);
  const FunctionModel below = FunctionModel::indicator(interval_set(-INFINITY, false, 1.0, false));
  CHECK(check_corollary_dd_bound(below, Vec{0.0}, Vec{1.0}, 1.0).outcome == Outcome::Pass);
}

TEST_CASE("DC objective values") {
  const DCProblem p = wedge_problem();
  CHECK(dc_value(p, Vec{1.0, 1.0}).is_neg_inf());
  CHECK(dc_value(p, Vec{0.0, 0.0}) == ExtReal(0.0));
  CHECK(dc_value(p, Vec{3.0, 3.0}).is_pos_inf());
  CHECK_THROWS_AS(DCProblem(square_on_line(), grid_sample(square_on_line(), {-1.0}, {1.0}, 0.5), Box{{-1.0}, {1.0}}, 0.1),
                  HypothesisNotCertified);
  CHECK_THROWS_AS(DCProblem(square_on_line(), square_on_line(), Box{{-1.0}, {INFINITY}}, 0.1), std::invalid_argument);

  // Finite and infinite combinations of two overlapping indicators.
  const FunctionModel left_part = FunctionModel::indicator(interval_set(1.0, true, 2.0, true));
  const DCProblem q(left_part, FunctionModel::indicator(interval_set(0.0, true, 1.5, true)), Box{{0.0}, {3.0}}, 0.5);
  CHECK(dc_value(q, Vec{1.2}) == ExtReal(0.0));
  CHECK(dc_value(q, Vec{1.8}).is_neg_inf());
  CHECK(dc_value(q, Vec{0.5}).is_pos_inf());
  CHECK(dc_value(q, Vec{2.5}).is_pos_inf());
}

TEST_CASE("eps-minimisers by grid search") {
  const DCProblem p = parabola_problem();
  CHECK(is_eps_minimizer(p, Vec{1.0}, 0.0).outcome == Outcome::Pass);
  const Verdict f = is_eps_minimizer(p, Vec{0.0}, 0.5);
  CHECK(f.outcome == Outcome::Fail);
  REQUIRE(f.witnesses.size() == 1);
  CHECK(f.witnesses[0].coords == std::vector<double>{1.0});
  CHECK(is_eps_minimizer(p, Vec{0.0}, 1.0).outcome == Outcome::Pass);

  const DCProblem w = wedge_problem();
  for (double eps : {0.0, 1.0}) {
    const Verdict v = is_eps_minimizer(w, Vec{0.0, 0.0}, eps);
    CHECK(v.outcome == Outcome::Fail);
    REQUIRE(v.witnesses.size() == 1);
    CHECK(v.witnesses[0].coords == std::vector<double>{1.0, 1.0});
  }
  CHECK(is_eps_minimizer(w, Vec{1.0, 1.0}, 0.0).outcome == Outcome::Pass);
  CHECK_THROWS_AS(is_eps_minimizer(w, Vec{3.0, 3.0}, 0.0), PointNotInDomain);
}

TEST_CASE("star-difference membership") {
  std::mt19937_64 rng(12);
  const AugmentedSet line{FlaggedConvexSet::whole_space(1), {}, true};
  const ProductWSet a = ProductWSet::from_interval({0.0, 3.0, true, true}, line);
  const ProductWSet b = ProductWSet::from_interval({0.0, 1.0, true, true}, line);
  CHECK(star_difference_member(a, b, w1(2.0, 0.0, 1.0), rng).member);
  CHECK_FALSE(star_difference_member(a, b, w1(2.5, 0.0, 1.0), rng).member);
  CHECK(star_difference_member(a, b, w1(2.0, 0.0, 0.0), rng).member);
  CHECK_FALSE(star_difference_member(a, b, w1(2.0, 0.0, -0.5), rng).member);
  CHECK_FALSE(star_difference_member(a, b, w1(2.0, 0.5, 3.0), rng).member);

  const ProductWSet none = ProductWSet::empty_set(1);
  for (double x : {-1.0, 0.0, 2.0, 3.0, 4.0}) {
    const DualTriple w = w1(x, 0.0, 1.0);
    CHECK(star_difference_member(a, none, w, rng).member == a.member(w));
  }

  // The closure rule against direct sampling of V(dom B) for nested domains.
  const AugmentedSet pos{positive_axis(), {}, true};
  const AugmentedSet half{interval_set(-1.0, false, INFINITY, false), {}, true};
  const ProductWSet ap = ProductWSet::from_interval({-1.0, 1.0, true, true}, pos);
  const ProductWSet bp = ProductWSet::from_interval({0.0, 0.0, true, true}, half);
  const VConeSampler sampler(half);
  for (int i = 0; i < 300; ++i) {
    const DualTriple w = w1(0.0, uniform(rng, -2.0, 1.0), uniform(rng, -1.0, 1.0));
    const bool rule = star_difference_member(ap, bp, w, rng).member;
    bool sampled = true;
    for (const auto& [u, beta] : sampler.sample(rng, 200)) {
      sampled = sampled && ap.vcone_member(w.ustar + u, w.alpha + beta);
    }
    if (rule) {
      CHECK(sampled);
    } else {
      CHECK_FALSE(sampled);
    }
  }
}

TEST_CASE("sup identity for DC gaps") {
  GridConfig g;
  g.x_box = Box{{-10.0}, {10.0}};
  g.x_step = 1e-3;
  const EvalContext ctx = EvalContext::grid_mode(g);
  const Lattice xs({-10.0}, {10.0}, 1e-3);
  const TolandGap a = toland_gap(square_on_line(), FunctionModel::affine(Vec{1.0}, 0.0), xs, {}, ctx);
  CHECK(std::abs(a.lhs.value() - 0.25) <= 1e-3);
  CHECK(std::abs(a.rhs.value() - 0.25) <= 1e-3);
  const TolandGap b = toland_gap(square_on_line(), FunctionModel::affine(Vec{3.0}, -1.0), xs, {}, ctx);
  CHECK(std::abs(b.lhs.value() - 1.25) <= 1e-3);
  CHECK(std::abs(b.rhs.value() - 1.25) <= 1e-3);
  const TolandGap c = toland_gap(FunctionModel::affine(Vec{1.0}, 0.0), FunctionModel::affine(Vec{1.0}, 0.0), xs, {});
  CHECK(c.lhs == ExtReal(0.0));
  CHECK(c.rhs == ExtReal(0.0));
}

TEST_CASE("c-subdifferential of f - g inside star-differences") {
  const DCProblem p = parabola_problem();
  for (double x0 : {0.0, 1.0, -0.7}) {
    const Verdict v = check_dc_subdiff_inclusion(p, Vec{x0}, 0.0);
    CHECK(v.outcome == Outcome::Pass);
    CHECK(v.checked > 0);
  }
  CHECK(check_dc_subdiff_inclusion(p, Vec{0.5}, 0.4).outcome == Outcome::Pass);
  // f - g is -inf at (1, 1), so the grid conjugate of f - g is +inf everywhere.
  CHECK(check_dc_subdiff_inclusion(wedge_problem(), Vec{0.0, 0.0}, 0.0).outcome == Outcome::Vacuous);
  // x^2 - 2x^2 = -x^2: the box maximum of s x + x^2 is at least 4 for every s.
  const DCProblem concave(square_on_line(), quad1(2.0, 0.0), Box{{-2.0}, {2.0}}, 1e-3);
  CHECK(check_dc_subdiff_inclusion(concave, Vec{0.0}, 0.0).outcome == Outcome::Vacuous);
}

TEST_CASE("global and eps necessary conditions") {
  const DCProblem p = parabola_problem();
  const Verdict at0 = check_global_necessary(p, Vec{0.0}, {0.0});
  CHECK(at0.outcome == Outcome::Fail);
  REQUIRE_FALSE(at0.witnesses.empty());
  CHECK(at0.witnesses[0].coords == std::vector<double>{2.0, 0.0, 1.0});
  CHECK(at0.detail.find("necessary, not sufficient") != std::string::npos);
  const DualTriple w = triple_from_coords(at0.witnesses[0].coords, 1);
  CHECK(c_eps_subdiff_member(p.g, Vec{0.0}, w, 0.0));
  CHECK_FALSE(c_eps_subdiff_member(p.f, Vec{0.0}, w, 0.0));
  CHECK(check_global_necessary(p, Vec{1.0}).outcome == Outcome::Pass);

  CHECK(check_eps_necessary(p, Vec{0.0}, 1.0, {0.0}).outcome == Outcome::Pass);
  CHECK(check_eps_necessary(p, Vec{0.0}, 1.0).outcome == Outcome::Pass);
  CHECK(check_eps_necessary(p, Vec{0.0}, 0.5, {0.0}).outcome == Outcome::Fail);

  // At the corner point g is +inf, so its subdifferential is empty.
  CHECK(check_global_necessary(wedge_problem(), Vec{1.0, 1.0}).outcome == Outcome::Vacuous);
}

TEST_CASE("minimisers satisfy the necessary condition") {
  std::mt19937_64 rng(40);
  for (int i = 0; i < 40; ++i) {
    const double a = uniform(rng, 0.5, 2.0);
    const double c = uniform(rng, -2.0, 2.0);
    const double node = std::round(uniform(rng, -1.5, 1.5) * 100.0) / 100.0;
    // f = a x^2 + b x, g = c x, minimiser of f - g at `node`.
    const double b = c - 2.0 * a * node;
    const DCProblem p(quad1(a, b), FunctionModel::affine(Vec{c}, 0.0), Box{{-3.0}, {3.0}}, 1e-2);
    if (is_eps_minimizer(p, Vec{node}, 0.0).outcome != Outcome::Pass) {
      continue;
    }
    CHECK(check_global_necessary(p, Vec{node}).outcome == Outcome::Pass);
  }
  for (int i = 0; i < 20; ++i) {
    // f = 2 a x^2, g = a x^2: f - g = a x^2 is minimised at 0.
    const double a = uniform(rng, 0.5, 2.0);
    const DCProblem p(quad1(2.0 * a, 0.0), quad1(a, 0.0), Box{{-3.0}, {3.0}}, 1e-2);
    REQUIRE(is_eps_minimizer(p, Vec{0.0}, 0.0).outcome == Outcome::Pass);
    CHECK(check_global_necessary(p, Vec{0.0}).outcome == Outcome::Pass);
  }
}
