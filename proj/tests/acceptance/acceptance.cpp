// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any fails.

#include "test_support.hpp"

#include "econv/conjugation.hpp"
#include "econv/directional_dc.hpp"
#include "econv/subdifferential.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

using namespace econv;
using namespace econv::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

DualTriple w1(double xs, double us, double a) { return {Vec{xs}, Vec{us}, a}; }

struct Line {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [" << what << "]";
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt(ExtReal v) { return v.is_finite() ? fmt(v.value()) : v.to_string(); }

std::string coords(const std::vector<double>& c) {
  std::string s = "(";
  for (std::size_t i = 0; i < c.size(); ++i) {
    s += (i ? "," : "") + fmt(c[i]);
  }
  return s + ")";
}

unsigned worker_threads() { return std::max(1U, std::min(8U, std::thread::hardware_concurrency())); }

// dom f^c for f = x^2 on x > 0, written out:
// u* <= 0, alpha >= 0 and not both zero.
bool domfc_formula(double u, double a) { return u <= 0.0 && a >= 0.0 && !(u == 0.0 && a == 0.0); }

const std::pair<double, double> kLabels[] = {{-1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}, {1.0, 1.0}};

Line ac1() {
  Line l;
  const auto t0 = Clock::now();
  const ConjugateResult exact = c_conjugate(square_on_positive(), w1(3.0, 0.0, 1.0));
  GridConfig g;
  g.x_box = Box{{0.0}, {10.0}};
  g.x_step = 1e-3;
  EvalContext ctx = EvalContext::grid_mode(g);
  ctx.threads = worker_threads();
  const ConjugateResult grid = c_conjugate(square_on_positive(), w1(3.0, 0.0, 1.0), ctx);
  const double t = seconds_since(t0);
  l.require(exact.value == ExtReal(2.25), "EXACT value " + fmt(exact.value) + " != 2.25");
  l.require(grid.value.is_finite() && std::abs(grid.value.value() - 2.25) <= 1e-3, "GRID value " + fmt(grid.value));
  l.require(exact.argmax && std::abs((*exact.argmax)[0] - 1.5) <= 1e-2, "EXACT argmax");
  l.require(grid.argmax && std::abs((*grid.argmax)[0] - 1.5) <= 1e-2, "GRID argmax");
  l.require(t < 1.0, "runtime " + fmt(t) + " s");
  l.note << " exact=" << fmt(exact.value) << " grid=" << fmt(grid.value)
         << " argmax=" << (grid.argmax ? fmt((*grid.argmax)[0]) : "none") << " runtime=" << fmt(t) << "s";
  return l;
}

Line ac2() {
  Line l;
  int members = 0;
  int mismatches = 0;
  for (double xs : {-1.0, 0.0, 7.0}) {
    for (const auto& [u, a] : kLabels) {
      const bool got = dom_fc_member(square_on_positive(), w1(xs, u, a));
      members += got ? 1 : 0;
      if (got != domfc_formula(u, a)) {
        ++mismatches;
        l.note << " mismatch at " << coords({xs, u, a});
      }
    }
  }
  l.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  l.note << " members=" << members << "/12 mismatches=" << mismatches;
  return l;
}

Line ac3() {
  Line l;
  int mismatches = 0;
  int tested = 0;
  for (double x0 : {0.5, 1.5, 2.0}) {
    for (double shift : {0.0, -0.5, 0.5}) {
      for (const auto& [u, a] : kLabels) {
        const double xs = 2.0 * x0 + shift;
        const bool want = shift == 0.0 && domfc_formula(u, a);
        const bool got = c_eps_subdiff_member(square_on_positive(), Vec{x0}, w1(xs, u, a), 0.0);
        ++tested;
        if (got != want) {
          ++mismatches;
          l.note << " mismatch x0=" << fmt(x0) << " w=" << coords({xs, u, a});
        }
      }
    }
    const bool got = c_eps_subdiff_member(square_on_positive(), Vec{x0}, w1(3.0, 0.0, 1.0), 0.0);
    ++tested;
    if (got != (x0 == 1.5)) {
      ++mismatches;
      l.note << " (3,0,1) at x0=" << fmt(x0);
    }
  }
  l.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  l.note << " tested=" << tested << " mismatches=" << mismatches;
  return l;
}

Line ac4() {
  Line l;
  const auto t0 = Clock::now();
  const DCProblem p(xlogxy_example(), halfplane_indicator(), Box{{0.0, 0.0}, {2.0, 2.0}}, 0.25);
  const ExtReal at11 = dc_value(p, Vec{1.0, 1.0});
  const ExtReal at00 = dc_value(p, Vec{0.0, 0.0});
  l.require(at11.is_neg_inf(), "dc_value(1,1) = " + fmt(at11));
  l.require(at00 == ExtReal(0.0), "dc_value(0,0) = " + fmt(at00));
  l.note << " dc(1,1)=" << fmt(at11) << " dc(0,0)=" << fmt(at00);

  for (double eps : kDefaultEpsilons) {
    const Verdict v = check_global_necessary(p, Vec{0.0, 0.0}, {eps}, {}, 7, 100);
    std::size_t samples = 0;
    for (const auto& [name, value] : v.values) {
      if (name == "samples") {
        samples = static_cast<std::size_t>(value.value());
      }
    }
    l.require(samples >= 100, "eps=" + fmt(eps) + " only " + std::to_string(samples) + " samples");
    std::string why = "necessary condition at (0,0), eps=" + fmt(eps) + ": " + to_string(v.outcome);
    if (!v.witnesses.empty()) {
      why += " witness w=" + coords(v.witnesses.front().coords);
    }
    l.require(v.outcome == Outcome::Pass, why);
  }
  for (double eps : {0.0, 1.0}) {
    const Verdict v = is_eps_minimizer(p, Vec{0.0, 0.0}, eps);
    const bool witness11 = !v.witnesses.empty() && v.witnesses.front().coords == std::vector<double>{1.0, 1.0};
    l.require(v.outcome == Outcome::Fail && witness11, "(0,0) eps-minimiser check at eps=" + fmt(eps));
  }
  l.note << " non-sufficiency exhibit: (0,0) is not an eps-minimiser for eps in {0,1}, witness (1,1)";
  const double t = seconds_since(t0);
  l.require(t < 10.0, "runtime " + fmt(t) + " s");
  l.note << " runtime=" << fmt(t) << "s";
  return l;
}

Line ac5() {
  Line l;
  const DCProblem p(square_on_line(), FunctionModel::affine(Vec{2.0}, 0.0), Box{{-3.0}, {3.0}}, 1e-3);
  const Verdict at0 = check_global_necessary(p, Vec{0.0}, kDefaultEpsilons, {}, 11, 100);
  bool reverified = false;
  if (at0.outcome == Outcome::Fail && !at0.witnesses.empty()) {
    const Witness& w = at0.witnesses.front();
    const DualTriple t = triple_from_coords(w.coords, 1);
    // The witness belongs to some eps-subdifferential of g but not to f's.
    for (double eps : kDefaultEpsilons) {
      reverified = reverified || (c_eps_subdiff_member(p.g, Vec{0.0}, t, eps) &&
                                  !c_eps_subdiff_member(p.f, Vec{0.0}, t, eps));
    }
    l.note << " witness at a=0: " << coords(w.coords);
  }
  l.require(at0.outcome == Outcome::Fail, "a=0 necessary check " + to_string(at0.outcome));
  l.require(reverified, "witness does not re-verify");
  const Verdict at1 = check_global_necessary(p, Vec{1.0}, kDefaultEpsilons, {}, 11, 100);
  l.require(at1.outcome == Outcome::Pass, "a=1 necessary check " + to_string(at1.outcome));
  const Verdict min0 = is_eps_minimizer(p, Vec{0.0}, 1.0);
  l.require(min0.outcome == Outcome::Pass, "a=0 eps=1 minimiser " + to_string(min0.outcome));
  const Verdict nec0 = check_eps_necessary(p, Vec{0.0}, 1.0, kDefaultLambdas, {}, 11, 100);
  l.require(nec0.outcome == Outcome::Pass, "a=0 eps=1 necessary " + to_string(nec0.outcome));
  return l;
}

Line ac6() {
  Line l;
  Rng rng(606);
  std::vector<DualTriple> samples;
  for (int i = 0; i < 500; ++i) {
    const double xs = i % 3 == 0 ? 2.0 : uniform(rng, -1.0, 5.0);
    const double us = i % 2 == 0 ? 0.0 : uniform(rng, -2.0, 2.0);
    const double a = i % 5 == 0 ? 0.0 : uniform(rng, -1.0, 3.0);
    samples.push_back(w1(xs, us, a));
  }
  const Verdict v = check_theorem_dd(square_on_positive(), Vec{1.0}, 0.0, samples);
  l.require(v.outcome == Outcome::Pass, to_string(v.outcome) + " " + v.detail);
  l.require(v.checked == 500, "compared " + std::to_string(v.checked) + " of 500");
  l.note << " compared=" << v.checked << " mismatches=" << v.witnesses.size();
  return l;
}

struct CatalogEntry {
  FunctionModel f;
  std::vector<Point> points;
};

std::vector<CatalogEntry> catalog() {
  const FlaggedConvexSet strip(2, {{Vec{0.0, 1.0}, 1.0, true}, {Vec{0.0, -1.0}, 1.0, false}});
  return {
      {square_on_line(), {Vec{0.0}, Vec{0.7}, Vec{-2.0}}},
      {square_on_positive(), {Vec{0.5}, Vec{1.0}, Vec{2.0}}},
      {identity_on_positive(), {Vec{0.3}, Vec{1.0}}},
      {FunctionModel::indicator(interval_set(-1.0, true, 1.0, false)), {Vec{-1.0}, Vec{0.0}, Vec{0.9}}},
      {FunctionModel::affine(Vec{1.0, -2.0}, 0.5), {Vec{0.0, 0.0}, Vec{1.0, 1.0}}},
      {halfplane_indicator(), {Vec{0.0, 0.0}, Vec{1.0, 0.5}}},
      {FunctionModel::quadratic(Matrix::diagonal(Vec{1.0, 2.0}), Vec{0.5, 0.0}, 0.0, strip),
       {Vec{0.0, 0.0}, Vec{1.0, -1.0}, Vec{-0.5, 0.5}}},
      {xlogxy_example(), {Vec{0.0, 0.0}, Vec{1.0, 1.0}, Vec{0.5, 0.25}}},
  };
}

DualTriple random_triple(Rng& rng, const Vec& center) {
  const std::size_t n = center.size();
  DualTriple w{Vec(n), Vec(n), uniform(rng, -2.0, 3.0)};
  for (std::size_t i = 0; i < n; ++i) {
    w.xstar[i] = center[i] + uniform(rng, -3.0, 3.0);
    w.ustar[i] = uniform(rng, -2.0, 2.0);
  }
  return w;
}

Line ac7() {
  Line l;
  Rng rng(707);
  const auto cat = catalog();
  int mismatches = 0;
  int members = 0;
  for (int i = 0; i < 1000; ++i) {
    const CatalogEntry& e = cat[static_cast<std::size_t>(i) % cat.size()];
    const Point& x0 = e.points[std::uniform_int_distribution<std::size_t>(0, e.points.size() - 1)(rng)];
    const double eps = i % 4 == 0 ? 0.0 : uniform(rng, 0.0, 2.0);
    DualTriple w;
    const CSubdiffDescriptor d(e.f, x0, eps);
    if (i % 2 == 0 && !d.empty()) {
      w = d.sample_members(rng, 1).back();
    } else {
      w = random_triple(rng, d.seed() ? *d.seed() : Vec(x0.size()));
    }
    const bool direct = c_eps_subdiff_member(e.f, x0, w, eps);
    const bool product = fenchel_eps_subdiff_member(e.f, x0, w.xstar, eps) &&
                         v_cone_member(e.f.effective_domain(), w.ustar, w.alpha);
    members += direct ? 1 : 0;
    if (direct != product) {
      ++mismatches;
      if (mismatches <= 3) {
        l.note << " mismatch " << e.f.kind() << " w=" << w.to_string();
      }
    }
  }
  l.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  l.note << " tuples=1000 members=" << members << " mismatches=" << mismatches;
  return l;
}

Line ac8() {
  Line l;
  Rng rng(808);
  const auto cat = catalog();
  int violations = 0;
  int asserted = 0;
  int instances = 0;
  for (int i = 0; instances < 1000; ++i) {
    const std::size_t a = static_cast<std::size_t>(i) % cat.size();
    const std::size_t b = (a + 1 + static_cast<std::size_t>(i / 8) % (cat.size() - 1)) % cat.size();
    const CatalogEntry& ef = cat[a];
    const CatalogEntry& eg = cat[b];
    if (ef.f.dim() != eg.f.dim()) {
      continue;
    }
    const Point& x0 = ef.points[static_cast<std::size_t>(i) % ef.points.size()];
    if (!ef.f.evaluate(x0).is_finite() || !eg.f.evaluate(x0).is_finite()) {
      continue;
    }
    const double eps = uniform(rng, 0.0, 2.0);
    const double etas[] = {0.0, eps / 2.0, eps};
    const double eta = etas[instances % 3];
    const CSubdiffDescriptor df(ef.f, x0, eta);
    const CSubdiffDescriptor dg(eg.f, x0, eps - eta);
    if (df.empty() || dg.empty()) {
      continue;
    }
    ++instances;
    const DualTriple wf = df.sample_members(rng, 1).back();
    const DualTriple wg = dg.sample_members(rng, 1).back();
    const Verdict v = check_sum_rule(ef.f, eg.f, x0, eps, eta, wf, wg);
    asserted += v.outcome == Outcome::Pass ? 1 : 0;
    if (v.outcome == Outcome::Fail) {
      ++violations;
      if (violations <= 3) {
        l.note << " violation " << wf.to_string() << " + " << wg.to_string();
      }
    }
  }
  l.require(violations == 0, std::to_string(violations) + " violations");
  l.require(asserted > 0, "no instance met the precondition");
  l.note << " instances=" << instances << " asserted=" << asserted << " violations=" << violations;
  return l;
}

Line ac9() {
  Line l;
  GridConfig g;
  g.x_box = Box{{-10.0}, {10.0}};
  g.x_step = 1e-3;
  EvalContext ctx = EvalContext::grid_mode(g);
  ctx.threads = worker_threads();
  const Lattice xs({-10.0}, {10.0}, 1e-3);
  const TolandGap a = toland_gap(square_on_line(), FunctionModel::affine(Vec{1.0}, 0.0), xs, {}, ctx);
  const TolandGap b = toland_gap(square_on_line(), FunctionModel::affine(Vec{3.0}, -1.0), xs, {}, ctx);
  auto near = [](ExtReal v, double want) { return v.is_finite() && std::abs(v.value() - want) <= 1e-3; };
  l.require(near(a.lhs, 0.25) && near(a.rhs, 0.25), "g=x sides " + fmt(a.lhs) + ", " + fmt(a.rhs));
  l.require(near(b.lhs, 1.25) && near(b.rhs, 1.25), "g=3x-1 sides " + fmt(b.lhs) + ", " + fmt(b.rhs));
  l.note << " g=x: " << fmt(a.lhs) << " / " << fmt(a.rhs) << "; g=3x-1: " << fmt(b.lhs) << " / " << fmt(b.rhs);
  return l;
}

Line ac10() {
  Line l;
  const FunctionModel f = identity_on_positive();
  GridConfig g;
  EvalContext ctx = EvalContext::grid_mode(g);
  ctx.threads = worker_threads();
  const Lattice xs = ctx.grid.x_lattice(1);
  const WTable table = WTable::of_conjugate(f, ctx);
  const double step = xs.step();
  int above = 0;
  int far = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Point x{xs.node(i)[0]};
    const ExtReal bic = table.c_prime(x);
    const ExtReal fx = f.evaluate(x);
    // Comparisons follow the GRID policy (absolute slack eq_tol).
    if (!(fx.is_pos_inf() || (bic.is_finite() && ctx.tol.value_le(bic.value(), fx.value())) || bic.is_neg_inf())) {
      ++above;
    }
    if (x[0] >= 10.0 * step - 1e-12 && fx.is_finite()) {
      const double gap = bic.is_finite() ? std::abs(fx.value() - bic.value()) : INFINITY;
      worst = std::max(worst, gap);
      far += gap <= 1e-2 ? 0 : 1;
    }
  }
  l.require(above == 0, std::to_string(above) + " grid points with f^{cc'} > f");
  l.require(far == 0, std::to_string(far) + " points with |f^{cc'} - f| > 1e-2");
  l.note << " points=" << xs.size() << " above=" << above << " max_gap=" << fmt(worst);
  return l;
}

Line ac11() {
  Line l;
  Rng rng(1111);
  const FunctionModel f = square_on_positive();
  const Point x0{1.0};
  const CSubdiffDescriptor wide(f, x0, 2.0);
  int implications = 0;
  int violations = 0;
  while (implications < 500) {
    const DualTriple w = rng() % 2 == 0 ? wide.sample_members(rng, 1).back() : random_triple(rng, Vec{2.0});
    const double e1 = uniform(rng, 0.0, 1.0);
    const double e2 = e1 + uniform(rng, 0.0, 1.0);
    const bool in1 = c_eps_subdiff_member(f, x0, w, e1);
    if (!in1) {
      continue;
    }
    ++implications;
    bool ok = c_eps_subdiff_member(f, x0, w, e2);
    // Nested intersection: every eps' > e1 on a decreasing sequence.
    for (int j = 1; j <= 6; ++j) {
      ok = ok && c_eps_subdiff_member(f, x0, w, e1 + std::pow(10.0, -j));
    }
    if (!ok) {
      ++violations;
      l.note << " violation w=" << w.to_string() << " eps=" << fmt(e1);
    }
  }
  l.require(violations == 0, std::to_string(violations) + " violations");
  l.note << " implications=" << implications << " violations=" << violations;
  return l;
}

Line ac12() {
  Line l;
  const FunctionModel f = square_on_line();
  const CSubdiffDescriptor d(f, Vec{0.0}, 1.0);
  for (double u : {1.0, -1.0, 2.0, -2.0}) {
    const ExtReal v = eps_directional_derivative(f, Vec{0.0}, Vec{u}, 1.0);
    l.require(v.is_finite() && std::abs(v.value() - 2.0 * std::abs(u)) <= 1e-4, "u=" + fmt(u) + " gives " + fmt(v));
    // Support of the Fenchel eps-subdifferential in direction u.
    const Interval iv = *d.fenchel_interval();
    const double support = std::max(iv.lo * u, iv.hi * u);
    l.require(v.is_finite() && std::abs(v.value() - support) <= 1e-3, "support identity at u=" + fmt(u));
    l.note << " u=" << fmt(u) << ":" << fmt(v) << "/" << fmt(support);
  }
  return l;
}

} // namespace

int main() {
  const std::pair<const char*, std::function<Line()>> criteria[] = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},   {"AC5", ac5},   {"AC6", ac6},
      {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}, {"AC11", ac11}, {"AC12", ac12},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Line l;
    try {
      l = run();
    } catch (const std::exception& e) {
      l.pass = false;
      l.note << " exception: " << e.what();
    }
    failures += l.pass ? 0 : 1;
    std::printf("%s %s%s\n", name, l.pass ? "PASS" : "FAIL", l.note.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
