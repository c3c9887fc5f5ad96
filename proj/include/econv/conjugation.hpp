#pragma once

#include "econv/context.hpp"
#include "econv/coupling.hpp"
#include "econv/function_model.hpp"
#include "econv/verdict.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace econv {

struct ConjugateResult {
  ExtReal value;
  /// A maximiser, when the supremum is attained at an identified point.
  std::optional<Point> argmax;
};

/// x -> c(x, w) - beta.
struct CElementaryMinorant {
  DualTriple w;
  double beta = 0.0;

  ExtReal operator()(const Point& x, const TolerancePolicy& tol = TolerancePolicy::exact()) const {
    return sub_conj(coupling_c(x, w, tol), beta);
  }
};

/// f^c(w) = sup_x c(x, w) - f(x).
///
/// EXACT: +inf when dom f leaves the open halfspace {<x,u*> < alpha}
/// (attainment-aware support), otherwise the Fenchel conjugate at x*.
/// GRID: supremum over the X lattice of the context (or the function's own
/// lattice for a pure grid function).
ConjugateResult c_conjugate(const FunctionModel& f, const DualTriple& w, const EvalContext& ctx = {});

/// f*(s) = sup_x <x, s> - f(x).
ConjugateResult fenchel_conjugate(const FunctionModel& f, const Vec& s, const EvalContext& ctx = {});

/// g(w). Conjugates are evaluated through c_conjugate.
ExtReal evaluate(const WFunctionModel& g, const DualTriple& w, const EvalContext& ctx = {});

/// g^{c'}(x) = sup_w c'(w, x) - g(w).
///
/// EXACT is available for conjugates of catalog functions flagged evenly
/// convex (then g^{c'} = f); GRID takes the supremum over the W lattice of
/// the context, or over the nodes of a W grid function.
ExtReal c_prime_conjugate(const WFunctionModel& g, const Point& x, const EvalContext& ctx = {});

/// f^{cc'}(x), the evenly convex hull of f.
ExtReal biconjugate(const FunctionModel& f, const Point& x, const EvalContext& ctx = {});

/// f^c(w) < +inf.
bool dom_fc_member(const FunctionModel& f, const DualTriple& w, const EvalContext& ctx = {});

/// Checks g^{c'c}(w) = g(w) at each sample; a mismatch is a witness that g
/// is not e'-convex (at the resolution of the grids).
Verdict eprime_convexity_check(const WFunctionModel& g, const std::vector<DualTriple>& samples,
                               const EvalContext& ctx = {});

/// Brute-force conjugates of f sampled on a lattice of X.
class GridConjugator {
public:
  GridConjugator(const FunctionModel& f, const Lattice& lattice, TolerancePolicy tol, unsigned threads = 1);

  ConjugateResult c_conjugate(const DualTriple& w) const;
  ConjugateResult fenchel(const Vec& s) const;
  std::size_t finite_nodes() const { return values_.size(); }

private:
  Point point(std::size_t i) const;

  std::size_t n_;
  std::vector<double> coords_;
  std::vector<double> values_;
  TolerancePolicy tol_;
  unsigned threads_;
};

/// Shared, cached GridConjugator for f under the context's X lattice.
std::shared_ptr<const GridConjugator> grid_conjugator(const FunctionModel& f, const EvalContext& ctx);

/// A function on W tabulated at its finite nodes, for c'-conjugation.
class WTable {
public:
  WTable(std::size_t n, std::vector<DualTriple> nodes, std::vector<double> values, TolerancePolicy tol,
         unsigned threads = 1);

  /// f^c tabulated on the context's W lattice.
  static WTable of_conjugate(const FunctionModel& f, const EvalContext& ctx);
  static WTable of_grid(const WGridFn& g, const EvalContext& ctx);

  ExtReal c_prime(const Point& x) const;
  std::size_t size() const { return values_.size(); }

private:
  std::size_t n_;
  std::vector<DualTriple> nodes_;
  std::vector<double> values_;
  TolerancePolicy tol_;
  unsigned threads_;
};

/// X lattice used for GRID conjugates of f: the context's box when set,
/// else the lattice of a pure grid function, else the default.
Lattice conjugation_lattice(const FunctionModel& f, const EvalContext& ctx);

} // namespace econv
