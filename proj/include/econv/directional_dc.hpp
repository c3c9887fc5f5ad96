#pragma once

#include "econv/subdifferential.hpp"

#include <optional>
#include <vector>

namespace econv {

/// Default lambda and eps grids for the DC optimality checks.
inline const std::vector<double> kDefaultLambdas{0.0, 0.1, 0.5, 1.0, 5.0};
inline const std::vector<double> kDefaultEpsilons{0.0, 0.5, 1.0, 2.0};

/// f'_eps(x0, u) = inf_{t>0} (f(x0 + t u) - f(x0) + eps) / t.
///
/// The quotient is tabulated at t = 10^-6 ... 10^6 (121 log-spaced nodes),
/// refined by golden-section search around the best interior node, and
/// extrapolated geometrically when the best node is an end of the range.
/// -inf when the quotient keeps decreasing without a limit.
/// Throws PointNotInDomain when f(x0) is not finite.
ExtReal eps_directional_derivative(const FunctionModel& f, const Point& x0, const Vec& u, double eps);

/// Absolute slack used when comparing against numerically computed directional derivatives.
inline constexpr double kDirectionalTol = 1e-7;

/// Two-sided membership comparison, on each sample, of
///   the c-subdifferential of h = f'_eps(x0, .) at 0, intersected with {<x0,u*> < alpha}, and
///   the eps-c-subdifferential of f at x0, intersected with X* x N(dom f, x0) x (0, inf).
/// h is sublinear, so the left side is decided from h on unit directions
/// (both directions for n = 1, 360 for n = 2).
Verdict check_theorem_dd(const FunctionModel& f, const Point& x0, double eps, const std::vector<DualTriple>& samples,
                         const EvalContext& ctx = {});

/// f'_eps(x0, u) >= sup c(u, w) over the sampled members w of the right-hand
/// set above. Empty `samples` draws members from the descriptor.
Verdict check_corollary_dd_bound(const FunctionModel& f, const Point& x0, const Vec& u, double eps,
                                 const std::vector<DualTriple>& samples = {}, const EvalContext& ctx = {},
                                 std::uint64_t seed = 1);

/// inf over X of f - g, with g evenly convex; searched on a bounded lattice.
struct DCProblem {
  FunctionModel f;
  FunctionModel g;
  Box search_box;
  double search_step = 0.0;

  /// Validates dimensions, the box and that g is flagged evenly convex.
  DCProblem(FunctionModel f, FunctionModel g, Box search_box, double search_step);

  std::size_t dim() const { return f.dim(); }
  Lattice lattice(std::size_t max_nodes = kDefaultNodeBudget) const;
};

/// sub_dc(f(x), g(x)).
ExtReal dc_value(const DCProblem& p, const Point& x, Diagnostics* diag = nullptr);

/// dc_value(a) - eps <= min over the search lattice. FAIL carries the lattice minimiser.
/// Throws PointNotInDomain when dc_value(a) = +inf.
Verdict is_eps_minimizer(const DCProblem& p, const Point& a, double eps, const EvalContext& ctx = {});

/// A product set A1 x V(dom) in W.
class ProductWSet {
public:
  static ProductWSet from_descriptor(const CSubdiffDescriptor& d);
  static ProductWSet from_interval(Interval fenchel, AugmentedSet vcone_dom,
                                   TolerancePolicy tol = TolerancePolicy::exact());
  static ProductWSet empty_set(std::size_t n);

  bool empty() const { return empty_; }
  std::size_t dim() const { return n_; }
  const std::optional<Interval>& fenchel_interval() const { return interval_; }
  const AugmentedSet& vcone_dom() const { return dom_; }

  bool fenchel_member(const Vec& s) const;
  bool vcone_member(const Vec& ustar, double alpha) const;
  bool member(const DualTriple& w) const;
  std::vector<Vec> sample_fenchel(Rng& rng, std::size_t k) const;
  std::vector<std::pair<Vec, double>> sample_vcone(Rng& rng, std::size_t k) const;

private:
  std::size_t n_ = 1;
  bool empty_ = true;
  std::optional<Interval> interval_;
  std::optional<CSubdiffDescriptor> descriptor_;
  AugmentedSet dom_;
  TolerancePolicy tol_;
};

struct StarDifferenceResult {
  bool member = false;
  /// The answer rests on sampled points of B.
  bool sampled = false;
  /// A point b of B with w + b outside A, when one was found.
  std::optional<DualTriple> offending;
};

/// w in A -* B = {w : w + B subset of A}. B empty reduces to w in A.
/// Interval ends are compared exactly for n = 1; the separation-cone part is
/// exact when dom A is inside dom B (support of dom A at u* at most alpha),
/// otherwise it is sampled.
StarDifferenceResult star_difference_member(const ProductWSet& a, const ProductWSet& b, const DualTriple& w, Rng& rng,
                                            std::size_t k = 100);

struct TolandGap {
  ExtReal lhs;
  ExtReal rhs;
  std::optional<Point> lhs_at;
  std::optional<DualTriple> rhs_at;
};

/// sup_x g(x) - f(x) over `x_grid` against sup_w f^c(w) - g^c(w) over
/// `w_samples` and the slices (x*, 0, 1), x* on [-5,5]^n (step 1e-2 for n = 1, 0.1 for n = 2).
TolandGap toland_gap(const FunctionModel& f, const FunctionModel& g, const Lattice& x_grid,
                     const std::vector<DualTriple>& w_samples = {}, const EvalContext& ctx = {});

/// For sampled w in the eps-c-subdifferential of f - g at x0 (GRID conjugate
/// of f - g on the search lattice) and each lambda: w in
/// (eps+lambda)-c-subdiff f(x0) -* lambda-c-subdiff g(x0). The grid
/// conjugate undershoots the true one by at most about (|x*| + local slope) * step;
/// that amount is added to eps+lambda and reported as "grid_slack".
Verdict check_dc_subdiff_inclusion(const DCProblem& p, const Point& x0, double eps,
                                   const std::vector<double>& lambdas = kDefaultLambdas, const EvalContext& ctx = {},
                                   std::uint64_t seed = 1, std::size_t k = 100);

/// For each eps: eps-c-subdiff g(a) subset of eps-c-subdiff f(a). A necessary
/// condition for a global minimiser of f - g, not a sufficient one.
/// `parts` restricts the test to one factor of the product form.
Verdict check_global_necessary(const DCProblem& p, const Point& a,
                               const std::vector<double>& eps_list = kDefaultEpsilons, const EvalContext& ctx = {},
                               std::uint64_t seed = 1, std::size_t k = 100,
                               InclusionParts parts = InclusionParts::Both);

/// For each lambda: lambda-c-subdiff g(a) subset of (eps+lambda)-c-subdiff f(a).
/// Necessary for a to be an eps-minimiser; not sufficient.
Verdict check_eps_necessary(const DCProblem& p, const Point& a, double eps,
                            const std::vector<double>& lambdas = kDefaultLambdas, const EvalContext& ctx = {},
                            std::uint64_t seed = 1, std::size_t k = 100,
                            InclusionParts parts = InclusionParts::Both);

} // namespace econv
