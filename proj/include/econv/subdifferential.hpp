#pragma once

#include "econv/conjugation.hpp"
#include "econv/context.hpp"
#include "econv/convex_set.hpp"
#include "econv/function_model.hpp"
#include "econv/verdict.hpp"

#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace econv {

using Rng = std::mt19937_64;

/// (u*, alpha) with dom contained in the open halfspace {<x,u*> < alpha}.
bool v_cone_member(const AugmentedSet& dom, const Vec& ustar, double alpha,
                   const TolerancePolicy& tol = TolerancePolicy::exact());
bool v_cone_member(const FlaggedConvexSet& dom, const Vec& ustar, double alpha,
                   const TolerancePolicy& tol = TolerancePolicy::exact());

/// s in the Fenchel eps-subdifferential: f(x0) + f*(s) <= <x0, s> + eps.
bool fenchel_eps_subdiff_member(const FunctionModel& f, const Point& x0, const Vec& s, double eps,
                                const EvalContext& ctx = {});

/// w in the eps-c-subdifferential: f(x0) finite, <x0,u*> < alpha and
/// f(x0) + f^c(w) <= c(x0, w) + eps.
bool c_eps_subdiff_member(const FunctionModel& f, const Point& x0, const DualTriple& w, double eps,
                          const EvalContext& ctx = {});

/// Draws members of the separation cone V(dom). Directions are non-negative
/// combinations of constraint normals (the barrier cone of the base set), so
/// every draw has a finite support value.
class VConeSampler {
public:
  explicit VConeSampler(AugmentedSet dom);

  /// (0, 1), constraint-derived boundary pairs, then coordinate directions.
  std::vector<std::pair<Vec, double>> structured() const;
  std::pair<Vec, double> random(Rng& rng) const;
  /// structured() followed by k random draws.
  std::vector<std::pair<Vec, double>> sample(Rng& rng, std::size_t k) const;

private:
  std::optional<std::pair<Vec, double>> pair_for(const Vec& u, bool at_support, double slack) const;

  AugmentedSet dom_;
  std::vector<Vec> generators_;
};

/// The eps-c-subdifferential of f at x0 in product form: the Fenchel part
/// (a membership predicate, plus an extracted interval when n = 1) times the
/// separation cone V(dom f).
class CSubdiffDescriptor {
public:
  CSubdiffDescriptor(FunctionModel f, Point x0, double eps, EvalContext ctx = {});

  bool empty() const { return empty_; }
  const FunctionModel& function() const { return f_; }
  const Point& basepoint() const { return x0_; }
  double epsilon() const { return eps_; }
  const EvalContext& context() const { return ctx_; }
  const AugmentedSet& vcone_domain() const { return dom_; }

  bool fenchel_member(const Vec& s) const;
  bool vcone_member(const Vec& ustar, double alpha) const;
  bool member(const DualTriple& w) const;

  /// The Fenchel part as a closed interval (n = 1, non-empty descriptors).
  const std::optional<Interval>& fenchel_interval() const { return interval_; }
  /// A member of the Fenchel part.
  const std::optional<Vec>& seed() const { return seed_; }

  /// Interval ends or ray boundary points first, then interior points.
  std::vector<Vec> sample_fenchel(Rng& rng, std::size_t k) const;
  std::vector<std::pair<Vec, double>> sample_vcone(Rng& rng, std::size_t k) const;
  std::vector<DualTriple> sample_members(Rng& rng, std::size_t k) const;

private:
  /// Fenchel membership with a quarter of the comparison slack; extracted
  /// points satisfy it so they stay members after small perturbations.
  bool fenchel_member_inner(const Vec& s) const;
  bool fenchel_member_sharp(const Vec& s) const;
  double gap(const Vec& s) const;
  std::optional<Vec> find_seed() const;
  Interval extract_interval(double seed) const;
  /// Largest r with seed + r d in the Fenchel part (capped).
  double ray_extent(const Vec& d) const;

  FunctionModel f_;
  Point x0_;
  double eps_;
  EvalContext ctx_;
  AugmentedSet dom_;
  ExtReal fx0_;
  bool empty_ = true;
  std::optional<Vec> seed_;
  std::optional<Interval> interval_;
  bool (CSubdiffDescriptor::*member_predicate_)(const Vec&) const = &CSubdiffDescriptor::fenchel_member_inner;
};

CSubdiffDescriptor c_subdiff_descriptor(const FunctionModel& f, const Point& x0, double eps,
                                        const EvalContext& ctx = {});

/// Which factors of the product form an inclusion test looks at.
enum class InclusionParts { Both, Fenchel, VCone };

/// A is contained in B, tested componentwise. Interval ends and V-cone
/// boundary pairs make FAIL verdicts certified; positives on sampled parts
/// are flagged as sampled.
Verdict check_inclusion(const CSubdiffDescriptor& a, const CSubdiffDescriptor& b, Rng& rng, std::size_t k = 100,
                        InclusionParts parts = InclusionParts::Both);

/// x in the c'-subdifferential of g at w0: g(w0) finite, <x,u0*> < alpha0 and
/// g(w0) + g^{c'}(x) = c'(w0, x).
bool cprime_subdiff_member(const WFunctionModel& g, const DualTriple& w0, const Point& x,
                           const EvalContext& ctx = {});

/// w in the c-subdifferential of f at x0 implies x0 in the c'-subdifferential
/// of f^c at w; the converse is required when f is flagged evenly convex.
Verdict check_conjugate_flip(const FunctionModel& f, const Point& x0, const DualTriple& w,
                             const EvalContext& ctx = {});

/// wf in the eta-c-subdifferential of f and wg in the (eps-eta)-c-subdifferential
/// of g imply wf + wg in the eps-c-subdifferential of f + g.
Verdict check_sum_rule(const FunctionModel& f, const FunctionModel& g, const Point& x0, double eps, double eta,
                       const DualTriple& wf, const DualTriple& wg, const EvalContext& ctx = {});

/// Every sampled member of the c-subdifferential of f at x0 has f^c(w) < +inf.
Verdict check_subdiff_in_domfc(const FunctionModel& f, const Point& x0, const std::vector<DualTriple>& samples,
                               const EvalContext& ctx = {});

/// If x0 is a c'-subgradient of g at w0 and dom g lies in
/// {<x0,u*> - alpha < 0}, then g(w) >= g(w0) + <x0, x* - x0*> for all w.
/// The domain condition is checked on finite W-grid nodes or on sampled triples.
Verdict check_theorem1_iv(const WFunctionModel& g, const DualTriple& w0, const Point& x0, const EvalContext& ctx = {},
                          std::uint64_t seed = 1, std::size_t k = 200);

/// f(x) - f(x0) = sup over the c-subdifferential at x0 of c(x,w) - c(x0,w).
/// Certified only for affine f; other inputs throw HypothesisNotCertified.
Verdict envelope_reconstruct(const FunctionModel& f, const Point& x0, const Point& x, const EvalContext& ctx = {},
                             std::uint64_t seed = 1, std::size_t k = 50);

} // namespace econv
