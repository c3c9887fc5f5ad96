#pragma once

#include "econv/convex_set.hpp"
#include "econv/coupling.hpp"
#include "econv/ext_real.hpp"
#include "econv/lattice.hpp"
#include "econv/vec.hpp"

#include <memory>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace econv {

/// Symmetric n x n matrix, n <= 2.
struct Matrix {
  std::size_t n = 0;
  std::array<double, 4> m{};

  static Matrix zero(std::size_t n);
  static Matrix diagonal(const Vec& d);

  double operator()(std::size_t i, std::size_t j) const { return m[i * 2 + j]; }
  double& operator()(std::size_t i, std::size_t j) { return m[i * 2 + j]; }

  Vec apply(const Vec& x) const;
  /// x^T M x
  double quad(const Vec& x) const;
  bool is_zero() const;
  bool is_psd() const;
  Matrix& operator+=(const Matrix& o);
};

class FunctionModel;

/// <a, x> + b on all of R^n.
struct AffineFn {
  Vec a;
  double b = 0.0;
};

/// x^T Q x + <b, x> + cst on dom, +inf elsewhere. Q is positive semidefinite.
struct QuadraticFn {
  Matrix q;
  Vec b;
  double cst = 0.0;
  FlaggedConvexSet dom;
};

/// 0 on dom, +inf elsewhere.
struct IndicatorFn {
  FlaggedConvexSet dom;
};

/// x ln(x/y) on dom (which must lie in the open positive quadrant) and 0 at
/// the origin when include_origin is set.
struct XLogXoverYFn {
  FlaggedConvexSet dom;
  bool include_origin = true;
};

/// Values on a lattice with nearest-node lookup; +inf outside the lattice box.
struct GridFn {
  Lattice lattice;
  std::vector<ExtReal> values;
  /// Closed convex hull of the finite-valued nodes.
  FlaggedConvexSet hull;
};

struct SumFn {
  std::vector<FunctionModel> terms;
};

using FunctionVariant = std::variant<AffineFn, QuadraticFn, IndicatorFn, XLogXoverYFn, GridFn, SumFn>;

/// Quadratic-plus-perspective normal form of a catalog function:
/// x^T q x + <b, x> + cst + xlogxy_weight * x ln(x/y) on dom.
struct NormalForm {
  Matrix q;
  Vec b;
  double cst = 0.0;
  double xlogxy_weight = 0.0;
  AugmentedSet dom;

  ExtReal evaluate(const Point& x) const;
};

/// Immutable proper function X -> extended reals. Copies share state.
class FunctionModel {
public:
  static FunctionModel affine(Vec a, double b);
  static FunctionModel quadratic(Matrix q, Vec b, double cst, FlaggedConvexSet dom);
  static FunctionModel indicator(FlaggedConvexSet dom);
  static FunctionModel xlogxy(FlaggedConvexSet dom, bool include_origin = true);
  static FunctionModel grid(Lattice lattice, std::vector<ExtReal> values);
  static FunctionModel sum(std::vector<FunctionModel> terms);

  std::size_t dim() const;
  const FunctionVariant& variant() const;
  /// Stable catalog name: affine, quadratic, indicator, xlogxy, grid, sum.
  std::string kind() const;
  std::string describe() const;
  /// Identity of the shared state; equal for copies of one model.
  const void* id() const { return node_.get(); }

  ExtReal evaluate(const Point& x) const;

  /// {f < +inf} as a flagged set. Isolated domain points (the origin of an
  /// xlogxy entry) are not part of it; see effective_domain().
  FlaggedConvexSet domain() const;
  /// The exact effective domain including isolated points.
  AugmentedSet effective_domain() const;

  /// Whether the catalog certifies evenly convexity (grid functions never are).
  bool is_econvex() const;
  bool has_grid_term() const;

  /// Nothing for functions containing grid terms.
  std::optional<NormalForm> normal_form() const;

  /// A Fenchel subgradient at x0 computed from the closed form; nothing for
  /// grid terms or points outside the effective domain.
  std::optional<Vec> reference_subgradient(const Point& x0) const;

private:
  struct Node;
  explicit FunctionModel(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

inline ExtReal evaluate(const FunctionModel& f, const Point& x) { return f.evaluate(x); }
inline FlaggedConvexSet domain(const FunctionModel& f) { return f.domain(); }

/// Exact node evaluations of f on the lattice.
FunctionModel grid_sample(const FunctionModel& f, const Lattice& lattice);
FunctionModel grid_sample(const FunctionModel& f, std::vector<double> lo, std::vector<double> hi, double step,
                          std::size_t max_nodes = kDefaultNodeBudget);

/// x ln(x/y) extended to the closed quadrant: 0 for x = 0, +inf for
/// x > 0 = y and outside the quadrant.
ExtReal xlogxy_value(double x, double y);

/// Lattice coordinates of W = R^n x R^n x R, laid out as (x*, u*, alpha).
DualTriple triple_from_coords(std::span<const double> coords, std::size_t n);
std::vector<double> coords_from_triple(const DualTriple& w);

struct ConjugateOfFn {
  FunctionModel f;
};

/// Values on a lattice of W with nearest-node lookup; +inf off the lattice box.
struct WGridFn {
  std::size_t n = 1;
  Lattice lattice;
  std::vector<ExtReal> values;
};

using WFunctionVariant = std::variant<ConjugateOfFn, WGridFn>;

/// Function W -> extended reals. Evaluation lives in the conjugation module.
class WFunctionModel {
public:
  static WFunctionModel conjugate_of(FunctionModel f);
  static WFunctionModel grid(std::size_t n, Lattice lattice, std::vector<ExtReal> values);

  std::size_t dim() const;
  const WFunctionVariant& variant() const { return *v_; }
  std::string kind() const;
  const void* id() const { return v_.get(); }

private:
  explicit WFunctionModel(std::shared_ptr<const WFunctionVariant> v) : v_(std::move(v)) {}
  std::shared_ptr<const WFunctionVariant> v_;
};

} // namespace econv
