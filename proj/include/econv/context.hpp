#pragma once

#include "econv/lattice.hpp"
#include "econv/tolerance.hpp"

#include <optional>
#include <vector>

namespace econv {

/// Node budget: ECONV_BUDGET when set to a positive integer, else 10^7.
std::size_t default_node_budget();

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  static Box cube(std::size_t n, double lo, double hi);
  std::size_t dim() const { return lo.size(); }
};

/// Discretisation used by GRID-mode suprema over X and over W.
/// Unset boxes and zero steps select per-dimension defaults: X in [-5,5]^n
/// with step 1e-3 (n = 1) or 1e-2 (n = 2); W in [-5,5]^(2n+1) with step
/// 0.25 (n = 1) or 1 (n = 2).
struct GridConfig {
  std::optional<Box> x_box;
  double x_step = 0.0;
  std::optional<Box> w_box;
  double w_step = 0.0;
  std::size_t max_nodes = default_node_budget();

  Lattice x_lattice(std::size_t n) const;
  Lattice w_lattice(std::size_t n) const;
};

struct EvalContext {
  TolerancePolicy tol = TolerancePolicy::exact();
  GridConfig grid;
  unsigned threads = 1;

  bool is_exact() const { return tol.is_exact(); }
  static EvalContext exact() { return {}; }
  static EvalContext grid_mode(GridConfig grid, TolerancePolicy tol = TolerancePolicy::grid()) {
    return {tol, std::move(grid), 1};
  }
};

} // namespace econv
