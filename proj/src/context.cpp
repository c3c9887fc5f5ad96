#include "econv/context.hpp"

#include "econv/errors.hpp"

#include <cstdlib>
#include <string>

namespace econv {

std::size_t default_node_budget() {
  if (const char* env = std::getenv("ECONV_BUDGET")) {
    try {
      const long long v = std::stoll(env);
      if (v > 0) {
        return static_cast<std::size_t>(v);
      }
    } catch (const std::exception&) {
    }
  }
  return kDefaultNodeBudget;
}

Box Box::cube(std::size_t n, double lo, double hi) {
  return {std::vector<double>(n, lo), std::vector<double>(n, hi)};
}

Lattice GridConfig::x_lattice(std::size_t n) const {
  const Box box = x_box ? *x_box : Box::cube(n, -5.0, 5.0);
  if (box.dim() != n) {
    throw DimensionMismatch("grid x box has dimension " + std::to_string(box.dim()) + ", expected " +
                            std::to_string(n));
  }
  const double step = x_step > 0.0 ? x_step : (n == 1 ? 1e-3 : 1e-2);
  return Lattice(box.lo, box.hi, step, max_nodes);
}

Lattice GridConfig::w_lattice(std::size_t n) const {
  const Box box = w_box ? *w_box : Box::cube(2 * n + 1, -5.0, 5.0);
  if (box.dim() != 2 * n + 1) {
    throw DimensionMismatch("grid w box has dimension " + std::to_string(box.dim()) + ", expected " +
                            std::to_string(2 * n + 1));
  }
  const double step = w_step > 0.0 ? w_step : (n == 1 ? 0.25 : 1.0);
  return Lattice(box.lo, box.hi, step, max_nodes);
}

} // namespace econv
