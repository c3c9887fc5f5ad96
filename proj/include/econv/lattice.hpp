#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace econv {

/// Default node budget for every grid in the toolkit.
inline constexpr std::size_t kDefaultNodeBudget = 10'000'000;

/// Axis-aligned lattice whose nodes are the integer multiples k * step lying
/// in the box [lo, hi]. Aligning to multiples of the step keeps nodes such as
/// 0, 1 or 3/2 exactly representable across boxes.
class Lattice {
public:
  Lattice() = default;
  /// Throws BudgetExceeded when the node count exceeds `max_nodes`.
  Lattice(std::vector<double> lo, std::vector<double> hi, double step, std::size_t max_nodes = kDefaultNodeBudget);

  std::size_t dim() const { return lo_.size(); }
  std::size_t size() const { return size_; }
  double step() const { return step_; }
  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }
  std::size_t count(std::size_t axis) const { return counts_[axis]; }

  /// Coordinates of the node with row-major flat index `flat` (axis 0 slowest).
  void node(std::size_t flat, std::span<double> out) const;
  std::vector<double> node(std::size_t flat) const;

  /// Flat index of the nearest node, or nothing when `x` lies more than half
  /// a step outside the node range on some axis.
  std::optional<std::size_t> nearest(std::span<const double> x) const;

private:
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<long long> kmin_;
  std::vector<std::size_t> counts_;
  double step_ = 1.0;
  std::size_t size_ = 0;
};

} // namespace econv
