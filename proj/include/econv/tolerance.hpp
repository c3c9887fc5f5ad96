#pragma once

#include <algorithm>
#include <cmath>

namespace econv {

enum class Mode { Exact, Grid };

/// Comparison policy shared by every module.
///
/// EXACT: comparisons are plain floating-point comparisons (eq_tol and
/// strict_margin are zero). GRID: `a < b` requires
/// a <= b - strict_margin * max(1, |a|, |b|) and `a <= b` allows an absolute
/// slack of eq_tol.
struct TolerancePolicy {
  Mode mode = Mode::Exact;
  double eq_tol = 0.0;
  double strict_margin = 0.0;

  static constexpr TolerancePolicy exact() { return {Mode::Exact, 0.0, 0.0}; }
  static constexpr TolerancePolicy grid(double eq_tol = 1e-9, double strict_margin = 1e-9) {
    return {Mode::Grid, eq_tol, strict_margin};
  }

  bool is_exact() const { return mode == Mode::Exact; }

  /// Strict inequality a < b.
  bool less(double a, double b) const {
    if (mode == Mode::Exact) {
      return a < b;
    }
    return a <= b - margin(a, b);
  }

  bool less_equal(double a, double b) const {
    return mode == Mode::Exact ? a <= b : a <= b + eq_tol;
  }

  double margin(double a, double b) const {
    return strict_margin * std::max({1.0, std::abs(a), std::abs(b)});
  }

  /// Slack for inequalities between computed values (subgradient and
  /// conjugate inequalities). Closed-form EXACT values still carry rounding,
  /// so EXACT uses 1e-9 relative to the magnitudes involved.
  double value_tol(double a, double b) const {
    if (mode == Mode::Exact) {
      return kExactValueTol * std::max({1.0, std::abs(a), std::abs(b)});
    }
    return eq_tol;
  }

  bool value_le(double a, double b) const { return a <= b + value_tol(a, b); }
  bool value_eq(double a, double b) const { return std::abs(a - b) <= value_tol(a, b); }

  static constexpr double kExactValueTol = 1e-9;
};

} // namespace econv
