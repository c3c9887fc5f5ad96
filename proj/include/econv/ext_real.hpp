#pragma once

#include <compare>
#include <limits>
#include <string>
#include <vector>

namespace econv {

/// Extended real number: a finite double, +inf or -inf. NaN is never
/// representable; constructing from NaN throws std::domain_error.
class ExtReal {
public:
  constexpr ExtReal() = default;
  ExtReal(double v); // NOLINT(google-explicit-constructor): implicit by design of the arithmetic

  static constexpr ExtReal pos_inf() { return ExtReal(Raw{}, std::numeric_limits<double>::infinity()); }
  static constexpr ExtReal neg_inf() { return ExtReal(Raw{}, -std::numeric_limits<double>::infinity()); }

  constexpr bool is_finite() const { return v_ > -kInf && v_ < kInf; }
  constexpr bool is_pos_inf() const { return v_ == kInf; }
  constexpr bool is_neg_inf() const { return v_ == -kInf; }

  /// Underlying double; +-inf for the infinite variants.
  constexpr double value() const { return v_; }

  constexpr ExtReal operator-() const { return ExtReal(Raw{}, -v_); }

  friend constexpr bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
  friend constexpr std::partial_ordering operator<=>(ExtReal a, ExtReal b) { return a.v_ <=> b.v_; }

  std::string to_string() const;

private:
  struct Raw {};
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr ExtReal(Raw, double v) : v_(v) {}

  double v_ = 0.0;
};

/// Addition under the conjugation convention: any sum mixing +inf and -inf
/// is -inf. Used inside conjugate suprema.
ExtReal add_conj(ExtReal a, ExtReal b);

/// a - b as add_conj(a, -b); in particular (+inf)-(+inf) = (-inf)-(-inf) = -inf.
ExtReal sub_conj(ExtReal a, ExtReal b);

/// Collects non-fatal warnings raised by arithmetic outside its intended domain.
struct Diagnostics {
  std::vector<std::string> warnings;
};

/// Subtraction for DC objectives: (+inf)-(+inf) = +inf, finite-(+inf) = -inf,
/// finite-(-inf) = +inf. (-inf)-(-inf) cannot occur for proper functions;
/// it returns +inf and records a warning in `diag` when given.
ExtReal sub_dc(ExtReal a, ExtReal b, Diagnostics* diag = nullptr);

} // namespace econv
