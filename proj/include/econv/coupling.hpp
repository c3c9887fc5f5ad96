#pragma once

#include "econv/ext_real.hpp"
#include "econv/tolerance.hpp"
#include "econv/vec.hpp"

#include <string>

namespace econv {

/// A point (x*, u*, alpha) of W = X* x X* x R.
struct DualTriple {
  Vec xstar;
  Vec ustar;
  double alpha = 0.0;

  std::size_t dim() const { return xstar.size(); }
  void validate() const;
  std::string to_string() const;

  friend DualTriple operator+(const DualTriple& a, const DualTriple& b);
  friend bool operator==(const DualTriple& a, const DualTriple& b) = default;
};

/// {x : <x, normal> < level} when strict, {x : <x, normal> <= level} otherwise.
struct XHalfspace {
  Vec normal;
  double level = 0.0;
  bool strict = true;
};

/// {(x*,u*,a) in W : <x,x*> + <u,u*> + a*beta < level}.
struct WHalfspace {
  Vec x;
  Vec u;
  double beta = 0.0;
  double level = 0.0;
};

/// Whether x lies in the open halfspace {<x,u*> < alpha}, per the policy.
bool in_open_halfspace(const Point& x, const Vec& ustar, double alpha, const TolerancePolicy& tol);

/// c(x, w) = <x, x*> if <x, u*> < alpha, +inf otherwise.
ExtReal coupling_c(const Point& x, const DualTriple& w, const TolerancePolicy& tol = TolerancePolicy::exact());

/// c'(w, x); the same formula with the arguments flipped.
inline ExtReal coupling_cprime(const DualTriple& w, const Point& x,
                               const TolerancePolicy& tol = TolerancePolicy::exact()) {
  return coupling_c(x, w, tol);
}

/// True iff both <x,u1*> < a1 and <x,u2*> < a2, which makes
/// c(x, w1 + w2) = c(x, w1) + c(x, w2).
bool coupling_additivity_holds(const Point& x, const DualTriple& w1, const DualTriple& w2,
                               const TolerancePolicy& tol = TolerancePolicy::exact());

bool w_halfspace_member(const WHalfspace& h, const DualTriple& w,
                        const TolerancePolicy& tol = TolerancePolicy::exact());

} // namespace econv
