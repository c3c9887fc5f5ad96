#include "econv/coupling.hpp"

#include "econv/errors.hpp"

#include <cmath>
#include <cstdio>

namespace econv {

void DualTriple::validate() const {
  require_same_dim(xstar, ustar, "DualTriple");
  for (double v : xstar) {
    if (!std::isfinite(v)) {
      throw Error("DualTriple: non-finite x* entry");
    }
  }
  for (double v : ustar) {
    if (!std::isfinite(v)) {
      throw Error("DualTriple: non-finite u* entry");
    }
  }
  if (!std::isfinite(alpha)) {
    throw Error("DualTriple: non-finite alpha");
  }
}

std::string DualTriple::to_string() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", alpha);
  return "(" + xstar.to_string() + "," + ustar.to_string() + "," + buf + ")";
}

DualTriple operator+(const DualTriple& a, const DualTriple& b) {
  return {a.xstar + b.xstar, a.ustar + b.ustar, a.alpha + b.alpha};
}

bool in_open_halfspace(const Point& x, const Vec& ustar, double alpha, const TolerancePolicy& tol) {
  return tol.less(dot(x, ustar), alpha);
}

ExtReal coupling_c(const Point& x, const DualTriple& w, const TolerancePolicy& tol) {
  if (!in_open_halfspace(x, w.ustar, w.alpha, tol)) {
    return ExtReal::pos_inf();
  }
  return dot(x, w.xstar);
}

bool coupling_additivity_holds(const Point& x, const DualTriple& w1, const DualTriple& w2,
                               const TolerancePolicy& tol) {
  return in_open_halfspace(x, w1.ustar, w1.alpha, tol) && in_open_halfspace(x, w2.ustar, w2.alpha, tol);
}

bool w_halfspace_member(const WHalfspace& h, const DualTriple& w, const TolerancePolicy& tol) {
  const double lhs = dot(h.x, w.xstar) + dot(h.u, w.ustar) + w.alpha * h.beta;
  return tol.less(lhs, h.level);
}

} // namespace econv
