#include "econv/ext_real.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace econv {

ExtReal::ExtReal(double v) : v_(v) {
  if (std::isnan(v)) {
    throw std::domain_error("ExtReal: NaN is not an extended real");
  }
}

std::string ExtReal::to_string() const {
  if (is_pos_inf()) {
    return "inf";
  }
  if (is_neg_inf()) {
    return "-inf";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v_ == 0.0 ? 0.0 : v_);
  return buf;
}

ExtReal add_conj(ExtReal a, ExtReal b) {
  if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf())) {
    return ExtReal::neg_inf();
  }
  if (!a.is_finite()) {
    return a;
  }
  if (!b.is_finite()) {
    return b;
  }
  return ExtReal(a.value() + b.value());
}

ExtReal sub_conj(ExtReal a, ExtReal b) { return add_conj(a, -b); }

ExtReal sub_dc(ExtReal a, ExtReal b, Diagnostics* diag) {
  if (a.is_pos_inf() && b.is_pos_inf()) {
    return ExtReal::pos_inf();
  }
  if (a.is_neg_inf() && b.is_neg_inf()) {
    if (diag != nullptr) {
      diag->warnings.emplace_back("sub_dc: (-inf)-(-inf) outside the proper DC setting; returning +inf");
    }
    return ExtReal::pos_inf();
  }
  return add_conj(a, -b);
}

} // namespace econv
