#include "econv/vec.hpp"

#include "econv/errors.hpp"

#include <cmath>
#include <cstdio>

namespace econv {

Vec::Vec(std::size_t n, double fill) : n_(n) {
  if (n > kMaxDim) {
    throw DimensionMismatch("Vec: dimension " + std::to_string(n) + " exceeds 2");
  }
  data_.fill(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    data_[i] = fill;
  }
}

Vec::Vec(std::initializer_list<double> values) : n_(values.size()) {
  if (values.size() > kMaxDim) {
    throw DimensionMismatch("Vec: dimension exceeds 2");
  }
  std::size_t i = 0;
  for (double v : values) {
    data_[i++] = v;
  }
}

bool Vec::is_zero() const {
  for (std::size_t i = 0; i < n_; ++i) {
    if (data_[i] != 0.0) {
      return false;
    }
  }
  return true;
}

double Vec::norm() const { return std::sqrt(dot(*this, *this)); }

Vec& Vec::operator+=(const Vec& o) {
  require_same_dim(*this, o, "Vec::operator+");
  for (std::size_t i = 0; i < n_; ++i) {
    data_[i] += o.data_[i];
  }
  return *this;
}

Vec& Vec::operator-=(const Vec& o) {
  require_same_dim(*this, o, "Vec::operator-");
  for (std::size_t i = 0; i < n_; ++i) {
    data_[i] -= o.data_[i];
  }
  return *this;
}

Vec& Vec::operator*=(double s) {
  for (std::size_t i = 0; i < n_; ++i) {
    data_[i] *= s;
  }
  return *this;
}

bool operator==(const Vec& a, const Vec& b) {
  if (a.n_ != b.n_) {
    return false;
  }
  for (std::size_t i = 0; i < a.n_; ++i) {
    if (a.data_[i] != b.data_[i]) {
      return false;
    }
  }
  return true;
}

std::string Vec::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < n_; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", data_[i]);
    out += (i ? "," : "");
    out += buf;
  }
  return out + ")";
}

void require_same_dim(const Vec& a, const Vec& b, const char* where) {
  if (a.size() != b.size()) {
    throw DimensionMismatch(std::string(where) + ": dimension " + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
  }
}

double dot(const Vec& a, const Vec& b) {
  require_same_dim(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i] * b[i];
  }
  return s;
}

} // namespace econv
