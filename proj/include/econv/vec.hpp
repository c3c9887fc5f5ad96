#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <string>

namespace econv {

/// Small fixed-capacity vector for the spaces R^1 and R^2.
class Vec {
public:
  static constexpr std::size_t kMaxDim = 2;

  Vec() = default;
  explicit Vec(std::size_t n, double fill = 0.0);
  Vec(std::initializer_list<double> values);

  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  const double* begin() const { return data_.data(); }
  const double* end() const { return data_.data() + n_; }
  double* begin() { return data_.data(); }
  double* end() { return data_.data() + n_; }

  bool is_zero() const;
  double norm() const;

  Vec& operator+=(const Vec& o);
  Vec& operator-=(const Vec& o);
  Vec& operator*=(double s);

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator-(Vec a) { return a *= -1.0; }
  friend bool operator==(const Vec& a, const Vec& b);

  std::string to_string() const;

private:
  std::array<double, kMaxDim> data_{};
  std::size_t n_ = 0;
};

using Point = Vec;

/// Euclidean pairing; throws DimensionMismatch on differing sizes.
double dot(const Vec& a, const Vec& b);

void require_same_dim(const Vec& a, const Vec& b, const char* where);

} // namespace econv
