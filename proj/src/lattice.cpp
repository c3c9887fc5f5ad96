#include "econv/lattice.hpp"

#include "econv/errors.hpp"

#include <cmath>
#include <string>

namespace econv {

Lattice::Lattice(std::vector<double> lo, std::vector<double> hi, double step, std::size_t max_nodes)
    : lo_(std::move(lo)), hi_(std::move(hi)), step_(step) {
  if (lo_.size() != hi_.size() || lo_.empty()) {
    throw DimensionMismatch("Lattice: lo/hi must be non-empty and of equal length");
  }
  if (!(step_ > 0.0) || !std::isfinite(step_)) {
    throw Error("Lattice: step must be positive");
  }
  double total = 1.0;
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (!std::isfinite(lo_[i]) || !std::isfinite(hi_[i]) || lo_[i] > hi_[i]) {
      throw Error("Lattice: box must be bounded with lo <= hi");
    }
    const double a = std::ceil(lo_[i] / step_ - 1e-9);
    const double b = std::floor(hi_[i] / step_ + 1e-9);
    if (b < a) {
      throw Error("Lattice: box contains no step-aligned node on axis " + std::to_string(i));
    }
    kmin_.push_back(static_cast<long long>(a));
    counts_.push_back(static_cast<std::size_t>(b - a) + 1);
    total *= static_cast<double>(counts_.back());
  }
  if (total > static_cast<double>(max_nodes)) {
    throw BudgetExceeded("Lattice: " + std::to_string(static_cast<long long>(total)) + " nodes exceed the budget of " +
                         std::to_string(max_nodes));
  }
  size_ = static_cast<std::size_t>(total);
}

void Lattice::node(std::size_t flat, std::span<double> out) const {
  for (std::size_t i = dim(); i-- > 0;) {
    const std::size_t k = flat % counts_[i];
    flat /= counts_[i];
    out[i] = static_cast<double>(kmin_[i] + static_cast<long long>(k)) * step_;
  }
}

std::vector<double> Lattice::node(std::size_t flat) const {
  std::vector<double> out(dim());
  node(flat, out);
  return out;
}

std::optional<std::size_t> Lattice::nearest(std::span<const double> x) const {
  if (x.size() != dim()) {
    throw DimensionMismatch("Lattice::nearest: dimension mismatch");
  }
  std::size_t flat = 0;
  for (std::size_t i = 0; i < dim(); ++i) {
    const double k = std::round(x[i] / step_) - static_cast<double>(kmin_[i]);
    if (k < 0.0 || k >= static_cast<double>(counts_[i])) {
      return std::nullopt;
    }
    flat = flat * counts_[i] + static_cast<std::size_t>(k);
  }
  return flat;
}

} // namespace econv
