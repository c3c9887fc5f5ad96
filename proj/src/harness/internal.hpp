#pragma once

#include "econv/convex_set.hpp"
#include "econv/coupling.hpp"
#include "econv/errors.hpp"
#include "econv/harness.hpp"

#include <optional>
#include <string>
#include <vector>

namespace econv::harness::detail {

/// A JSON value together with its location in the problem file.
class Node {
public:
  Node(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const Json& json() const { return *j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const { throw ValidationError(path_.empty() ? "/" : path_, what); }

  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }
  Node at(const std::string& key) const;
  std::optional<Node> find(const std::string& key) const;
  Node index(std::size_t i) const;
  std::size_t size() const;

  double number() const;
  /// A finite number.
  double real() const;
  ExtReal ext() const;
  bool boolean() const;
  std::string string() const;
  std::uint64_t unsigned_int() const;
  std::vector<double> numbers() const;
  Vec vec(std::size_t n) const;
  std::vector<Point> points(std::size_t n) const;
  /// Flat [x*, u*, alpha] array or {"xstar", "ustar", "alpha"} object.
  DualTriple triple(std::size_t n) const;
  std::vector<DualTriple> triples(std::size_t n) const;

private:
  const Json* j_;
  std::string path_;
};

/// The check's EvalContext after per-check "mode" and "grid" overrides.
EvalContext check_context(const Problem& p, const Node& check);

/// A list of {normal, level, strict} halfspaces, or for n = 1 an interval
/// object {lo, hi, lo_closed, hi_closed}.
FlaggedConvexSet parse_flagged_set(const Node& node, std::size_t n);

GridConfig parse_grid(const Node& node, std::size_t n, GridConfig base);

} // namespace econv::harness::detail
