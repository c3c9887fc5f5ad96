#pragma once

#include <stdexcept>
#include <string>

namespace econv {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

/// A flagged set has no points.
class EmptySet : public Error {
public:
  using Error::Error;
};

/// GRID-mode separation could not be certified at the configured resolution.
class SearchFailed : public Error {
public:
  using Error::Error;
};

class PointNotInSet : public Error {
public:
  using Error::Error;
};

class PointNotInDomain : public Error {
public:
  using Error::Error;
};

/// A grid would exceed the node budget.
class BudgetExceeded : public Error {
public:
  using Error::Error;
};

/// The requested computation has no implementation for this input
/// (e.g. an EXACT conjugate of a grid-sampled function).
class NotSupported : public Error {
public:
  using Error::Error;
};

class HypothesisNotCertified : public Error {
public:
  using Error::Error;
};

/// Malformed problem file; `path` points into the JSON document.
class ValidationError : public Error {
public:
  ValidationError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

} // namespace econv
