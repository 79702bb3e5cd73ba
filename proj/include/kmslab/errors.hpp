#pragma once

#include <stdexcept>

namespace kmslab {

/// The requested series has no finite value at this parameter.
class DivergentSeries : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A configured resource cap (depth, level, term count) would be exceeded.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An atomic Gibbs measure was requested in the regime where none exists.
class NoAtomicMeasure : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A certified internal consistency check failed; this signals a bug, not bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace kmslab
