#pragma once

#include <stdexcept>
#include <string>

namespace dirhide {

// Invalid quantum numbers, parameters outside their physical range.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A caller-side precondition of a computation was not met (e.g. an
// incomplete POVM seed, an insufficient quadrature degree).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Request exceeds a configured resource ceiling (dense Hilbert space size,
// exact-integer range).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dirhide
