#pragma once

#include <stdexcept>
#include <string>

namespace sslab {

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Internal inconsistency between objects that should agree (e.g. a word with
// no ancestor in a coarser partition).
struct ConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A configured size cap would be exceeded.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evidence is insufficient to decide.
struct InconclusiveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sslab
