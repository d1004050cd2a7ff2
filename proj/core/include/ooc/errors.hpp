#pragma once

#include <stdexcept>
#include <string>

namespace ooc {

// Shape or dimension disagreement between tensors.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An API precondition was violated by the caller.
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An index (vocabulary id, class target, ...) is out of range.
struct IndexError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad or inconsistent input data (files, corpora, checkpoints).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values encountered during optimization.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ooc
