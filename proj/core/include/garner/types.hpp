#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace garner {

using Real = double;
using Index = std::int64_t;

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape disagreement between operands (rows, cols, node counts).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Structurally invalid data: asymmetric adjacency, out-of-range ids,
// duplicate edges, negative weights, inconsistent label sets.
class StructureError : public Error {
 public:
  using Error::Error;
};

// A scalar parameter outside its documented range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Filesystem or file-format failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// A spectrally certified graph could not be produced within the
// attempt budget.
class CertificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace garner
