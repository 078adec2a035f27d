#pragma once

#include <stdexcept>
#include <string>

namespace slithers {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A 4x4 matrix handed to vee does not have the se(3) shape, or a pose fails
// its orthonormality invariants.
struct StructureError : Error {
  using Error::Error;
};

// Rotation angle within kLogAngleMargin of pi; the principal logarithm is not
// well conditioned there and no branch is silently picked.
struct LogDomainError : Error {
  using Error::Error;
};

// A commanded input violates a velocity or joint limit.
struct LimitError : Error {
  using Error::Error;
};

// Vector/model dimensions disagree (e.g. lambda_v length vs input channels).
struct DimensionError : Error {
  using Error::Error;
};

// Malformed description/config/trace file.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace slithers
