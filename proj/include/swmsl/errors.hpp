#pragma once

#include <stdexcept>
#include <string>

namespace swmsl {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid domain objects or arguments (bad simplex point, size mismatch, ...).
struct ValidationError : Error {
  using Error::Error;
};

/// File system and format errors; messages carry the path and, for parse
/// failures, the offending line number.
struct IoError : Error {
  using Error::Error;
};

/// Solver breakdowns and undefined numerical requests.
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace swmsl
