#pragma once

#include <stdexcept>
#include <string>

namespace oam4 {

/// Bad input: out-of-range parameters, unknown modes, malformed density
/// matrices or files. The CLI maps it to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation that could not produce a result (zero post-selection
/// probability, optimizer breakdown). The CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace oam4
