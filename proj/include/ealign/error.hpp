#pragma once

#include <stdexcept>
#include <string>

namespace ealign {

/// Bad input: malformed configuration, violated preconditions, mismatched grids.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A run that cannot continue (NaN, CFL violation, support reaching the boundary margin).
class RuntimeAbort : public std::runtime_error {
 public:
  explicit RuntimeAbort(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ealign
