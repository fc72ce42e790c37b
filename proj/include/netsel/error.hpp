#pragma once

#include <stdexcept>
#include <string>

namespace netsel {

// Raised when an analysis has no meaningful answer for valid inputs: a
// degenerate equilibrium formula, a chain of the wrong class, a solver
// that did not converge.
class analysis_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace netsel
