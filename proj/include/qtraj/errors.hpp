#pragma once

#include <stdexcept>
#include <string>

namespace qtraj {

// Bad inputs: malformed configs, dimension mismatches, violated preconditions.
// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The computation itself went bad: lost positivity, vanishing probabilities,
// non-convergent eigensolves.  The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace qtraj
