#pragma once

#include <stdexcept>
#include <string>

namespace lyafun {

//! Input violates a documented precondition or type invariant.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

//! A computation could not be carried out (singular system, empty weights...).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace lyafun
