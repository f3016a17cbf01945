#pragma once

#include <stdexcept>
#include <string>

namespace cfair {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural invariant of the calculus was violated at construction time.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace cfair
