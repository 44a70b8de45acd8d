#pragma once

#include <stdexcept>
#include <string>

namespace feedkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: files, configs, CLI arguments. Mapped to exit code 1.
class InputError : public Error {
 public:
  using Error::Error;
};

// Input is valid but a domain condition blocks completion, e.g. annotations
// that still need adjudication. Mapped to exit code 2.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace feedkit
