#ifndef XCOREF_ERRORS_H_
#define XCOREF_ERRORS_H_

#include <stdexcept>
#include <string>

namespace xcoref {

// Raised for bad user-supplied data: malformed records, inconsistent files,
// mismatched dimensions. The command-line tool maps these to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A record could not be decoded; the message names the offending field.
class ParseError : public InputError {
 public:
  using InputError::InputError;
};

// A record decoded but violates a data-model invariant.
class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

// Numeric failure during training (non-finite gradient and the like).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace xcoref

#endif  // XCOREF_ERRORS_H_
