#pragma once

#include <stdexcept>
#include <string>

namespace mba {

enum class ErrorKind {
  InvalidArgument,  // bad parameter or violated precondition
  Parse,            // malformed input text
  Io,               // file system / compression failure
  Dimension,        // incompatible dimensions between objects
  Numeric,          // solver divergence, indefinite matrix, overflow
  Config,           // invalid experiment configuration
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace mba
