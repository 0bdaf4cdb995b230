#pragma once

#include <stdexcept>
#include <string>

namespace tubelink {

enum class ErrorKind {
  validation,  // malformed input, broken invariant, bad config
  io,          // file open/read/write failure
};

// Single exception type for the whole library. The kind distinguishes
// validation failures (CLI exit 1) from I/O failures (CLI exit 2).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_validation(const std::string& message) {
  throw Error(ErrorKind::validation, message);
}

[[noreturn]] inline void throw_io(const std::string& message) {
  throw Error(ErrorKind::io, message);
}

}  // namespace tubelink
