#pragma once

#include <stdexcept>
#include <string>

namespace wgibbs {

// Failure categories. The numeric values double as process exit codes and as
// the status codes returned through the C API.
enum class ErrorKind : int {
  InvalidArgument = 1,
  Config = 2,
  Io = 3,
  Numeric = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorKind::InvalidArgument, what);
}
[[noreturn]] inline void throw_config(const std::string& what) {
  throw Error(ErrorKind::Config, what);
}
[[noreturn]] inline void throw_io(const std::string& what) {
  throw Error(ErrorKind::Io, what);
}
[[noreturn]] inline void throw_numeric(const std::string& what) {
  throw Error(ErrorKind::Numeric, what);
}

}  // namespace wgibbs
