#pragma once

#include <stdexcept>
#include <string>

namespace lscl {

enum class errc {
  invalid_argument,
  malformed_row,
  dimension_mismatch,
  non_finite_value,
  empty_class,
  zero_norm,
  io_failure,
  singular_system,
};

// Runtime error carrying a machine-checkable kind next to the message.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace lscl
