#pragma once

#include <stdexcept>
#include <string>

namespace covstar {

// Error categories; the CLI maps them onto exit codes (input errors exit
// with 2, unmet prerequisites with 3).
enum class ErrorKind { parse, input, prerequisite, internal };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_parse(const std::string& msg) {
  throw Error(ErrorKind::parse, msg);
}
[[noreturn]] inline void fail_input(const std::string& msg) {
  throw Error(ErrorKind::input, msg);
}
[[noreturn]] inline void fail_prereq(const std::string& msg) {
  throw Error(ErrorKind::prerequisite, msg);
}
[[noreturn]] inline void fail_internal(const std::string& msg) {
  throw Error(ErrorKind::internal, msg);
}

} // namespace covstar
