#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace it2pf {

/// Machine-readable error categories. The CLI prints the category name on failure.
enum class ErrorCategory {
  InputDomain,
  Shape,
  Parameter,
  Structural,
  Training,
  EmptyInput,
  Format,
  Version,
  Config,
  Demonstration,
  Io,
};

const char* category_name(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory c, const std::string& msg) { throw Error(c, msg); }

/// Message is only materialized on failure; build costly messages behind an explicit branch.
inline void require(bool cond, ErrorCategory c, std::string_view msg) {
  if (!cond) fail(c, std::string(msg));
}

}  // namespace it2pf
