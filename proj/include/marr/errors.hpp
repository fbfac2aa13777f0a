#pragma once

#include <stdexcept>
#include <string>

namespace marr {

// Every module-level failure carries a stable machine-readable code.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string &message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string &code() const noexcept { return code_; }

private:
  std::string code_;
};

} // namespace marr
