#pragma once

#include <stdexcept>
#include <string>

namespace neq {

enum class Errc {
  invalid_config,
  index_range,
  protocol,
  validation,
  numeric,
  rank_deficient,
  io,
  usage,
};

/// Exception carrying a coarse error category alongside the message.
/// The C API maps each category onto a stable status code.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace neq
