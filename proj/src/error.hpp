#pragma once

#include <stdexcept>
#include <string>

namespace certicd {

enum class Err {
  InvalidArgument,
  Io,
  Parse,
  Version,
  Checksum,
  Truncated,
  ResourceLimit,
  Separability,
  Consistency,
  Infeasible,
};

class Error : public std::runtime_error {
 public:
  Error(Err code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw Error(code, msg); }

}  // namespace certicd
