#pragma once
#include <stdexcept>
#include <string>

namespace spe {

enum class Err {
  SelfLoop,
  IndexOutOfRange,
  FeatureRowMismatch,
  IsolatedNode,
  ParseError,
  BadParams,
  ShapeMismatch,
  NotSquare,
  RankDeficient,
  NoConvergence,
  NonInteger,
  TooLarge,
  UnknownFilter,
  GraphRequired,
  IoError,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& msg)
      : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw Error(code, msg); }

inline void check(bool ok, Err code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace spe
