#pragma once

#include <stdexcept>
#include <string>

namespace matchband {

enum class ErrorKind {
  kInvalidInput,
  kInvalidMarket,
  kInvalidHorizon,
  kUndefinedMean,
  kSizeLimit,
  kDegenerateMarket,
  kUnsupportedCheck,
  kUsage,
  kIo,
};

const char* ErrorKindName(ErrorKind kind);

// Every failure raised by the library carries a kind so the CLI can map it
// onto an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace matchband
