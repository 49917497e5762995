#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aqtc {

enum class ErrorCode {
  MalformedScript,
  EmptyScript,
  EmptySublist,
  EmptyCorpus,
  EmptyFunctionSet,
  DimensionMismatch,
  BadMagic,
  TruncatedFile,
  DuplicateId,
  NonFiniteValue,
  IoError,
  MissingId,
  EmptyList,
  IndexOutOfRange,
  EmptyDataset,
  EmptyRecords,
  CoverageGap,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above so the
// CLI can report it in machine-readable form.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace aqtc
