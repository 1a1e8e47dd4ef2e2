#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ndb {

// Every failure surfaced by the library carries one of these codes so that
// callers (and the CLI exit-code mapping) can react without string matching.
enum class ErrorCode {
  EmptyText,
  NonMonotonicTimestamp,
  UnknownFactId,
  MalformedRecord,
  UnknownRelation,
  InsufficientEntities,
  IndexOutOfRange,
  NoJoinPath,
  UnknownPlace,
  EmptyCorpus,
  DimensionMismatch,
  EmptyTrainingSet,
  OperatorUnavailable,
  ProtocolError,
  UnparsedQuery,
  MissingProvenance,
  InconsistentCase,
  OracleFailure,
  TypeMismatch,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace ndb
