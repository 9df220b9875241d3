#pragma once

#include <stdexcept>
#include <string>

namespace cqot {

/// Every failure the library can surface, one kind per contract-level error.
enum class ErrorKind {
  InvalidArgument,
  EmptyQuery,
  EmptyPlan,
  EmptyAnswer,
  MissingFirstTurn,
  OutOfRange,
  ConfigError,
  AuthError,
  RateLimited,
  TransportError,
  EmptyCompletion,
  NoScoreFound,
  SchemaError,
  DuplicateId,
  EmptyInput,
  NonpositiveBase,
  InsufficientSamples,
  EmptyStore,
  StoreConflict,
  IoError,
  Aborted,
};

const char* error_kind_name(ErrorKind kind);

class CqotError : public std::runtime_error {
 public:
  CqotError(ErrorKind kind, const std::string& message, bool transient = false)
      : std::runtime_error(message), kind_(kind), transient_(transient) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Transient errors are worth retrying (connection drops, 5xx, 429).
  bool transient() const noexcept { return transient_; }

 private:
  ErrorKind kind_;
  bool transient_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message,
                               bool transient = false) {
  throw CqotError(kind, message, transient);
}

}  // namespace cqot
