#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace polydawg {

enum class ErrorCode {
  // catalog
  DuplicateName,
  InvalidPort,
  UnknownEngine,
  Duplicate,
  UnknownDatabase,
  UnknownObject,
  NoShim,
  UnknownCatalogTable,
  UnknownColumn,
  IoFailure,
  CorruptCatalog,
  InvalidArgument,
  // bql frontend
  UnterminatedString,
  IllegalCharacter,
  SyntaxError,
  UnknownFunctionToken,
  MisplacedCast,
  MisplacedCatalog,
  UnsupportedSqlFeature,
  InvalidGrouping,
  UnknownArrayOperator,
  ArityError,
  MissingKey,
  UnknownTextOperator,
  SchemaSyntaxError,
  BadBounds,
  // engines
  UnknownTable,
  TypeError,
  DivisionByZero,
  UnknownArray,
  UnknownAttribute,
  RedimensionCollision,
  OutOfBounds,
  // island layer
  NoCandidateEngine,
  EngineFailure,
  ShimUnsupported,
  // migrator
  MigrationFailure,
  NoCastRegistered,
  SchemaMismatch,
  CoordinateCollision,
  NullInDimension,
  // monitor
  DuplicateBenchmark,
  UnknownSignature,
  // planner / executor
  PlanningError,
  LocalQueryExecution,
  // endpoint
  AlreadyLoaded,
  BindFailure,
};

std::string_view to_string(ErrorCode code);

/// True for errors raised while turning query text into an AST.
bool is_parse_error(ErrorCode code);

/// Base exception for everything the middleware raises. Parse errors carry
/// the byte offset into the query text they were produced from.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> offset = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }

  /// For wrapping errors (EngineFailure, LocalQueryExecution, MigrationFailure):
  /// the code of the underlying error.
  ErrorCode cause() const noexcept { return cause_.value_or(code_); }
  Error& with_cause(ErrorCode cause) {
    cause_ = cause;
    return *this;
  }

 private:
  ErrorCode code_;
  std::optional<std::size_t> offset_;
  std::optional<ErrorCode> cause_;
};

enum class MigrationPhase { Extract, Transform, Load };

std::string_view to_string(MigrationPhase phase);

class MigrationException : public Error {
 public:
  MigrationException(MigrationPhase phase, ErrorCode cause, const std::string& message);

  MigrationPhase phase() const noexcept { return phase_; }

 private:
  MigrationPhase phase_;
};

}  // namespace polydawg
