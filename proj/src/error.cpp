#include "polydawg/error.hpp"

namespace polydawg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::InvalidPort: return "InvalidPort";
    case ErrorCode::UnknownEngine: return "UnknownEngine";
    case ErrorCode::Duplicate: return "Duplicate";
    case ErrorCode::UnknownDatabase: return "UnknownDatabase";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::NoShim: return "NoShim";
    case ErrorCode::UnknownCatalogTable: return "UnknownCatalogTable";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::CorruptCatalog: return "CorruptCatalog";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnterminatedString: return "UnterminatedString";
    case ErrorCode::IllegalCharacter: return "IllegalCharacter";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownFunctionToken: return "UnknownFunctionToken";
    case ErrorCode::MisplacedCast: return "MisplacedCast";
    case ErrorCode::MisplacedCatalog: return "MisplacedCatalog";
    case ErrorCode::UnsupportedSqlFeature: return "UnsupportedSqlFeature";
    case ErrorCode::InvalidGrouping: return "InvalidGrouping";
    case ErrorCode::UnknownArrayOperator: return "UnknownArrayOperator";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::UnknownTextOperator: return "UnknownTextOperator";
    case ErrorCode::SchemaSyntaxError: return "SchemaSyntaxError";
    case ErrorCode::BadBounds: return "BadBounds";
    case ErrorCode::UnknownTable: return "UnknownTable";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::UnknownArray: return "UnknownArray";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::RedimensionCollision: return "RedimensionCollision";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::NoCandidateEngine: return "NoCandidateEngine";
    case ErrorCode::EngineFailure: return "EngineFailure";
    case ErrorCode::ShimUnsupported: return "ShimUnsupported";
    case ErrorCode::MigrationFailure: return "MigrationException";
    case ErrorCode::NoCastRegistered: return "NoCastRegistered";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::CoordinateCollision: return "CoordinateCollision";
    case ErrorCode::NullInDimension: return "NullInDimension";
    case ErrorCode::DuplicateBenchmark: return "DuplicateBenchmark";
    case ErrorCode::UnknownSignature: return "UnknownSignature";
    case ErrorCode::PlanningError: return "PlanningError";
    case ErrorCode::LocalQueryExecution: return "LocalQueryExecutionException";
    case ErrorCode::AlreadyLoaded: return "AlreadyLoaded";
    case ErrorCode::BindFailure: return "BindFailure";
  }
  return "Unknown";
}

bool is_parse_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnterminatedString:
    case ErrorCode::IllegalCharacter:
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownFunctionToken:
    case ErrorCode::MisplacedCast:
    case ErrorCode::MisplacedCatalog:
    case ErrorCode::UnsupportedSqlFeature:
    case ErrorCode::InvalidGrouping:
    case ErrorCode::UnknownArrayOperator:
    case ErrorCode::ArityError:
    case ErrorCode::MissingKey:
    case ErrorCode::UnknownTextOperator:
    case ErrorCode::SchemaSyntaxError:
    case ErrorCode::BadBounds:
      return true;
    default:
      return false;
  }
}

namespace {

std::string decorate(ErrorCode code, const std::string& message,
                     std::optional<std::size_t> offset) {
  std::string out(to_string(code));
  if (offset) out += " at offset " + std::to_string(*offset);
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> offset)
    : std::runtime_error(decorate(code, message, offset)), code_(code), offset_(offset) {}

std::string_view to_string(MigrationPhase phase) {
  switch (phase) {
    case MigrationPhase::Extract: return "extract";
    case MigrationPhase::Transform: return "transform";
    case MigrationPhase::Load: return "load";
  }
  return "unknown";
}

MigrationException::MigrationException(MigrationPhase phase, ErrorCode cause,
                                       const std::string& message)
    : Error(ErrorCode::MigrationFailure,
            std::string(to_string(phase)) + " phase failed (" + std::string(to_string(cause)) +
                "): " + message),
      phase_(phase) {
  with_cause(cause);
}

}  // namespace polydawg
