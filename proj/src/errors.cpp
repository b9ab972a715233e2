#include "medjargon/errors.hpp"

namespace medjargon {

namespace {

std::string decorate(ErrorKind kind, const std::string& message) {
  return std::string(kind_name(kind)) + ": " + message;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(decorate(kind, message)), kind_(kind) {}

PoolExhaustedError::PoolExhaustedError(std::size_t accepted, const std::string& message)
    : Error(ErrorKind::PoolExhausted, message), accepted_(accepted) {}

const char* kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::BadFoldCount: return "BadFoldCount";
    case ErrorKind::ExemplarCountMismatch: return "ExemplarCountMismatch";
    case ErrorKind::BadTopK: return "BadTopK";
    case ErrorKind::TooFewFolds: return "TooFewFolds";
    case ErrorKind::FoldMismatch: return "FoldMismatch";
    case ErrorKind::UnknownCell: return "UnknownCell";
    case ErrorKind::AuthMissing: return "AuthMissing";
    case ErrorKind::ProviderRejected: return "ProviderRejected";
    case ErrorKind::ExhaustedRetries: return "ExhaustedRetries";
    case ErrorKind::TransportFailure: return "TransportFailure";
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::DuplicateNoteId: return "DuplicateNoteId";
    case ErrorKind::ParseEmpty: return "ParseEmpty";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::InsufficientPool: return "InsufficientPool";
    case ErrorKind::PoolTooSmall: return "PoolTooSmall";
    case ErrorKind::PoolExhausted: return "PoolExhausted";
    case ErrorKind::InsufficientRecords: return "InsufficientRecords";
    case ErrorKind::IncompleteGrid: return "IncompleteGrid";
  }
  return "Error";
}

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::BadFoldCount:
    case ErrorKind::ExemplarCountMismatch:
    case ErrorKind::BadTopK:
    case ErrorKind::TooFewFolds:
    case ErrorKind::FoldMismatch:
    case ErrorKind::UnknownCell:
      return 2;
    case ErrorKind::AuthMissing:
    case ErrorKind::ProviderRejected:
    case ErrorKind::ExhaustedRetries:
    case ErrorKind::TransportFailure:
      return 3;
    default:
      return 4;
  }
}

void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace medjargon
