#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace medjargon {

enum class ErrorKind {
  // configuration problems (exit code 2)
  ConfigError,
  BadFoldCount,
  ExemplarCountMismatch,
  BadTopK,
  TooFewFolds,
  FoldMismatch,
  UnknownCell,
  // provider problems (exit code 3)
  AuthMissing,
  ProviderRejected,
  ExhaustedRetries,
  TransportFailure,
  // data problems (exit code 4)
  MissingFile,
  IoFailure,
  MalformedRecord,
  DuplicateNoteId,
  ParseEmpty,
  EmptySet,
  InsufficientPool,
  PoolTooSmall,
  PoolExhausted,
  InsufficientRecords,
  IncompleteGrid,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Thrown when the augmentation pool runs dry before the largest target size
/// is met; carries how many records had been accepted by then.
class PoolExhaustedError : public Error {
public:
  PoolExhaustedError(std::size_t accepted, const std::string& message);
  std::size_t accepted_count() const noexcept { return accepted_; }

private:
  std::size_t accepted_;
};

const char* kind_name(ErrorKind kind) noexcept;

/// Process exit code for the error's category: 2 config, 3 provider, 4 data.
int exit_code_for(ErrorKind kind) noexcept;

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace medjargon
