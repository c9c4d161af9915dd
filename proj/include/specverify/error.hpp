#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace specverify {

enum class ErrorCode {
  // requirements_store
  MalformedDocument,
  DuplicateId,
  UnknownCategory,
  SourceMissing,
  BudgetTooSmall,
  // llm_gateway
  ReplayMiss,
  ProviderUnavailable,
  AuthFailure,
  ResponseEmpty,
  StoreWriteFailure,
  // formalizer / injector
  UnparseableResponse,
  UnmappedVariable,
  IdentifierUnknown,
  MultipleAssertionsPerStatement,
  AnchorNotFound,
  AnchorAmbiguous,
  InjectionUnsupported,
  // bmc_adapter
  ToolNotFound,
  ToolCrashed,
  NoStatesFound,
  // witness_lab
  InputUnmappable,
  BuildFailed,
  // fp_medsel
  NonFiniteInput,
  // evaluation
  IdMismatch,
  UniverseMismatch,
  RequirementMismatch,
  // cli
  ConfigInvalid,
  MissingExternalTool,
  // shared
  ContractViolation,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the toolkit carries one of the codes above; the
/// message adds the offending id, path, or fingerprint.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::ContractViolation, message);
}

}  // namespace specverify
