#include "specverify/error.hpp"

namespace specverify {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::SourceMissing: return "SourceMissing";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::ReplayMiss: return "ReplayMiss";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::AuthFailure: return "AuthFailure";
    case ErrorCode::ResponseEmpty: return "ResponseEmpty";
    case ErrorCode::StoreWriteFailure: return "StoreWriteFailure";
    case ErrorCode::UnparseableResponse: return "UnparseableResponse";
    case ErrorCode::UnmappedVariable: return "UnmappedVariable";
    case ErrorCode::IdentifierUnknown: return "IdentifierUnknown";
    case ErrorCode::MultipleAssertionsPerStatement: return "MultipleAssertionsPerStatement";
    case ErrorCode::AnchorNotFound: return "AnchorNotFound";
    case ErrorCode::AnchorAmbiguous: return "AnchorAmbiguous";
    case ErrorCode::InjectionUnsupported: return "InjectionUnsupported";
    case ErrorCode::ToolNotFound: return "ToolNotFound";
    case ErrorCode::ToolCrashed: return "ToolCrashed";
    case ErrorCode::NoStatesFound: return "NoStatesFound";
    case ErrorCode::InputUnmappable: return "InputUnmappable";
    case ErrorCode::BuildFailed: return "BuildFailed";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::UniverseMismatch: return "UniverseMismatch";
    case ErrorCode::RequirementMismatch: return "RequirementMismatch";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::MissingExternalTool: return "MissingExternalTool";
    case ErrorCode::ContractViolation: return "ContractViolation";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace specverify
