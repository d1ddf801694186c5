#pragma once

#include <stdexcept>
#include <string>

namespace symplinv {

enum class ErrorCode {
  NotPrime,
  CharacteristicTwo,
  DivisionByZero,
  FieldMismatch,
  Exhausted,
  Singular,
  ShapeMismatch,
  ZeroConstantTerm,
  NotSimilar,
  NotCyclic,
  NotTotallySingular,
  NotLagrangian,
  NotTransverse,
  DecompositionFailed,
  CoprimalityViolated,
  NotStable,
  OddCellPresent,
  NotAnnihilated,
  ZeroTarget,
  NotSimilarToInverse,
  CellParityViolated,
  EigenvaluePMOne,
  Degenerate,
  DegenerateForm,
  NotInvolution,
  NotAlternating,
  SearchExhausted,
  PreconditionViolated,
  BadLambda,
  UnsupportedField,
  ParameterSearchFailed,
  NotReflectional,
  BudgetExceeded,
  NotInGroup,
  ParseError,
  InternalCheckFailed,
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::CharacteristicTwo: return "CharacteristicTwo";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
    case ErrorCode::Exhausted: return "Exhausted";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ZeroConstantTerm: return "ZeroConstantTerm";
    case ErrorCode::NotSimilar: return "NotSimilar";
    case ErrorCode::NotCyclic: return "NotCyclic";
    case ErrorCode::NotTotallySingular: return "NotTotallySingular";
    case ErrorCode::NotLagrangian: return "NotLagrangian";
    case ErrorCode::NotTransverse: return "NotTransverse";
    case ErrorCode::DecompositionFailed: return "DecompositionFailed";
    case ErrorCode::CoprimalityViolated: return "CoprimalityViolated";
    case ErrorCode::NotStable: return "NotStable";
    case ErrorCode::OddCellPresent: return "OddCellPresent";
    case ErrorCode::NotAnnihilated: return "NotAnnihilated";
    case ErrorCode::ZeroTarget: return "ZeroTarget";
    case ErrorCode::NotSimilarToInverse: return "NotSimilarToInverse";
    case ErrorCode::CellParityViolated: return "CellParityViolated";
    case ErrorCode::EigenvaluePMOne: return "EigenvaluePMOne";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::DegenerateForm: return "DegenerateForm";
    case ErrorCode::NotInvolution: return "NotInvolution";
    case ErrorCode::NotAlternating: return "NotAlternating";
    case ErrorCode::SearchExhausted: return "SearchExhausted";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::BadLambda: return "BadLambda";
    case ErrorCode::UnsupportedField: return "UnsupportedField";
    case ErrorCode::ParameterSearchFailed: return "ParameterSearchFailed";
    case ErrorCode::NotReflectional: return "NotReflectional";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NotInGroup: return "NotInGroup";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InternalCheckFailed: return "InternalCheckFailed";
  }
  return "Unknown";
}

// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace symplinv
