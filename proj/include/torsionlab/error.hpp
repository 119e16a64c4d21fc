#pragma once

#include <stdexcept>
#include <string>

namespace torsionlab {

enum class ErrorCode {
  // chainkit
  MalformedComplex,
  NotAcyclic,
  IndexOutOfRange,
  DegreeMismatch,
  NotChainMap,
  // basegrid
  UnsupportedKind,
  ResolutionTooSmall,
  DegreeOverflow,
  // famtor
  AcyclicityLost,
  QuadratureNonConvergent,
  InconsistentStrata,
  InvalidRoot,
  // charclass
  DomainError,
  ProjectorDrift,
  UncancelledBoundary,
  // tubefun
  NoLimit,
  SingularZeroLevel,
  AtlasMismatch,
  EigenvalueGapLost,
  FrameTransportUnstable,
  // genfront
  ProbeFailure,
  NewtonDivergence,
  TransversalityLost,
  NonpositiveSeparation,
  // cli
  InvalidConfig,
  IoFailure,
};

enum class ErrorClass { Validation, Numerical, Io };

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::MalformedComplex: return "MalformedComplex";
    case ErrorCode::NotAcyclic: return "NotAcyclic";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::NotChainMap: return "NotChainMap";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::ResolutionTooSmall: return "ResolutionTooSmall";
    case ErrorCode::DegreeOverflow: return "DegreeOverflow";
    case ErrorCode::AcyclicityLost: return "AcyclicityLost";
    case ErrorCode::QuadratureNonConvergent: return "QuadratureNonConvergent";
    case ErrorCode::InconsistentStrata: return "InconsistentStrata";
    case ErrorCode::InvalidRoot: return "InvalidRoot";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ProjectorDrift: return "ProjectorDrift";
    case ErrorCode::UncancelledBoundary: return "UncancelledBoundary";
    case ErrorCode::NoLimit: return "NoLimit";
    case ErrorCode::SingularZeroLevel: return "SingularZeroLevel";
    case ErrorCode::AtlasMismatch: return "AtlasMismatch";
    case ErrorCode::EigenvalueGapLost: return "EigenvalueGapLost";
    case ErrorCode::FrameTransportUnstable: return "FrameTransportUnstable";
    case ErrorCode::ProbeFailure: return "ProbeFailure";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::TransversalityLost: return "TransversalityLost";
    case ErrorCode::NonpositiveSeparation: return "NonpositiveSeparation";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

inline const char* error_module(ErrorCode c) {
  switch (c) {
    case ErrorCode::MalformedComplex:
    case ErrorCode::NotAcyclic:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::DegreeMismatch:
    case ErrorCode::NotChainMap: return "chainkit";
    case ErrorCode::UnsupportedKind:
    case ErrorCode::ResolutionTooSmall:
    case ErrorCode::DegreeOverflow: return "basegrid";
    case ErrorCode::AcyclicityLost:
    case ErrorCode::QuadratureNonConvergent:
    case ErrorCode::InconsistentStrata:
    case ErrorCode::InvalidRoot: return "famtor";
    case ErrorCode::DomainError:
    case ErrorCode::ProjectorDrift:
    case ErrorCode::UncancelledBoundary: return "charclass";
    case ErrorCode::NoLimit:
    case ErrorCode::SingularZeroLevel:
    case ErrorCode::AtlasMismatch:
    case ErrorCode::EigenvalueGapLost:
    case ErrorCode::FrameTransportUnstable: return "tubefun";
    case ErrorCode::ProbeFailure:
    case ErrorCode::NewtonDivergence:
    case ErrorCode::TransversalityLost:
    case ErrorCode::NonpositiveSeparation: return "genfront";
    case ErrorCode::InvalidConfig:
    case ErrorCode::IoFailure: return "torsion-cli";
  }
  return "unknown";
}

inline ErrorClass error_class(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotAcyclic:
    case ErrorCode::AcyclicityLost:
    case ErrorCode::QuadratureNonConvergent:
    case ErrorCode::ProjectorDrift:
    case ErrorCode::NoLimit:
    case ErrorCode::SingularZeroLevel:
    case ErrorCode::EigenvalueGapLost:
    case ErrorCode::FrameTransportUnstable:
    case ErrorCode::ProbeFailure:
    case ErrorCode::NewtonDivergence:
    case ErrorCode::TransversalityLost:
    case ErrorCode::InconsistentStrata:
    case ErrorCode::UncancelledBoundary: return ErrorClass::Numerical;
    case ErrorCode::IoFailure: return ErrorClass::Io;
    default: return ErrorClass::Validation;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

} // namespace torsionlab
