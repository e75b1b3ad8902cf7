#pragma once

#include <stdexcept>
#include <string>

namespace specnce {

enum class ErrorCode {
  NegativeEntry,
  ZeroRow,
  AsymmetricInput,
  InvalidProbability,
  InvalidBandwidth,
  DimensionMismatch,
  OddDimensionForConcat,
  InvalidKernelParameter,
  NonBinaryEntry,
  TooLarge,
  AllZeroRow,
  ZeroWeightEdge,
  BatchTooSmall,
  NotNormalized,
  PositiveMissing,
  NotSymmetric,
  NoConvergence,
  RankDeficient,
  LengthMismatch,
  Diverged,
  IsolatedNode,
  InvalidScaling,
  InvalidOption,
  ConfigError,
  IoError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::ZeroRow: return "ZeroRow";
    case ErrorCode::AsymmetricInput: return "AsymmetricInput";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::InvalidBandwidth: return "InvalidBandwidth";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OddDimensionForConcat: return "OddDimensionForConcat";
    case ErrorCode::InvalidKernelParameter: return "InvalidKernelParameter";
    case ErrorCode::NonBinaryEntry: return "NonBinaryEntry";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::AllZeroRow: return "AllZeroRow";
    case ErrorCode::ZeroWeightEdge: return "ZeroWeightEdge";
    case ErrorCode::BatchTooSmall: return "BatchTooSmall";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::PositiveMissing: return "PositiveMissing";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::IsolatedNode: return "IsolatedNode";
    case ErrorCode::InvalidScaling: return "InvalidScaling";
    case ErrorCode::InvalidOption: return "InvalidOption";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

/// Library-wide exception type. Every throwing operation documents which
/// codes it can raise; tests match on code(), not on message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace specnce
