#pragma once

#include <stdexcept>
#include <string>

namespace qmh {

// Every throwing precondition in the public API carries one of these codes so
// callers (and tests) can branch on the reason rather than on message text.
enum class Errc {
  NotPositiveDet,
  GuardExceeded,
  DivisionByZeroSeries,
  OddWeight,
  UnknownTransformation,
  NotDecomposable,
  InsufficientPrecision,
  LevelMismatch,
  WeightMismatch,
  TwistMismatch,
  DepthNotZero,
  CovarianceViolation,
  NonCommutingTwists,
  NotUnimodular,
  MissingInterpretation,
  UnknownGenerator,
  ParseError,
  InvalidArgument,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NotPositiveDet: return "NotPositiveDet";
    case Errc::GuardExceeded: return "GuardExceeded";
    case Errc::DivisionByZeroSeries: return "DivisionByZeroSeries";
    case Errc::OddWeight: return "OddWeight";
    case Errc::UnknownTransformation: return "UnknownTransformation";
    case Errc::NotDecomposable: return "NotDecomposable";
    case Errc::InsufficientPrecision: return "InsufficientPrecision";
    case Errc::LevelMismatch: return "LevelMismatch";
    case Errc::WeightMismatch: return "WeightMismatch";
    case Errc::TwistMismatch: return "TwistMismatch";
    case Errc::DepthNotZero: return "DepthNotZero";
    case Errc::CovarianceViolation: return "CovarianceViolation";
    case Errc::NonCommutingTwists: return "NonCommutingTwists";
    case Errc::NotUnimodular: return "NotUnimodular";
    case Errc::MissingInterpretation: return "MissingInterpretation";
    case Errc::UnknownGenerator: return "UnknownGenerator";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace qmh
