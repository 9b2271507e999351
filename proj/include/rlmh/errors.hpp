#pragma once

#include <stdexcept>
#include <string>

namespace rlmh {

enum class ErrorCode {
  // numkit / linear algebra
  NotSpd,
  NotSymmetric,
  DimensionMismatch,
  NonFinite,
  // targets
  MalformedData,
  EmptyData,
  UnknownFamily,
  InvalidParameter,
  // kernels
  InvalidStepSize,
  // rewards
  OutOfRange,
  IncompleteTransition,
  UnknownKind,
  // neuralnet
  InvalidLayout,
  ShapeMismatch,
  // rlmh trainer
  BufferTooSmall,
  DegenerateCovariance,
  NonConvergence,
  // classic_adapt
  InsufficientData,
  InvalidFactor,
  InvalidBounds,
  // evaluation
  TooFewSamples,
  DegenerateLengthscale,
  WindowTooLarge,
  UnsupportedDimension,
  // config / harness
  ParseError,
  UnknownKey,
  InvalidValue,
  MissingFile,
  WriteError,
  CatastrophicFailure,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

}  // namespace rlmh
