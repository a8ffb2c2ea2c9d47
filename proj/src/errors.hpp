#pragma once

#include <stdexcept>
#include <string>

namespace rtplan {

enum class ErrorKind {
  NegativeMass,
  NotNormalized,
  StateMismatch,
  InfeasibleSet,
  SamplingExhausted,
  GridTooSmall,
  DimensionMismatch,
  EmptyStructure,
  LambdaOutOfRange,
  UnknownBenchmark,
  ObjectiveNonFinite,
  ParseError,
  SchemaError,
  FileFormat,
  IoError,
  InvalidArgument,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NegativeMass: return "NegativeMass";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::StateMismatch: return "StateMismatch";
    case ErrorKind::InfeasibleSet: return "InfeasibleSet";
    case ErrorKind::SamplingExhausted: return "SamplingExhausted";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyStructure: return "EmptyStructure";
    case ErrorKind::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorKind::UnknownBenchmark: return "UnknownBenchmark";
    case ErrorKind::ObjectiveNonFinite: return "ObjectiveNonFinite";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::FileFormat: return "FileFormat";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace rtplan
