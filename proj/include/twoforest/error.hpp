#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twoforest {

enum class ErrorKind {
  // input errors
  EmptyGraph,
  DisconnectedGraph,
  NonpositiveConductance,
  SelfLoop,
  InvalidBoundary,
  InvalidVertex,
  UnknownEdge,
  TooLarge,
  UnknownStatistic,
  UnsupportedFamily,
  DivergentIntegral,
  PointOnBoundary,
  NonPlanarMap,
  ParseError,
  // numerical / internal failures
  SingularMatrix,
  ResidualTooLarge,
  BijectionViolation,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyGraph: return "EmptyGraph";
    case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorKind::NonpositiveConductance: return "NonpositiveConductance";
    case ErrorKind::SelfLoop: return "SelfLoop";
    case ErrorKind::InvalidBoundary: return "InvalidBoundary";
    case ErrorKind::InvalidVertex: return "InvalidVertex";
    case ErrorKind::UnknownEdge: return "UnknownEdge";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::UnknownStatistic: return "UnknownStatistic";
    case ErrorKind::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorKind::DivergentIntegral: return "DivergentIntegral";
    case ErrorKind::PointOnBoundary: return "PointOnBoundary";
    case ErrorKind::NonPlanarMap: return "NonPlanarMap";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorKind::BijectionViolation: return "BijectionViolation";
  }
  return "Unknown";
}

/// True for failures of the numerics rather than of the input.
constexpr bool is_numerical(ErrorKind kind) {
  return kind == ErrorKind::SingularMatrix || kind == ErrorKind::ResidualTooLarge ||
         kind == ErrorKind::BijectionViolation;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace twoforest
