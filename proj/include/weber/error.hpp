#pragma once

#include <stdexcept>
#include <string>

namespace weber {

enum class ErrorCode {
  DegenerateCollinear,
  DegenerateQuad,
  NoWeightTriangle,
  InfeasibleTopology,
  ProbeAtTerminal,
  AssumptionViolated,
  NoSignChange,
  PerturbationInfeasible,
  InfeasibleBase,
  ReductionInfeasible,
  InvalidTopology,
  MalformedInput,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateCollinear: return "DegenerateCollinear";
    case ErrorCode::DegenerateQuad: return "DegenerateQuad";
    case ErrorCode::NoWeightTriangle: return "NoWeightTriangle";
    case ErrorCode::InfeasibleTopology: return "InfeasibleTopology";
    case ErrorCode::ProbeAtTerminal: return "ProbeAtTerminal";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::PerturbationInfeasible: return "PerturbationInfeasible";
    case ErrorCode::InfeasibleBase: return "InfeasibleBase";
    case ErrorCode::ReductionInfeasible: return "ReductionInfeasible";
    case ErrorCode::InvalidTopology: return "InvalidTopology";
    case ErrorCode::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable code. Infeasibility of a network
/// topology is usually a result state, not an Error; see the solver docs.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace weber
