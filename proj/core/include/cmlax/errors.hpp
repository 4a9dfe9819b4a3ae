#pragma once

#include <stdexcept>
#include <string>

namespace cmlax {

enum class ErrorCode {
  PositionCollision,      // two particles closer than eps_pos
  NotCmPair,              // off-diagonal Lax entries inconsistent with c/(x_i-x_j)
  DegenerateSpectrum,     // eigenvalue gap below threshold, coordinates singular
  NormalizationFailure,   // eigenvector has (numerically) zero component sum
  EvalFailure,            // observable evaluation failed inside a stencil
  SingularChart,          // invariant Jacobian ill-conditioned
  IndexOutOfRange,
  CouplingUnsupported,    // flow requested for the non-Hermitian coupling
  CollisionDetected,      // integrator ran into a near-collision
  StepUnderflow,
  BranchAmbiguity,        // eigenvalue tracks too close to match reliably
  NoConvergence,
  InvalidInput,
};

const char* error_code_name(ErrorCode code);

class CmError : public std::runtime_error {
 public:
  CmError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cmlax
