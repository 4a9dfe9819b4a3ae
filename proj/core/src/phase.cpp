#include "cmlax/phase.hpp"

#include <cmath>
#include <sstream>

namespace cmlax {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::PositionCollision: return "POSITION_COLLISION";
    case ErrorCode::NotCmPair: return "NOT_CM_PAIR";
    case ErrorCode::DegenerateSpectrum: return "DEGENERATE_SPECTRUM";
    case ErrorCode::NormalizationFailure: return "NORMALIZATION_FAILURE";
    case ErrorCode::EvalFailure: return "EVAL_FAILURE";
    case ErrorCode::SingularChart: return "SINGULAR_CHART";
    case ErrorCode::IndexOutOfRange: return "INDEX_OUT_OF_RANGE";
    case ErrorCode::CouplingUnsupported: return "COUPLING_UNSUPPORTED";
    case ErrorCode::CollisionDetected: return "COLLISION_DETECTED";
    case ErrorCode::StepUnderflow: return "STEP_UNDERFLOW";
    case ErrorCode::BranchAmbiguity: return "BRANCH_AMBIGUITY";
    case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::InvalidInput: return "INVALID_INPUT";
  }
  return "UNKNOWN";
}

Complex coupling_value(Coupling c) {
  return c == Coupling::Real ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
}

double coupling_g(Coupling c) {
  // g = -c^2
  return c == Coupling::Real ? -1.0 : 1.0;
}

void validate_state(const PhaseState& s, double eps_pos) {
  if (s.n < 1 || s.x.size() != s.n || s.p.size() != s.n) {
    throw CmError(ErrorCode::InvalidInput, "state must have n >= 1 with matching x, p sizes");
  }
  if (!s.x.allFinite() || !s.p.allFinite()) {
    throw CmError(ErrorCode::InvalidInput, "state contains non-finite entries");
  }
  for (int i = 0; i < s.n; ++i) {
    for (int j = i + 1; j < s.n; ++j) {
      if (std::abs(s.x[i] - s.x[j]) <= eps_pos) {
        std::ostringstream msg;
        msg << "particles " << i << " and " << j << " closer than " << eps_pos;
        throw CmError(ErrorCode::PositionCollision, msg.str());
      }
    }
  }
}

LaxPair build_lax(const PhaseState& s, double eps_pos) {
  validate_state(s, eps_pos);
  const Complex c = coupling_value(s.coupling);
  LaxPair pair;
  pair.x = s.x;
  pair.coupling = s.coupling;
  pair.L = CMat::Zero(s.n, s.n);
  for (int i = 0; i < s.n; ++i) {
    pair.L(i, i) = Complex(s.p[i], 0.0);
    for (int j = 0; j < s.n; ++j) {
      if (i != j) pair.L(i, j) = c / (s.x[i] - s.x[j]);
    }
  }
  return pair;
}

double hamiltonian(const PhaseState& s) {
  validate_state(s);
  const double g = coupling_g(s.coupling);
  double h = 0.5 * s.p.squaredNorm();
  for (int i = 0; i < s.n; ++i) {
    for (int j = i + 1; j < s.n; ++j) {
      const double d = s.x[i] - s.x[j];
      h += g / (d * d);
    }
  }
  return h;
}

double commutation_residual(const LaxPair& pair) {
  const int n = pair.n();
  const Complex c = coupling_value(pair.coupling);
  // [lambda I - L, X] = [-L, X]; entrywise (x_j - x_i)(-L_ij).
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Complex commutator = -pair.L(i, j) * (pair.x[j] - pair.x[i]);
      const Complex target = (i == j) ? Complex(0.0, 0.0) : c;
      worst = std::max(worst, std::abs(commutator - target));
    }
  }
  return worst;
}

PhaseState recover_state(const LaxPair& pair, double tau) {
  const int n = pair.n();
  if (n < 1 || pair.L.rows() != n || pair.L.cols() != n) {
    throw CmError(ErrorCode::InvalidInput, "Lax pair has inconsistent dimensions");
  }
  PhaseState s;
  s.n = n;
  s.x = pair.x;
  s.p = pair.L.diagonal().real();

  if (n == 1) {
    s.coupling = Coupling::Imaginary;  // no off-diagonal entries to read c from
    return s;
  }

  // c^2 = (L_12 (x_1 - x_2))^2 is +1 or -1 for a genuine CM pair.
  const Complex c_sq_probe = std::pow(pair.L(0, 1) * (pair.x[0] - pair.x[1]), 2);
  s.coupling = c_sq_probe.real() > 0.0 ? Coupling::Real : Coupling::Imaginary;
  const Complex c = coupling_value(s.coupling);

  for (int i = 0; i < n; ++i) {
    if (std::abs(pair.L(i, i).imag()) > tau) {
      throw CmError(ErrorCode::NotCmPair, "diagonal of L is not real");
    }
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Complex expected = c / (pair.x[i] - pair.x[j]);
      if (std::abs(pair.L(i, j) - expected) > tau) {
        std::ostringstream msg;
        msg << "off-diagonal entry (" << i << "," << j
            << ") deviates from c/(x_i-x_j) by " << std::abs(pair.L(i, j) - expected);
        throw CmError(ErrorCode::NotCmPair, msg.str());
      }
    }
  }
  return s;
}

}  // namespace cmlax
