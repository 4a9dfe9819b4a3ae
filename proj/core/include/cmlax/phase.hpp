#pragma once

#include <complex>

#include <Eigen/Dense>

#include "cmlax/errors.hpp"

namespace cmlax {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

// Two particles are considered colliding below this separation; closer
// positions blow the Lax entries past 1e10 and ruin conditioning downstream.
inline constexpr double kPositionEpsilon = 1e-10;

// Tolerance for accepting a matrix pair as a Calogero-Moser pair.
inline constexpr double kLaxTolerance = 1e-8;

/// Off-diagonal coupling of the Lax matrix. Only the two tagged values are
/// admitted: Real means c = 1 (coupling constant g = -c^2 = -1, attractive),
/// Imaginary means c = i (g = +1, repulsive, Hermitian Lax matrix).
enum class Coupling { Real, Imaginary };

Complex coupling_value(Coupling c);  // 1 or i
double coupling_g(Coupling c);       // g = -c^2

/// Positions and momenta of n unit-mass particles on a line.
struct PhaseState {
  int n = 0;
  Vec x;  // positions
  Vec p;  // momenta
  Coupling coupling = Coupling::Imaginary;
};

/// Throws PositionCollision if any |x_i - x_j| <= eps_pos, InvalidInput on
/// malformed sizes.
void validate_state(const PhaseState& s, double eps_pos = kPositionEpsilon);

/// The matrices (L, X): L_ii = p_i, L_ij = c/(x_i - x_j) for i != j,
/// X = diag(x). X is stored as its diagonal.
struct LaxPair {
  CMat L;
  Vec x;
  Coupling coupling = Coupling::Imaginary;

  int n() const { return static_cast<int>(x.size()); }
  Mat X() const { return x.asDiagonal(); }
};

LaxPair build_lax(const PhaseState& s, double eps_pos = kPositionEpsilon);

/// H = 1/2 sum p_j^2 + g sum_{i<j} (x_i - x_j)^{-2}; coincides with
/// 1/2 tr L^2 for g = -c^2.
double hamiltonian(const PhaseState& s);

/// Max-entry norm of [lambda I - L, X] - c (e e^T - I). The commutator is
/// lambda-independent, and the expression vanishes identically on CM pairs.
double commutation_residual(const LaxPair& pair);

/// Inverse of build_lax: x = diag(X), p = Re diag(L); the coupling is read
/// off the sign of (L_12 (x_1 - x_2))^2 (defaults to Imaginary for n = 1,
/// which carries no coupling information). Throws NotCmPair when any
/// off-diagonal entry deviates from c/(x_i - x_j) by more than tau.
PhaseState recover_state(const LaxPair& pair, double tau = kLaxTolerance);

}  // namespace cmlax
