#pragma once

#include <vector>

#include "cmlax/report.hpp"
#include "cmlax/spectral.hpp"

namespace cmlax {

// Integration aborts when two particles get closer than this.
inline constexpr double kDynamicsCollisionEps = 1e-6;

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  std::vector<SpectralCoords> coord_tracks;  // filled by track_coordinates
  std::vector<double> energy;
};

/// Projection-method flow: x(t) are the sorted eigenvalues of X(0) + t L(0),
/// p(t) the Rayleigh quotients Psi_i^* L(0) Psi_i of the same eigenvectors.
/// Only the Imaginary (Hermitian, repulsive) coupling is supported; positions
/// come back in ascending order, which the repulsive flow preserves.
PhaseState exact_flow(const PhaseState& s, double t);

/// Adaptive Dormand-Prince 5(4) integration of Hamilton's equations
/// x_i' = p_i, p_i' = 2 g sum_{j != i} (x_i - x_j)^{-3}. Records every
/// accepted step plus the requested output times. Throws CollisionDetected
/// when particles approach within kDynamicsCollisionEps.
Trajectory integrate(const PhaseState& s, double t_end, double tol,
                     const std::vector<double>& output_times = {});

/// Fills coord_tracks, permuting each sample's eigenvalue branches to the
/// nearest previous ones (greedy). Throws BranchAmbiguity when two candidate
/// matches are closer than twice the per-step drift.
Trajectory track_coordinates(Trajectory traj);

struct ScatteringData {
  Vec p_plus, p_minus;  // asymptotic momenta per sorted branch
  Vec x_plus, x_minus;  // asymptotic intercepts
  double fit_residual = 0.0;
};

/// Least-squares fit of x_k(t) = p_k t + x_k over t in [t_max/2, t_max] and
/// [-t_max, -t_max/2], sampled along the exact flow.
ScatteringData scattering(const PhaseState& s, double t_max);

/// Along the exact flow, tests which of mu_tilde_k(t) -+ lambda_k t converges
/// and matches its limit against the signed intercepts +-x_j^(+-); reports
/// the realized pattern and checks the O(1/t) approach of the fitted
/// asymptotes. Throws NoConvergence if neither combination stabilizes.
BracketReport asymptotic_momenta_check(const PhaseState& s, double t_max,
                                       double tol = 1e-2);

}  // namespace cmlax
