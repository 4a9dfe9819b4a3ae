#pragma once

#include <random>

#include "cmlax/lift.hpp"
#include "cmlax/phase.hpp"

namespace cmlax {

/// Seeded random state: x sorted uniform on [-n, n] with adjacent gaps
/// >= min_gap (rejection sampling), p uniform on [-1, 1]. Deterministic for
/// a fixed generator state.
PhaseState random_state(int n, Coupling coupling, std::mt19937_64& rng,
                        double min_gap = 0.2);

/// Like random_state, but resamples until the Lax spectrum is comfortably
/// simple (min eigenvalue gap >= spectral_gap); use for finite-difference
/// bracket suites whose stencils must stay below the gap.
PhaseState random_regular_state(int n, Coupling coupling, std::mt19937_64& rng,
                                double spectral_gap = 0.05);

/// Random lifted point with entries uniform in the complex unit square.
lift::LiftedPoint random_lifted_point(int n, std::mt19937_64& rng);

}  // namespace cmlax
