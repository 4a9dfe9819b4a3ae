#pragma once

#include <complex>
#include <random>

#include "cmlax/phase.hpp"

namespace cmlax::testing {

// The 2-particle reference configuration used throughout: x = (1, -1),
// p = (0, 0). With c = i the Lax matrix is [[0, i/2], [-i/2, 0]].
inline PhaseState test_state(Coupling coupling = Coupling::Imaginary) {
  PhaseState s;
  s.n = 2;
  s.x = Vec(2);
  s.x << 1.0, -1.0;
  s.p = Vec::Zero(2);
  s.coupling = coupling;
  return s;
}

inline PhaseState make_state(std::initializer_list<double> xs,
                             std::initializer_list<double> ps,
                             Coupling coupling = Coupling::Imaginary) {
  PhaseState s;
  s.n = static_cast<int>(xs.size());
  s.x = Vec(s.n);
  s.p = Vec(s.n);
  int i = 0;
  for (double v : xs) s.x[i++] = v;
  i = 0;
  for (double v : ps) s.p[i++] = v;
  s.coupling = coupling;
  return s;
}

inline double cdist(const Complex& a, const Complex& b) { return std::abs(a - b); }

}  // namespace cmlax::testing
