#include <doctest.h>

#include "cmlax/sampling.hpp"
#include "cmlax/spectral.hpp"
#include "test_helpers.hpp"

using namespace cmlax;
using cmlax::testing::make_state;
using cmlax::testing::test_state;

TEST_SUITE_BEGIN("phase");

TEST_CASE("coupling values and constants") {
  CHECK(coupling_value(Coupling::Real) == Complex(1.0, 0.0));
  CHECK(coupling_value(Coupling::Imaginary) == Complex(0.0, 1.0));
  CHECK(coupling_g(Coupling::Real) == -1.0);
  CHECK(coupling_g(Coupling::Imaginary) == 1.0);
}

TEST_CASE("build_lax n=1 is trivial") {
  const LaxPair pair = build_lax(make_state({5.0}, {3.0}));
  CHECK(pair.L(0, 0) == Complex(3.0, 0.0));
  CHECK(pair.x[0] == 5.0);
}

TEST_CASE("build_lax reference 2-particle configuration") {
  const LaxPair pair = build_lax(test_state());
  CHECK(pair.L(0, 0) == Complex(0.0, 0.0));
  CHECK(pair.L(1, 1) == Complex(0.0, 0.0));
  CHECK(pair.L(0, 1) == Complex(0.0, 0.5));
  CHECK(pair.L(1, 0) == Complex(0.0, -0.5));
  CHECK(pair.x[0] == 1.0);
  CHECK(pair.x[1] == -1.0);
}

TEST_CASE("near-coincident positions are rejected") {
  const PhaseState s = make_state({1.0, 1.0 - 1e-12}, {0.0, 0.0});
  CHECK_THROWS_WITH_AS(build_lax(s), doctest::Contains("POSITION_COLLISION"),
                       CmError);
}

TEST_CASE("hamiltonian values") {
  CHECK(hamiltonian(make_state({7.0}, {3.0})) == doctest::Approx(4.5));
  CHECK(hamiltonian(test_state(Coupling::Imaginary)) == doctest::Approx(0.25));
  CHECK(hamiltonian(test_state(Coupling::Real)) == doctest::Approx(-0.25));
}

TEST_CASE("hamiltonian equals half the trace of L^2") {
  std::mt19937_64 rng(7);
  for (int n = 1; n <= 8; ++n) {
    for (Coupling c : {Coupling::Real, Coupling::Imaginary}) {
      const PhaseState s = random_state(n, c, rng);
      const double h = hamiltonian(s);
      const CMat L = build_lax(s).L;
      const double half_tr = 0.5 * (L * L).trace().real();
      CHECK(std::abs(h - half_tr) <= 1e-12 * std::max(1.0, std::abs(h)));
    }
  }
}

TEST_CASE("commutation identity") {
  SUBCASE("n=1 is identically zero") {
    CHECK(commutation_residual(build_lax(make_state({2.0}, {1.0}))) == 0.0);
  }
  SUBCASE("reference state") {
    CHECK(commutation_residual(build_lax(test_state())) <= 1e-15);
  }
  SUBCASE("random states, both couplings") {
    std::mt19937_64 rng(11);
    for (int n = 2; n <= 8; ++n) {
      for (Coupling c : {Coupling::Real, Coupling::Imaginary}) {
        CHECK(commutation_residual(build_lax(random_state(n, c, rng))) <= 1e-12);
      }
    }
  }
}

TEST_CASE("Hermitian coupling gives a Hermitian Lax matrix") {
  std::mt19937_64 rng(13);
  for (int n = 2; n <= 6; ++n) {
    const CMat L = build_lax(random_state(n, Coupling::Imaginary, rng)).L;
    const double dev = (L - L.adjoint()).cwiseAbs().maxCoeff();
    CHECK(dev <= 1e-15 * L.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("recover_state inverts build_lax") {
  std::mt19937_64 rng(17);
  for (int n = 2; n <= 6; ++n) {
    for (Coupling c : {Coupling::Real, Coupling::Imaginary}) {
      const PhaseState s = random_state(n, c, rng);
      const PhaseState back = recover_state(build_lax(s));
      CHECK(back.coupling == s.coupling);
      CHECK((back.x - s.x).cwiseAbs().maxCoeff() <= 1e-14);
      CHECK((back.p - s.p).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }
}

TEST_CASE("recover_state rejects perturbed pairs") {
  LaxPair pair = build_lax(test_state());
  pair.L(0, 1) += Complex(1e-3, 0.0);
  CHECK_THROWS_WITH_AS(recover_state(pair), doctest::Contains("NOT_CM_PAIR"),
                       CmError);
}

TEST_CASE("recover_state n=1 defaults to the imaginary coupling") {
  LaxPair pair;
  pair.L = CMat::Constant(1, 1, Complex(2.5, 0.0));
  pair.x = Vec::Constant(1, -1.0);
  pair.coupling = Coupling::Real;  // ignored; nothing to read it from
  const PhaseState s = recover_state(pair);
  CHECK(s.x[0] == -1.0);
  CHECK(s.p[0] == 2.5);
  CHECK(s.coupling == Coupling::Imaginary);
}

TEST_SUITE_END();
