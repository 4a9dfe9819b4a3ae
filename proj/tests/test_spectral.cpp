#include <doctest.h>

#include "cmlax/sampling.hpp"
#include "cmlax/spectral.hpp"
#include "test_helpers.hpp"

using namespace cmlax;
using cmlax::testing::cdist;
using cmlax::testing::make_state;
using cmlax::testing::test_state;

namespace {

// Independent adjugate oracle: transpose of the cofactor matrix, each
// cofactor a determinant of the minor (Eigen LU). Exponential only in the
// sense of O(n^5); fine for the small n it is used at.
CMat cofactor_adjugate(const CMat& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 1) return CMat::Constant(1, 1, Complex(1.0, 0.0));
  CMat adj(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      CMat minor(n - 1, n - 1);
      for (int r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0, cc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(rr, cc++) = m(r, c);
        }
        ++rr;
      }
      const Complex cof = Eigen::PartialPivLU<CMat>(minor).determinant();
      adj(j, i) = (((i + j) % 2) ? -1.0 : 1.0) * cof;
    }
  }
  return adj;
}

}  // namespace

TEST_SUITE_BEGIN("spectral");

TEST_CASE("faddeev_leverrier n=1") {
  const CharData cd = faddeev_leverrier(build_lax(make_state({5.0}, {3.0})).L);
  CHECK(cd.delta.size() == 2);
  CHECK(cd.delta[1] == Complex(1.0, 0.0));
  CHECK(cd.delta[0] == Complex(-3.0, 0.0));  // Delta = lambda - p
  CHECK(cd.adj[0](0, 0) == Complex(1.0, 0.0));
}

TEST_CASE("faddeev_leverrier reference configuration") {
  const CMat L = build_lax(test_state()).L;
  const CharData cd = faddeev_leverrier(L);
  // Delta = lambda^2 - 1/4, M_1 = I, M_0 = L.
  CHECK(cdist(cd.delta[2], 1.0) == 0.0);
  CHECK(cdist(cd.delta[1], 0.0) <= 1e-16);
  CHECK(cdist(cd.delta[0], -0.25) <= 1e-16);
  CHECK((cd.adj[1] - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((cd.adj[0] - L).cwiseAbs().maxCoeff() <= 1e-16);
}

TEST_CASE("adjugate polynomial identity at probe points") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CMat L(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) L(i, j) = Complex(u(rng), u(rng));
  }
  const CharData cd = faddeev_leverrier(L);
  const std::vector<Complex> probes = {{0, 0}, {1, 0}, {-1, 0}, {2, 0}, {-2, 0}, {3, 0}};
  CHECK(char_identity_residual(L, cd, probes) < 1e-9);
}

TEST_CASE("faddeev adjugate agrees with the cofactor oracle") {
  std::mt19937_64 rng(23);
  for (int n = 1; n <= 5; ++n) {
    for (Coupling c : {Coupling::Real, Coupling::Imaginary}) {
      const CMat L = build_lax(random_state(n, c, rng)).L;
      const CharData cd = faddeev_leverrier(L);
      for (const Complex lambda : default_probes(n)) {
        const CMat direct =
            cofactor_adjugate(lambda * CMat::Identity(n, n) - L);
        const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
        CHECK((adjugate_at(cd, lambda) - direct).cwiseAbs().maxCoeff() / scale <
              1e-10);
      }
    }
  }
}

TEST_CASE("Cayley-Hamilton closure of the recursion") {
  std::mt19937_64 rng(27);
  const CMat L = build_lax(random_state(5, Coupling::Imaginary, rng)).L;
  const CharData cd = faddeev_leverrier(L);
  const CMat closure = L * cd.adj[0] + cd.delta[0] * CMat::Identity(5, 5);
  CHECK(closure.cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, L.norm()));
}

TEST_CASE("eigen decomposition of the reference state") {
  const Spectrum sp = eigen_decompose(build_lax(test_state()).L, Coupling::Imaginary);
  CHECK(cdist(sp.lambdas[0], -0.5) < 1e-14);
  CHECK(cdist(sp.lambdas[1], 0.5) < 1e-14);
  CHECK(sp.min_gap == doctest::Approx(1.0));
  CHECK_FALSE(sp.degenerate);
}

TEST_CASE("eigen decomposition, real coupling has complex spectrum") {
  const Spectrum sp = eigen_decompose(build_lax(test_state(Coupling::Real)).L,
                                      Coupling::Real);
  CHECK(cdist(sp.lambdas[0], Complex(0.0, -0.5)) < 1e-14);
  CHECK(cdist(sp.lambdas[1], Complex(0.0, 0.5)) < 1e-14);
  CHECK(sp.min_gap == doctest::Approx(1.0));
  CHECK_FALSE(sp.degenerate);
}

TEST_CASE("eigen pairs satisfy the residual bound, left inverts right") {
  std::mt19937_64 rng(31);
  for (int n = 2; n <= 8; ++n) {
    for (Coupling c : {Coupling::Real, Coupling::Imaginary}) {
      const CMat L = build_lax(random_state(n, c, rng)).L;
      const Spectrum sp = eigen_decompose(L, c);
      for (int i = 0; i < n; ++i) {
        const CVec psi = sp.right.col(i);
        CHECK((L * psi - sp.lambdas[i] * psi).norm() <=
              1e-9 * L.norm() * psi.norm());
      }
      CHECK((sp.left * sp.right - CMat::Identity(n, n)).cwiseAbs().maxCoeff() <
            1e-8);
      if (c == Coupling::Imaginary) {
        CHECK(sp.lambdas.imag().cwiseAbs().maxCoeff() <= 1e-10 * L.norm());
      }
    }
  }
}

TEST_CASE("generating function G") {
  SUBCASE("n=1 is constant x_1") {
    const CharData cd = faddeev_leverrier(build_lax(make_state({5.0}, {3.0})).L);
    CHECK(cdist(gen_G(cd, Vec::Constant(1, 5.0), Complex(2.0, 1.0)), 5.0) == 0.0);
  }
  SUBCASE("reference state gives zero") {
    const LaxPair pair = build_lax(test_state());
    const CharData cd = faddeev_leverrier(pair.L);
    for (double lam : {-1.0, 0.0, 0.7, 3.0}) {
      CHECK(cdist(gen_G(cd, pair.x, lam), 0.0) < 1e-15);
    }
  }
  SUBCASE("shifted two-particle state gives 2 lambda") {
    const LaxPair pair = build_lax(make_state({2.0, 0.0}, {1.0, 0.0}));
    const CharData cd = faddeev_leverrier(pair.L);
    for (double lam : {-1.0, 0.5, 2.0}) {
      CHECK(cdist(gen_G(cd, pair.x, lam), 2.0 * lam) < 1e-15);
    }
  }
}

TEST_CASE("generating function E") {
  SUBCASE("n=1 is constant x_1") {
    const CharData cd = faddeev_leverrier(build_lax(make_state({5.0}, {3.0})).L);
    CHECK(cdist(gen_E(cd, Vec::Constant(1, 5.0), Complex(-1.0, 2.0)), 5.0) == 0.0);
  }
  SUBCASE("reference state, imaginary coupling: E = i") {
    const LaxPair pair = build_lax(test_state());
    const CharData cd = faddeev_leverrier(pair.L);
    for (double lam : {-2.0, 0.0, 1.3}) {
      CHECK(cdist(gen_E(cd, pair.x, lam), Complex(0.0, 1.0)) < 1e-15);
    }
  }
  SUBCASE("reference state, real coupling: E = 1") {
    const LaxPair pair = build_lax(test_state(Coupling::Real));
    const CharData cd = faddeev_leverrier(pair.L);
    CHECK(cdist(gen_E(cd, pair.x, 0.4), 1.0) < 1e-15);
  }
}

TEST_CASE("delta_derivatives") {
  SUBCASE("lambda^2 - 1/4 at 1/2") {
    const CharData cd = faddeev_leverrier(build_lax(test_state()).L);
    const DeltaJet jet = delta_derivatives(cd, 0.5);
    CHECK(cdist(jet.value, 0.0) < 1e-16);
    CHECK(cdist(jet.d1, 1.0) < 1e-16);
    CHECK(cdist(jet.d2, 2.0) < 1e-16);
  }
  SUBCASE("n=1: (lambda - p, 1, 0)") {
    const CharData cd = faddeev_leverrier(build_lax(make_state({0.0}, {3.0})).L);
    const DeltaJet jet = delta_derivatives(cd, Complex(1.0, 1.0));
    CHECK(cdist(jet.value, Complex(-2.0, 1.0)) == 0.0);
    CHECK(cdist(jet.d1, 1.0) == 0.0);
    CHECK(cdist(jet.d2, 0.0) == 0.0);
  }
  SUBCASE("monic cubic lambda^3 at 2") {
    CharData cd;
    cd.n = 3;
    cd.delta = CVec::Zero(4);
    cd.delta[3] = 1.0;
    const DeltaJet jet = delta_derivatives(cd, 2.0);
    CHECK(cdist(jet.value, 8.0) == 0.0);
    CHECK(cdist(jet.d1, 12.0) == 0.0);
    CHECK(cdist(jet.d2, 12.0) == 0.0);
  }
}

TEST_CASE("spectral coordinates") {
  SUBCASE("n=1 reduces to (p, x, x)") {
    const SpectralCoords c = spectral_coords(build_lax(make_state({5.0}, {3.0})));
    CHECK(cdist(c.lambdas[0], 3.0) < 1e-15);
    CHECK(cdist(c.mu[0], 5.0) < 1e-15);
    CHECK(cdist(c.mu_tilde[0], 5.0) < 1e-15);
  }
  SUBCASE("reference state: mu = 0, mu_tilde = (-i, +i)") {
    const SpectralCoords c = spectral_coords(build_lax(test_state()));
    CHECK(cdist(c.lambdas[0], -0.5) < 1e-14);
    CHECK(cdist(c.lambdas[1], 0.5) < 1e-14);
    CHECK(cdist(c.mu[0], 0.0) < 1e-14);
    CHECK(cdist(c.mu[1], 0.0) < 1e-14);
    CHECK(cdist(c.mu_tilde[0], Complex(0.0, -1.0)) < 1e-14);
    CHECK(cdist(c.mu_tilde[1], Complex(0.0, 1.0)) < 1e-14);
  }
  SUBCASE("uniform shift moves both momenta families by the shift") {
    // Translating x by +1 leaves lambda alone and adds 1 to mu, mu_tilde.
    const SpectralCoords c = spectral_coords(build_lax(make_state({2.0, 0.0}, {0.0, 0.0})));
    CHECK(cdist(c.lambdas[0], -0.5) < 1e-14);
    CHECK(cdist(c.lambdas[1], 0.5) < 1e-14);
    CHECK(cdist(c.mu[0], 1.0) < 1e-13);
    CHECK(cdist(c.mu[1], 1.0) < 1e-13);
    CHECK(cdist(c.mu_tilde[0], Complex(1.0, -1.0)) < 1e-13);
    CHECK(cdist(c.mu_tilde[1], Complex(1.0, 1.0)) < 1e-13);
  }
}

TEST_CASE("Sklyanin denominator identity e^T adj e = Delta'") {
  std::mt19937_64 rng(37);
  for (int n = 1; n <= 8; ++n) {
    const LaxPair pair = build_lax(random_regular_state(n, Coupling::Imaginary, rng));
    const CharData cd = faddeev_leverrier(pair.L);
    const Spectrum sp = eigen_decompose(pair.L, pair.coupling);
    const Vec ones = Vec::Ones(n);
    for (int i = 0; i < n; ++i) {
      const Complex lhs = gen_E(cd, ones, sp.lambdas[i]);
      const Complex rhs = delta_derivatives(cd, sp.lambdas[i]).d1;
      CHECK(cdist(lhs, rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("Hermitian case: lambda and mu real") {
  std::mt19937_64 rng(41);
  for (int n = 2; n <= 6; ++n) {
    const SpectralCoords c =
        spectral_coords(build_lax(random_regular_state(n, Coupling::Imaginary, rng)));
    CHECK(c.lambdas.imag().cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(c.mu.imag().cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("eigenvector formula") {
  SUBCASE("hand-computed branch of the reference state") {
    // For lambda = 1/2, Psi = (1, -i): mu_tilde = (1+i)/(1-i) = i.
    const CVec mu_tilde = eigenvector_coords(build_lax(test_state()));
    CHECK(cdist(mu_tilde[1], Complex(0.0, 1.0)) < 1e-12);
    CHECK(cdist(mu_tilde[0], Complex(0.0, -1.0)) < 1e-12);
  }
  SUBCASE("n=1 gives x_1") {
    const CVec mu_tilde = eigenvector_coords(build_lax(make_state({5.0}, {3.0})));
    CHECK(cdist(mu_tilde[0], 5.0) < 1e-15);
  }
  SUBCASE("agrees with the adjugate route") {
    std::mt19937_64 rng(43);
    for (int rep = 0; rep < 5; ++rep) {
      const LaxPair pair = build_lax(random_regular_state(5, Coupling::Imaginary, rng));
      const CVec via_eigvec = eigenvector_coords(pair);
      const CVec via_adj = spectral_coords(pair).mu_tilde;
      for (int i = 0; i < 5; ++i) {
        CHECK(cdist(via_eigvec[i], via_adj[i]) <=
              1e-9 * std::max(1.0, std::abs(via_adj[i])));
      }
    }
  }
}

TEST_CASE("rank-one adjugate at an eigenvalue matches the eigenvector dyad") {
  // At lambda = lambda_i the adjugate is Psi_i (x) left_i up to scale.
  std::mt19937_64 rng(47);
  const LaxPair pair = build_lax(random_regular_state(4, Coupling::Imaginary, rng));
  const CharData cd = faddeev_leverrier(pair.L);
  const Spectrum sp = eigen_decompose(pair.L, pair.coupling);
  for (int i = 0; i < 4; ++i) {
    const CMat adj = adjugate_at(cd, sp.lambdas[i]);
    const CMat dyad = sp.right.col(i) * sp.left.row(i);
    const Complex scale = adj.trace() / dyad.trace();
    CHECK((adj - scale * dyad).cwiseAbs().maxCoeff() <
          1e-8 * std::max(1.0, adj.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("degenerate spectra are flagged and rejected") {
  // Far-separated particles with equal momenta: eigenvalues collide.
  const PhaseState s = make_state({-1e7, 1e7}, {0.3, 0.3});
  const Spectrum sp = eigen_decompose(build_lax(s).L, s.coupling);
  CHECK(sp.degenerate);
  CHECK_THROWS_WITH_AS(spectral_coords(build_lax(s)),
                       doctest::Contains("DEGENERATE_SPECTRUM"), CmError);
}

TEST_CASE("conjecture residual E - G - Delta''/2") {
  SUBCASE("reference state, real coupling: exact") {
    const LaxPair pair = build_lax(test_state(Coupling::Real));
    const auto probes = default_probes(2);
    CHECK(conjecture_residual(pair, probes) < 1e-15);
  }
  SUBCASE("n=1: identically zero") {
    const LaxPair pair = build_lax(make_state({5.0}, {3.0}));
    const auto probes = default_probes(1);
    CHECK(conjecture_residual(pair, probes) < 1e-15);
  }
  SUBCASE("reference state, imaginary coupling: |i - 1|/2") {
    const LaxPair pair = build_lax(test_state());
    const auto probes = default_probes(2);
    CHECK(conjecture_residual(pair, probes) ==
          doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
    // The coupling-weighted form E - G - c Delta''/2 is exact here.
    CHECK(conjecture_residual(pair, probes, Complex(0.0, 1.0)) < 1e-15);
  }
  SUBCASE("random real-coupling states up to n=8") {
    std::mt19937_64 rng(53);
    for (int n = 1; n <= 8; ++n) {
      for (int rep = 0; rep < 5; ++rep) {
        const LaxPair pair = build_lax(random_state(n, Coupling::Real, rng));
        CHECK(conjecture_residual(pair, default_probes(n)) < 1e-8);
      }
    }
  }
}

TEST_SUITE_END();
