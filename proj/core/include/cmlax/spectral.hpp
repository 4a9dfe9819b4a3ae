#pragma once

#include <span>
#include <vector>

#include "cmlax/phase.hpp"

namespace cmlax {

// Spectra with min eigenvalue gap below kGapFactor * max(1, ||L||_F) are
// flagged degenerate; Sklyanin's denominator Delta'(lambda_i) degrades
// quadratically near collisions.
inline constexpr double kGapFactor = 1e-6;

/// Characteristic polynomial Delta(lambda) = det(lambda I - L) together with
/// the adjugate polynomial (lambda - L)^v = sum_k lambda^k M_k.
struct CharData {
  int n = 0;
  CVec delta;              // delta[k] multiplies lambda^k; delta[n] = 1
  std::vector<CMat> adj;   // adj[k] = M_k, k = 0..n-1; adj[n-1] = I
};

/// Division-free computation of CharData: M_{n-1} = I, then
/// c_k = -tr(L M_k)/(n-k) and M_{k-1} = L M_k + c_k I. O(n^4).
CharData faddeev_leverrier(const CMat& L);

/// Evaluates the adjugate polynomial sum_k lambda^k M_k.
CMat adjugate_at(const CharData& cd, Complex lambda);

/// Relative residual of (lambda I - L)(lambda - L)^v - Delta(lambda) I over
/// the given probe values (max-norm, scaled by the factors' norms).
double char_identity_residual(const CMat& L, const CharData& cd,
                              std::span<const Complex> probes);

/// n+1 distinct small-integer probe values, centered near zero.
std::vector<Complex> default_probes(int n);

struct Spectrum {
  CVec lambdas;  // sorted by (Re, Im)
  CMat right;    // columns are right eigenvectors
  CMat left;     // rows are left eigenvectors; left * right = I
  double min_gap = 0.0;
  bool degenerate = false;
};

/// Eigen-decomposition of L, sorted by (Re, Im). The Imaginary coupling takes
/// the self-adjoint path (real spectrum, unitary eigenvectors, left vectors =
/// conjugated right vectors); Real takes the general complex path.
Spectrum eigen_decompose(const CMat& L, Coupling coupling);

/// G(lambda) = tr(X (lambda - L)^v), the generating function of the
/// Darboux-Nijenhuis momenta.
Complex gen_G(const CharData& cd, const Vec& x, Complex lambda);

/// E(lambda) = x^T (lambda - L)^v e with e = (1,...,1)^T, the Sklyanin
/// generating function.
Complex gen_E(const CharData& cd, const Vec& x, Complex lambda);

struct DeltaJet {
  Complex value;
  Complex d1;
  Complex d2;
};

/// Delta, Delta', Delta'' at lambda by a Horner scheme on the coefficients.
DeltaJet delta_derivatives(const CharData& cd, Complex lambda);

/// Eigenvalues of L and both families of conjugate momenta:
/// mu_i = G(lambda_i)/Delta'(lambda_i) (DN), mu_tilde_i =
/// E(lambda_i)/Delta'(lambda_i) (MDN, Sklyanin's formula).
struct SpectralCoords {
  CVec lambdas;
  CVec mu;
  CVec mu_tilde;
  double min_gap = 0.0;
  bool degenerate = false;
};

/// Throws DegenerateSpectrum when the eigenvalue gap makes Delta'(lambda_i)
/// unreliable. Also cross-checks e^T (lambda_i - L)^v e = Delta'(lambda_i)
/// to 1e-9 before dividing.
SpectralCoords spectral_coords(const LaxPair& pair);

/// mu_tilde via the eigenvector formula (x^T Psi_i)/(e^T Psi_i); must agree
/// with spectral_coords().mu_tilde. Throws NormalizationFailure when
/// |e^T Psi_i| < 1e-12 ||Psi_i||.
CVec eigenvector_coords(const LaxPair& pair);

/// Max over probes of |E - G - scale * Delta''/2| / max(1, |Delta''|).
/// scale = 1 tests the plain identity (holds for the Real coupling);
/// scale = c tests the coupling-weighted variant.
double conjecture_residual(const LaxPair& pair, std::span<const Complex> probes,
                           Complex scale = Complex(1.0, 0.0));

}  // namespace cmlax
