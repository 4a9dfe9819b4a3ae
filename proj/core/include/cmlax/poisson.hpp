#pragma once

#include <functional>
#include <string>

#include "cmlax/report.hpp"
#include "cmlax/spectral.hpp"

namespace cmlax {

// Sign of {lambda_i, mu_j}_0 under this bracket orientation, calibrated once
// at n = 1 where lambda = p and mu = mu_tilde = x give {p, x}_0 = -1.
inline constexpr double kCanonicalSign = -1.0;

// Response of every mu_i, mu_tilde_i to the uniform translation field
// sum_i d/dx_i; at n = 1, mu = x moves at unit rate.
inline constexpr double kTranslationRate = 1.0;

/// A named scalar function of the phase state. Evaluations must be
/// deterministic; all built-ins are smooth away from collisions and
/// spectral degeneracies.
struct Observable {
  std::string name;
  std::function<Complex(const PhaseState&)> eval;
};

struct FdOptions {
  // Step h_i = step_scale * max(1, |u_i|) per coordinate; one Richardson
  // extrapolation step on top of central differences.
  double step_scale = 1e-5;
};

/// Central-difference gradient over the 2n coordinates (x_1..x_n, p_1..p_n)
/// with one Richardson step: (4 D_{h/2} - D_h)/3. Observable failures
/// propagate as EvalFailure.
CVec gradient(const Observable& f, const PhaseState& s, const FdOptions& opt = {});

/// Directional derivative along a phase-space direction (same stencil).
Complex directional_derivative(const Observable& f, const PhaseState& s,
                               const Vec& dx, const Vec& dp,
                               const FdOptions& opt = {});

/// {f, g}_0 = sum_i (df/dx_i dg/dp_i - df/dp_i dg/dx_i); reproduces
/// {J_1, I_1}_0 = +n.
Complex bracket0(const Observable& f, const Observable& g, const PhaseState& s,
                 const FdOptions& opt = {});

/// {f, g}_1 through the (I, J) chart: expand df, dg in (dI_1..dI_n,
/// dJ_1..dJ_n) by solving against the finite-difference Jacobian, then
/// contract with the closed-form bracket table evaluated at the state.
/// Throws SingularChart when the Jacobian condition number exceeds 1e10.
Complex bracket1(const Observable& f, const Observable& g, const PhaseState& s,
                 const FdOptions& opt = {});

/// I_k = tr(L^k)/k and J_k = tr(X L^{k-1}), k = 1..n.
struct InvariantBasis {
  CVec I;
  CVec J;
};

InvariantBasis invariants_IJ(const PhaseState& s);

Complex trace_power(const LaxPair& pair, int m);    // tr L^m, m >= 0
Complex invariant_I(const PhaseState& s, int k);    // tr(L^k)/k
Complex invariant_J(const PhaseState& s, int k);    // tr(X L^{k-1})

/// Gamma_ell = ell J_2 I_ell - 2 J_ell I_2 for 1 <= ell <= n, ell != 2.
Complex gamma_invariant(const PhaseState& s, int ell);

// Observable factories. Spectrally indexed observables re-sort by (Re, Im)
// at every evaluation, so stencil steps must stay far below the eigenvalue
// gap (enforced by the verification suites).
Observable obs_I(int k);
Observable obs_J(int k);
Observable obs_hamiltonian();
Observable obs_lambda(int i);
Observable obs_mu(int i);
Observable obs_mu_tilde(int i);
Observable obs_gamma(int ell);
Observable obs_char_delta(Complex lambda);  // det(lambda I - L)

/// Precomputed chart for repeated {., .}_1 evaluations at one state.
struct Bracket1Chart {
  Eigen::MatrixXcd jacobian;     // rows: d(I_1..I_n, J_1..J_n) over (x, p)
  Eigen::MatrixXcd pi1;          // closed-form {B_k, B_l}_1 at the state
  Eigen::PartialPivLU<Eigen::MatrixXcd> transpose_lu;
  double condition = 0.0;
};

Bracket1Chart make_bracket1_chart(const PhaseState& s, const FdOptions& opt = {});
Complex bracket1_from_chart(const Bracket1Chart& chart, const CVec& grad_f,
                            const CVec& grad_g);

inline Complex bracket0_from_gradients(const CVec& grad_f, const CVec& grad_g) {
  const int n = static_cast<int>(grad_f.size()) / 2;
  Complex acc(0.0, 0.0);
  for (int i = 0; i < n; ++i) {
    acc += grad_f[i] * grad_g[n + i] - grad_f[n + i] * grad_g[i];
  }
  return acc;
}

// Verification suites. Each returns a BracketReport whose entries carry the
// numeric value, the closed-form target and the absolute deviation.

/// {lambda_i, lambda_j}_0 = 0, {mu(~)_i, mu(~)_j}_0 = 0, and
/// {lambda_i, mu(~)_j}_0 = sigma delta_ij with the global sigma above.
BracketReport verify_canonicity(const PhaseState& s, const FdOptions& opt = {},
                                double tol = 1e-6);

/// {lambda_i, lambda_j}_1 = 0, {lambda_i, mu_tilde_j}_1 = sigma delta_ij
/// lambda_j, antisymmetry of ({mu_tilde_i, mu_tilde_j}_1), {mu_i, mu_j}_1 = 0
/// and the eigenform property {mu_i, F}_1 = lambda_i {mu_i, F}_0 for
/// F in {J_1..J_n}.
BracketReport verify_bracket1_relations(const PhaseState& s,
                                        const FdOptions& opt = {},
                                        double tol = 1e-6);

/// Lenard recursion {J_l, I_{k+1}}_0 = {J_l, I_k}_1, both against the
/// closed form (k+l-1) I_{k+l-1}.
BracketReport verify_lenard(const PhaseState& s, const FdOptions& opt = {},
                            double tol = 1e-6);

/// {Gamma_ell, I_2}_0 = 0 for valid ell, plus a functional-independence
/// rank check of {I_1..I_n, Gamma_ell}.
BracketReport verify_superintegrability(const PhaseState& s,
                                        const FdOptions& opt = {},
                                        double tol = 1e-6);

/// Translation response: each mu_i and mu_tilde_i moves at rate
/// kTranslationRate along sum_i d/dx_i while every lambda_i stays fixed.
BracketReport verify_euler_field(const PhaseState& s, const FdOptions& opt = {},
                                 double tol = 1e-6);

/// Generator recursion {Delta(lambda), F}_1 = lambda {Delta(lambda), F}_0 +
/// Delta(lambda) {I_1, F}_0 for F in {J_1..J_n}; lambda_probe must not be an
/// eigenvalue.
BracketReport verify_delta_generator(const PhaseState& s, Complex lambda_probe,
                                     const FdOptions& opt = {},
                                     double tol = 1e-6);

/// Full reproduction of the I/J bracket table under both brackets, each
/// entry against its closed form, deviation measured relative to
/// max(1, |target|).
BracketReport verify_bracket_tables(const PhaseState& s, const FdOptions& opt = {},
                                    double tol = 1e-5);

}  // namespace cmlax
