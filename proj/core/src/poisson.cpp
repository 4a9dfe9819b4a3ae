#include "cmlax/poisson.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace cmlax {

namespace {

// Observable failures inside stencils surface as EvalFailure.
Complex safe_eval(const Observable& f, const PhaseState& s) {
  try {
    return f.eval(s);
  } catch (const CmError& err) {
    if (err.code() == ErrorCode::EvalFailure) throw;
    throw CmError(ErrorCode::EvalFailure,
                  "evaluating '" + f.name + "': " + err.what());
  }
}

PhaseState shifted(const PhaseState& s, int coord, double delta) {
  PhaseState t = s;
  if (coord < s.n) {
    t.x[coord] += delta;
  } else {
    t.p[coord - s.n] += delta;
  }
  return t;
}

double coordinate_value(const PhaseState& s, int coord) {
  return coord < s.n ? s.x[coord] : s.p[coord - s.n];
}

// Central difference with one Richardson step: (4 D_{h/2} - D_h) / 3.
// Results are materialized eagerly; Eigen expression templates must not
// outlive the stencil temporaries.
template <typename EvalFn>
auto richardson(EvalFn&& eval, double h) {
  using R = std::decay_t<decltype(eval(h))>;
  const R up = eval(h);
  const R down = eval(-h);
  const R up_half = eval(h / 2.0);
  const R down_half = eval(-h / 2.0);
  const R d_h = (up - down) / (2.0 * h);
  const R d_h2 = (up_half - down_half) / h;
  return R((4.0 * d_h2 - d_h) / 3.0);
}

// tr L^m for m = 0..m_max and J_m = tr(X L^{m-1}) for m = 1..m_max.
struct ExtendedTraces {
  std::vector<Complex> tr;  // tr[m] = tr L^m
  std::vector<Complex> J;   // J[m] = tr(X L^{m-1}), J[0] unused
};

ExtendedTraces extended_traces(const LaxPair& pair, int m_max) {
  const int n = pair.n();
  ExtendedTraces out;
  out.tr.resize(m_max + 1);
  out.J.resize(m_max + 1);
  CMat power = CMat::Identity(n, n);  // L^{m-1} inside the loop
  out.tr[0] = Complex(static_cast<double>(n), 0.0);
  for (int m = 1; m <= m_max; ++m) {
    out.J[m] = (pair.x.array().cast<Complex>() * power.diagonal().array()).sum();
    power = pair.L * power;
    out.tr[m] = power.trace();
  }
  return out;
}

// Closed-form bracket tables in the (I_1..I_n, J_1..J_n) basis.
// pi[k][l] = {B_k, B_l}; the degree shift is 1 for {.,.}_1, 0 for {.,.}_0.
Eigen::MatrixXcd closed_form_table(const LaxPair& pair, int degree_shift) {
  const int n = pair.n();
  const ExtendedTraces ext = extended_traces(pair, 2 * n);
  Eigen::MatrixXcd pi = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int a = 1; a <= n; ++a) {
    for (int b = 1; b <= n; ++b) {
      // {J_a, I_b} = tr(L^{a+b-2+shift}); covers {J_1, I_1}_0 = n via tr L^0.
      const Complex ji = ext.tr[a + b - 2 + degree_shift];
      pi(n + a - 1, b - 1) = ji;
      pi(b - 1, n + a - 1) = -ji;
      // {J_a, J_b} = (b - a) J_{a+b-2+shift}.
      const int idx = a + b - 2 + degree_shift;
      if (a != b && idx >= 1) {
        pi(n + a - 1, n + b - 1) = static_cast<double>(b - a) * ext.J[idx];
      }
    }
  }
  return pi;
}

// Gradients of all 2n invariants in one stencil sweep; row k is the gradient
// of I_{k+1} for k < n, of J_{k-n+1} otherwise.
Eigen::MatrixXcd invariant_jacobian(const PhaseState& s, const FdOptions& opt) {
  const int n = s.n;
  Eigen::MatrixXcd T(2 * n, 2 * n);
  for (int d = 0; d < 2 * n; ++d) {
    const double h = opt.step_scale * std::max(1.0, std::abs(coordinate_value(s, d)));
    const CVec col = richardson(
        [&](double delta) -> CVec {
          const InvariantBasis basis = invariants_IJ(shifted(s, d, delta));
          CVec stacked(2 * n);
          stacked.head(n) = basis.I;
          stacked.tail(n) = basis.J;
          return stacked;
        },
        h);
    T.col(d) = col;
  }
  return T;
}

// Values and gradients of all lambda_i, mu_i, mu_tilde_i in one sweep.
struct SpectralGradients {
  SpectralCoords base;
  Eigen::MatrixXcd dlam;  // n x 2n
  Eigen::MatrixXcd dmu;
  Eigen::MatrixXcd dmut;
};

SpectralGradients spectral_gradients(const PhaseState& s, const FdOptions& opt) {
  const int n = s.n;
  SpectralGradients out;
  out.base = spectral_coords(build_lax(s));

  // Stencil steps must stay far below the eigenvalue gap or the (Re, Im)
  // sort swaps branches between stencil points.
  double h_max = 0.0;
  for (int d = 0; d < 2 * n; ++d) {
    h_max = std::max(h_max, opt.step_scale * std::max(1.0, std::abs(coordinate_value(s, d))));
  }
  if (10.0 * h_max >= out.base.min_gap) {
    throw CmError(ErrorCode::EvalFailure,
                  "stencil step too close to the spectral gap");
  }

  out.dlam.resize(n, 2 * n);
  out.dmu.resize(n, 2 * n);
  out.dmut.resize(n, 2 * n);
  for (int d = 0; d < 2 * n; ++d) {
    const double h = opt.step_scale * std::max(1.0, std::abs(coordinate_value(s, d)));
    const Eigen::MatrixXcd cols = richardson(
        [&](double delta) -> Eigen::MatrixXcd {
          PhaseState t = shifted(s, d, delta);
          SpectralCoords coords;
          try {
            coords = spectral_coords(build_lax(t));
          } catch (const CmError& err) {
            throw CmError(ErrorCode::EvalFailure,
                          std::string("stencil point failed: ") + err.what());
          }
          Eigen::MatrixXcd stacked(n, 3);
          stacked.col(0) = coords.lambdas;
          stacked.col(1) = coords.mu;
          stacked.col(2) = coords.mu_tilde;
          return stacked;
        },
        h);
    out.dlam.col(d) = cols.col(0);
    out.dmu.col(d) = cols.col(1);
    out.dmut.col(d) = cols.col(2);
  }
  return out;
}

std::string idx_name(const char* base, int k) {
  std::ostringstream os;
  os << base << k;
  return os.str();
}

}  // namespace

CVec gradient(const Observable& f, const PhaseState& s, const FdOptions& opt) {
  validate_state(s);
  CVec grad(2 * s.n);
  for (int d = 0; d < 2 * s.n; ++d) {
    const double h = opt.step_scale * std::max(1.0, std::abs(coordinate_value(s, d)));
    grad[d] = richardson(
        [&](double delta) { return safe_eval(f, shifted(s, d, delta)); }, h);
  }
  return grad;
}

Complex directional_derivative(const Observable& f, const PhaseState& s,
                               const Vec& dx, const Vec& dp, const FdOptions& opt) {
  validate_state(s);
  const double h = opt.step_scale;
  return richardson(
      [&](double delta) {
        PhaseState t = s;
        t.x += delta * dx;
        t.p += delta * dp;
        return safe_eval(f, t);
      },
      h);
}

Complex bracket0(const Observable& f, const Observable& g, const PhaseState& s,
                 const FdOptions& opt) {
  return bracket0_from_gradients(gradient(f, s, opt), gradient(g, s, opt));
}

Bracket1Chart make_bracket1_chart(const PhaseState& s, const FdOptions& opt) {
  Bracket1Chart chart;
  chart.jacobian = invariant_jacobian(s, opt);

  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(chart.jacobian);
  const double smin = svd.singularValues().tail(1)(0);
  const double smax = svd.singularValues()(0);
  chart.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(chart.condition < 1e10)) {
    std::ostringstream msg;
    msg << "invariant Jacobian condition " << chart.condition;
    throw CmError(ErrorCode::SingularChart, msg.str());
  }

  chart.pi1 = closed_form_table(build_lax(s), 1);
  chart.transpose_lu.compute(chart.jacobian.transpose());
  return chart;
}

Complex bracket1_from_chart(const Bracket1Chart& chart, const CVec& grad_f,
                            const CVec& grad_g) {
  const CVec a = chart.transpose_lu.solve(grad_f);
  const CVec b = chart.transpose_lu.solve(grad_g);
  return (a.transpose() * chart.pi1 * b)(0);
}

Complex bracket1(const Observable& f, const Observable& g, const PhaseState& s,
                 const FdOptions& opt) {
  const Bracket1Chart chart = make_bracket1_chart(s, opt);
  return bracket1_from_chart(chart, gradient(f, s, opt), gradient(g, s, opt));
}

InvariantBasis invariants_IJ(const PhaseState& s) {
  const LaxPair pair = build_lax(s);
  const ExtendedTraces ext = extended_traces(pair, s.n);
  InvariantBasis basis;
  basis.I = CVec(s.n);
  basis.J = CVec(s.n);
  for (int k = 1; k <= s.n; ++k) {
    basis.I[k - 1] = ext.tr[k] / static_cast<double>(k);
    basis.J[k - 1] = ext.J[k];
  }
  return basis;
}

Complex trace_power(const LaxPair& pair, int m) {
  if (m < 0) throw CmError(ErrorCode::IndexOutOfRange, "trace power must be >= 0");
  return extended_traces(pair, m).tr[m];
}

Complex invariant_I(const PhaseState& s, int k) {
  if (k < 1) throw CmError(ErrorCode::IndexOutOfRange, "I_k needs k >= 1");
  return trace_power(build_lax(s), k) / static_cast<double>(k);
}

Complex invariant_J(const PhaseState& s, int k) {
  if (k < 1) throw CmError(ErrorCode::IndexOutOfRange, "J_k needs k >= 1");
  const LaxPair pair = build_lax(s);
  return extended_traces(pair, k).J[k];
}

Complex gamma_invariant(const PhaseState& s, int ell) {
  if (ell == 2 || ell < 1 || ell > s.n || s.n < 2) {
    throw CmError(ErrorCode::IndexOutOfRange,
                  "Gamma_ell needs 1 <= ell <= n, ell != 2, n >= 2");
  }
  const InvariantBasis basis = invariants_IJ(s);
  return static_cast<double>(ell) * basis.J[1] * basis.I[ell - 1] -
         2.0 * basis.J[ell - 1] * basis.I[1];
}

Observable obs_I(int k) {
  return Observable{idx_name("I_", k),
                    [k](const PhaseState& s) { return invariant_I(s, k); }};
}

Observable obs_J(int k) {
  return Observable{idx_name("J_", k),
                    [k](const PhaseState& s) { return invariant_J(s, k); }};
}

Observable obs_hamiltonian() {
  return Observable{"H", [](const PhaseState& s) {
                      return Complex(hamiltonian(s), 0.0);
                    }};
}

Observable obs_lambda(int i) {
  return Observable{idx_name("lambda_", i), [i](const PhaseState& s) {
                      return spectral_coords(build_lax(s)).lambdas[i];
                    }};
}

Observable obs_mu(int i) {
  return Observable{idx_name("mu_", i), [i](const PhaseState& s) {
                      return spectral_coords(build_lax(s)).mu[i];
                    }};
}

Observable obs_mu_tilde(int i) {
  return Observable{idx_name("mu_tilde_", i), [i](const PhaseState& s) {
                      return spectral_coords(build_lax(s)).mu_tilde[i];
                    }};
}

Observable obs_gamma(int ell) {
  return Observable{idx_name("Gamma_", ell), [ell](const PhaseState& s) {
                      return gamma_invariant(s, ell);
                    }};
}

Observable obs_char_delta(Complex lambda) {
  std::ostringstream os;
  os << "Delta(" << lambda.real();
  if (lambda.imag() != 0.0) os << (lambda.imag() < 0 ? "" : "+") << lambda.imag() << "i";
  os << ")";
  return Observable{os.str(), [lambda](const PhaseState& s) {
                      const LaxPair pair = build_lax(s);
                      const CMat m = lambda * CMat::Identity(s.n, s.n) - pair.L;
                      return Eigen::PartialPivLU<CMat>(m).determinant();
                    }};
}

BracketReport verify_canonicity(const PhaseState& s, const FdOptions& opt, double tol) {
  const SpectralGradients sg = spectral_gradients(s, opt);
  const int n = s.n;
  BracketReport report;
  report.check = "canonicity";
  report.tolerance = tol;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Complex sigma_delta =
          (i == j) ? Complex(kCanonicalSign, 0.0) : Complex(0.0, 0.0);
      if (j > i) {
        report.add("{lambda_i,lambda_j}_0", i, j,
                   bracket0_from_gradients(sg.dlam.row(i), sg.dlam.row(j)), 0.0);
        report.add("{mu_tilde_i,mu_tilde_j}_0", i, j,
                   bracket0_from_gradients(sg.dmut.row(i), sg.dmut.row(j)), 0.0);
        report.add("{mu_i,mu_j}_0", i, j,
                   bracket0_from_gradients(sg.dmu.row(i), sg.dmu.row(j)), 0.0);
      }
      report.add("{lambda_i,mu_tilde_j}_0", i, j,
                 bracket0_from_gradients(sg.dlam.row(i), sg.dmut.row(j)), sigma_delta);
      report.add("{lambda_i,mu_j}_0", i, j,
                 bracket0_from_gradients(sg.dlam.row(i), sg.dmu.row(j)), sigma_delta);
    }
  }
  report.finalize();
  return report;
}

BracketReport verify_bracket1_relations(const PhaseState& s, const FdOptions& opt,
                                        double tol) {
  const SpectralGradients sg = spectral_gradients(s, opt);
  const Bracket1Chart chart = make_bracket1_chart(s, opt);
  const int n = s.n;

  BracketReport report;
  report.check = "bracket1-relations";
  report.tolerance = tol;

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j > i) {
        report.add("{lambda_i,lambda_j}_1", i, j,
                   bracket1_from_chart(chart, sg.dlam.row(i), sg.dlam.row(j)), 0.0);
        report.add("{mu_i,mu_j}_1", i, j,
                   bracket1_from_chart(chart, sg.dmu.row(i), sg.dmu.row(j)), 0.0);
        const Complex b_ij = bracket1_from_chart(chart, sg.dmut.row(i), sg.dmut.row(j));
        const Complex b_ji = bracket1_from_chart(chart, sg.dmut.row(j), sg.dmut.row(i));
        report.add("antisym {mu_tilde_i,mu_tilde_j}_1", i, j, b_ij + b_ji, 0.0);
      }
      const Complex target = (i == j) ? kCanonicalSign * sg.base.lambdas[j]
                                      : Complex(0.0, 0.0);
      report.add("{lambda_i,mu_tilde_j}_1", i, j,
                 bracket1_from_chart(chart, sg.dlam.row(i), sg.dmut.row(j)), target);
    }
  }

  // Eigenform of the DN momenta: {mu_i, F}_1 = lambda_i {mu_i, F}_0 for the
  // probe family F = J_1..J_n (whose gradients are rows of the chart).
  for (int i = 0; i < n; ++i) {
    for (int ell = 1; ell <= n; ++ell) {
      const CVec grad_J = chart.jacobian.row(n + ell - 1);
      const Complex lhs = bracket1_from_chart(chart, sg.dmu.row(i), grad_J);
      const Complex rhs =
          sg.base.lambdas[i] * bracket0_from_gradients(sg.dmu.row(i), grad_J);
      report.add_relative("eigenform mu_i vs J_ell", i, ell, lhs, rhs);
    }
  }
  report.finalize();
  return report;
}

BracketReport verify_lenard(const PhaseState& s, const FdOptions& opt, double tol) {
  const Bracket1Chart chart = make_bracket1_chart(s, opt);
  const ExtendedTraces ext = extended_traces(build_lax(s), 2 * s.n);
  const int n = s.n;

  BracketReport report;
  report.check = "lenard";
  report.tolerance = tol;
  for (int ell = 1; ell <= n; ++ell) {
    const CVec grad_J = chart.jacobian.row(n + ell - 1);
    for (int k = 1; k + 1 <= n; ++k) {
      const CVec grad_I_next = chart.jacobian.row(k);  // gradient of I_{k+1}
      const CVec grad_I = chart.jacobian.row(k - 1);
      const Complex lhs0 = bracket0_from_gradients(grad_J, grad_I_next);
      const Complex rhs1 = bracket1_from_chart(chart, grad_J, grad_I);
      const Complex closed = ext.tr[k + ell - 1];  // (k+ell-1) I_{k+ell-1}
      report.add_relative("{J_l,I_k+1}_0 = {J_l,I_k}_1", ell, k, lhs0, rhs1);
      report.add_relative("{J_l,I_k+1}_0 closed form", ell, k, lhs0, closed);
      report.add_relative("{J_l,I_k}_1 closed form", ell, k, rhs1, closed);
    }
  }
  report.finalize();
  return report;
}

BracketReport verify_superintegrability(const PhaseState& s, const FdOptions& opt,
                                        double tol) {
  if (s.n < 2) {
    throw CmError(ErrorCode::InvalidInput, "superintegrability check needs n >= 2");
  }
  const int n = s.n;
  BracketReport report;
  report.check = "superintegrability";
  report.tolerance = tol;

  const Observable i2 = obs_I(2);
  const CVec grad_I2 = gradient(i2, s, opt);

  std::vector<CVec> gamma_grads;
  std::vector<int> ells;
  for (int ell = 1; ell <= n; ++ell) {
    if (ell == 2) continue;
    const Observable gam = obs_gamma(ell);
    const CVec grad_gamma = gradient(gam, s, opt);
    gamma_grads.push_back(grad_gamma);
    ells.push_back(ell);
    report.add("{Gamma_ell,I_2}_0", ell, 2,
               bracket0_from_gradients(grad_gamma, grad_I2), 0.0);
  }

  // Functional independence of {I_1..I_n, Gamma_ell}: the stacked gradient
  // matrix should have full rank n + #ell at a generic state.
  Eigen::MatrixXcd stacked(n + static_cast<int>(ells.size()), 2 * n);
  for (int k = 1; k <= n; ++k) {
    stacked.row(k - 1) = gradient(obs_I(k), s, opt).transpose();
  }
  for (std::size_t m = 0; m < ells.size(); ++m) {
    stacked.row(n + static_cast<int>(m)) = gamma_grads[m].transpose();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked);
  const double threshold = 1e-8 * svd.singularValues()(0);
  const int rank = static_cast<int>(
      (svd.singularValues().array() > threshold).count());
  report.add("rank of d{I_1..I_n, Gamma_ell}", rank,
             n + static_cast<int>(ells.size()), static_cast<double>(rank),
             static_cast<double>(n + ells.size()));
  report.finalize();
  return report;
}

BracketReport verify_euler_field(const PhaseState& s, const FdOptions& opt,
                                 double tol) {
  const int n = s.n;
  const SpectralCoords base = spectral_coords(build_lax(s));
  if (10.0 * opt.step_scale >= base.min_gap) {
    throw CmError(ErrorCode::EvalFailure, "stencil step too close to the spectral gap");
  }

  const Eigen::MatrixXcd response = richardson(
      [&](double delta) -> Eigen::MatrixXcd {
        PhaseState t = s;
        t.x.array() += delta;
        const SpectralCoords coords = spectral_coords(build_lax(t));
        Eigen::MatrixXcd stacked(n, 3);
        stacked.col(0) = coords.lambdas;
        stacked.col(1) = coords.mu;
        stacked.col(2) = coords.mu_tilde;
        return stacked;
      },
      opt.step_scale);

  BracketReport report;
  report.check = "euler-field";
  report.tolerance = tol;
  for (int i = 0; i < n; ++i) {
    report.add("translation response lambda_i", i, i, response(i, 0), 0.0);
    report.add("translation response mu_i", i, i, response(i, 1), kTranslationRate);
    report.add("translation response mu_tilde_i", i, i, response(i, 2),
               kTranslationRate);
  }
  report.finalize();
  return report;
}

BracketReport verify_delta_generator(const PhaseState& s, Complex lambda_probe,
                                     const FdOptions& opt, double tol) {
  const SpectralCoords coords = spectral_coords(build_lax(s));
  double min_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < s.n; ++i) {
    min_dist = std::min(min_dist, std::abs(lambda_probe - coords.lambdas[i]));
  }
  if (min_dist < 1e-6 * std::max(1.0, std::abs(lambda_probe))) {
    throw CmError(ErrorCode::InvalidInput, "probe lambda coincides with an eigenvalue");
  }

  const Bracket1Chart chart = make_bracket1_chart(s, opt);
  const Observable delta_obs = obs_char_delta(lambda_probe);
  const CVec grad_delta = gradient(delta_obs, s, opt);
  const Complex delta_value = delta_obs.eval(s);
  const CVec grad_I1 = chart.jacobian.row(0);

  BracketReport report;
  report.check = "delta-generator";
  report.tolerance = tol;
  for (int ell = 1; ell <= s.n; ++ell) {
    const CVec grad_F = chart.jacobian.row(s.n + ell - 1);
    const Complex lhs = bracket1_from_chart(chart, grad_delta, grad_F);
    const Complex rhs = lambda_probe * bracket0_from_gradients(grad_delta, grad_F) +
                        delta_value * bracket0_from_gradients(grad_I1, grad_F);
    report.add_relative("{Delta,F}_1 = lambda {Delta,F}_0 + Delta {I_1,F}_0",
                        0, ell, lhs, rhs);
  }
  report.finalize();
  return report;
}

BracketReport verify_bracket_tables(const PhaseState& s, const FdOptions& opt,
                                    double tol) {
  const Bracket1Chart chart = make_bracket1_chart(s, opt);
  const LaxPair pair = build_lax(s);
  const Eigen::MatrixXcd pi0 = closed_form_table(pair, 0);
  const Eigen::MatrixXcd& pi1 = chart.pi1;
  const int n = s.n;

  const auto basis_name = [n](int k) {
    return k < n ? idx_name("I_", k + 1) : idx_name("J_", k - n + 1);
  };

  BracketReport report;
  report.check = "bracket-tables";
  report.tolerance = tol;
  for (int k = 0; k < 2 * n; ++k) {
    for (int l = k + 1; l < 2 * n; ++l) {
      const CVec grad_k = chart.jacobian.row(k);
      const CVec grad_l = chart.jacobian.row(l);
      report.add_relative("{" + basis_name(k) + "," + basis_name(l) + "}_0", k, l,
                          bracket0_from_gradients(grad_k, grad_l), pi0(k, l));
      report.add_relative("{" + basis_name(k) + "," + basis_name(l) + "}_1", k, l,
                          bracket1_from_chart(chart, grad_k, grad_l), pi1(k, l));
    }
  }
  report.finalize();
  return report;
}

}  // namespace cmlax
