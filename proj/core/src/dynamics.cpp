#include "cmlax/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace cmlax {

namespace {

void require_imaginary(const PhaseState& s, const char* what) {
  if (s.coupling != Coupling::Imaginary) {
    throw CmError(ErrorCode::CouplingUnsupported,
                  std::string(what) + " is only defined for the imaginary "
                  "coupling (real trajectories need a Hermitian Lax matrix)");
  }
}

double min_position_gap(const Vec& x) {
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < x.size(); ++i) {
    for (int j = i + 1; j < x.size(); ++j) {
      gap = std::min(gap, std::abs(x[i] - x[j]));
    }
  }
  return gap;
}

// Hamilton's equations for H = 1/2 sum p^2 + g sum_{i<j} (x_i - x_j)^{-2}.
struct CmRhs {
  double g;
  int n;

  void operator()(const Vec& y, Vec& dy) const {
    dy.resize(2 * n);
    dy.head(n) = y.segment(n, n);
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double d = y[i] - y[j];
        acc += 2.0 * g / (d * d * d);
      }
      dy[n + i] = acc;
    }
  }
};

// Dormand-Prince 5(4) coefficients.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 35.0 / 384 - 5179.0 / 57600,
                 kE3 = 500.0 / 1113 - 7571.0 / 16695,
                 kE4 = 125.0 / 192 - 393.0 / 640,
                 kE5 = -2187.0 / 6784 + 92097.0 / 339200,
                 kE6 = 11.0 / 84 - 187.0 / 2100, kE7 = -1.0 / 40;

PhaseState unpack(const Vec& y, int n, Coupling coupling) {
  PhaseState s;
  s.n = n;
  s.x = y.head(n);
  s.p = y.segment(n, n);
  s.coupling = coupling;
  return s;
}

}  // namespace

PhaseState exact_flow(const PhaseState& s, double t) {
  require_imaginary(s, "exact_flow");
  const LaxPair pair = build_lax(s);
  const CMat moved = pair.X().cast<Complex>() + t * pair.L;

  Eigen::SelfAdjointEigenSolver<CMat> solver(moved);
  if (solver.info() != Eigen::Success) {
    throw CmError(ErrorCode::EvalFailure, "eigensolver failed in exact_flow");
  }
  const Vec xs = solver.eigenvalues();
  for (int i = 0; i + 1 < s.n; ++i) {
    if (xs[i + 1] - xs[i] <= kPositionEpsilon) {
      std::ostringstream msg;
      msg << "eigenvalue collision of X + tL at t = " << t;
      throw CmError(ErrorCode::DegenerateSpectrum, msg.str());
    }
  }

  PhaseState out;
  out.n = s.n;
  out.x = xs;
  out.p = Vec(s.n);
  out.coupling = Coupling::Imaginary;
  for (int i = 0; i < s.n; ++i) {
    const CVec psi = solver.eigenvectors().col(i);  // unit norm
    out.p[i] = (psi.adjoint() * pair.L * psi)(0).real();
  }
  return out;
}

Trajectory integrate(const PhaseState& s, double t_end, double tol,
                     const std::vector<double>& output_times) {
  require_imaginary(s, "integrate");
  validate_state(s);
  if (!(tol > 0.0)) throw CmError(ErrorCode::InvalidInput, "tolerance must be positive");
  if (t_end < 0.0) throw CmError(ErrorCode::InvalidInput, "t_end must be >= 0");

  const int n = s.n;
  const CmRhs rhs{coupling_g(s.coupling), n};

  std::set<double> outputs(output_times.begin(), output_times.end());
  outputs.erase(0.0);

  Vec y(2 * n);
  y.head(n) = s.x;
  y.segment(n, n) = s.p;

  Trajectory traj;
  const auto record = [&](double t, const Vec& state) {
    PhaseState ps = unpack(state, n, s.coupling);
    traj.times.push_back(t);
    traj.energy.push_back(hamiltonian(ps));
    traj.states.push_back(std::move(ps));
  };
  record(0.0, y);
  if (t_end == 0.0) return traj;

  Vec k1(2 * n), k2(2 * n), k3(2 * n), k4(2 * n), k5(2 * n), k6(2 * n), k7(2 * n);
  Vec ytmp(2 * n), ynew(2 * n);

  double t = 0.0;
  double h = std::min(0.01 * std::max(1.0, t_end), t_end);
  rhs(y, k1);

  while (t < t_end) {
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw CmError(ErrorCode::StepUnderflow, "step size underflow");
    }
    auto next_output = outputs.upper_bound(t);
    double target = t_end;
    if (next_output != outputs.end() && *next_output < t_end) target = *next_output;
    h = std::min(h, target - t);

    ytmp = y + h * kA21 * k1;
    rhs(ytmp, k2);
    ytmp = y + h * (kA31 * k1 + kA32 * k2);
    rhs(ytmp, k3);
    ytmp = y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3);
    rhs(ytmp, k4);
    ytmp = y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
    rhs(ytmp, k5);
    ytmp = y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
    rhs(ytmp, k6);
    ynew = y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    rhs(ynew, k7);

    const Vec err_vec =
        h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
    double err = 0.0;
    for (int i = 0; i < 2 * n; ++i) {
      const double scale = tol + tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += std::pow(err_vec[i] / scale, 2);
    }
    err = std::sqrt(err / (2 * n));

    if (err <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      if (min_position_gap(y.head(n)) < kDynamicsCollisionEps) {
        throw CmError(ErrorCode::CollisionDetected,
                      "particles approached within the collision threshold");
      }
      record(t, y);
    }
    const double factor =
        std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
    h = std::min(factor * h, t_end - t + 1e-30);
    if (t >= t_end) break;
  }
  return traj;
}

Trajectory track_coordinates(Trajectory traj) {
  traj.coord_tracks.clear();
  traj.coord_tracks.reserve(traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    SpectralCoords coords = spectral_coords(build_lax(traj.states[k]));
    if (k == 0) {
      traj.coord_tracks.push_back(std::move(coords));
      continue;
    }
    const SpectralCoords& prev = traj.coord_tracks.back();
    const int n = static_cast<int>(coords.lambdas.size());

    // Greedy nearest-neighbour matching of eigenvalue branches.
    std::vector<bool> used(n, false);
    std::vector<int> match(n, -1);
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      double second = std::numeric_limits<double>::infinity();
      int best_j = -1;
      for (int j = 0; j < n; ++j) {
        if (used[j]) continue;
        const double d = std::abs(prev.lambdas[i] - coords.lambdas[j]);
        if (d < best) {
          second = best;
          best = d;
          best_j = j;
        } else {
          second = std::min(second, d);
        }
      }
      // Drift per step is the matched distance itself; a second candidate
      // within twice that cannot be resolved.
      if (second - best < 2.0 * best) {
        throw CmError(ErrorCode::BranchAmbiguity,
                      "eigenvalue branches too close to track");
      }
      used[best_j] = true;
      match[i] = best_j;
    }

    SpectralCoords permuted;
    permuted.min_gap = coords.min_gap;
    permuted.degenerate = coords.degenerate;
    permuted.lambdas = CVec(n);
    permuted.mu = CVec(n);
    permuted.mu_tilde = CVec(n);
    for (int i = 0; i < n; ++i) {
      permuted.lambdas[i] = coords.lambdas[match[i]];
      permuted.mu[i] = coords.mu[match[i]];
      permuted.mu_tilde[i] = coords.mu_tilde[match[i]];
    }
    traj.coord_tracks.push_back(std::move(permuted));
  }
  return traj;
}

namespace {

// Per-branch affine fit x_k(t) = slope t + intercept over the samples.
struct AffineFit {
  Vec slope, intercept;
  double residual = 0.0;
};

AffineFit fit_branches(const std::vector<double>& ts,
                       const std::vector<Vec>& positions) {
  const int m = static_cast<int>(ts.size());
  const int n = static_cast<int>(positions.front().size());
  Eigen::MatrixXd design(m, 2);
  for (int a = 0; a < m; ++a) {
    design(a, 0) = ts[a];
    design(a, 1) = 1.0;
  }
  const auto qr = design.colPivHouseholderQr();

  AffineFit fit;
  fit.slope = Vec(n);
  fit.intercept = Vec(n);
  for (int k = 0; k < n; ++k) {
    Vec rhs(m);
    for (int a = 0; a < m; ++a) rhs[a] = positions[a][k];
    const Eigen::Vector2d coef = qr.solve(rhs);
    fit.slope[k] = coef[0];
    fit.intercept[k] = coef[1];
    fit.residual = std::max(
        fit.residual, (design * coef - rhs).norm() / std::sqrt(double(m)));
  }
  return fit;
}

constexpr int kScatterSamples = 25;

AffineFit fit_window(const PhaseState& s, double lo, double hi) {
  std::vector<double> ts;
  std::vector<Vec> xs;
  for (int a = 0; a < kScatterSamples; ++a) {
    const double t = lo + (hi - lo) * a / (kScatterSamples - 1);
    ts.push_back(t);
    xs.push_back(exact_flow(s, t).x);
  }
  return fit_branches(ts, xs);
}

}  // namespace

ScatteringData scattering(const PhaseState& s, double t_max) {
  require_imaginary(s, "scattering");
  if (!(t_max > 0.0)) throw CmError(ErrorCode::InvalidInput, "t_max must be positive");
  const Spectrum sp = eigen_decompose(build_lax(s).L, s.coupling);
  if (sp.degenerate) {
    throw CmError(ErrorCode::DegenerateSpectrum,
                  "scattering needs distinct asymptotic momenta");
  }

  const AffineFit plus = fit_window(s, t_max / 2.0, t_max);
  const AffineFit minus = fit_window(s, -t_max, -t_max / 2.0);

  ScatteringData data;
  data.p_plus = plus.slope;
  data.x_plus = plus.intercept;
  data.p_minus = minus.slope;
  data.x_minus = minus.intercept;
  data.fit_residual = std::max(plus.residual, minus.residual);
  return data;
}

BracketReport asymptotic_momenta_check(const PhaseState& s, double t_max,
                                       double tol) {
  require_imaginary(s, "asymptotic_momenta_check");
  const SpectralCoords base = spectral_coords(build_lax(s));
  const int n = s.n;

  const auto coords_at = [&](double t) {
    return spectral_coords(build_lax(exact_flow(s, t)));
  };

  BracketReport report;
  report.check = "asymptotic-momenta";
  report.tolerance = tol;

  for (const int direction : {+1, -1}) {
    const double t1 = direction * t_max;
    const double t_half = direction * t_max / 2.0;
    const SpectralCoords far = coords_at(t1);
    const SpectralCoords mid = coords_at(t_half);

    // r_k = mu_tilde_k - lambda_k t is the combination that stabilizes;
    // r'_k = mu_tilde_k + lambda_k t keeps growing unless lambda_k = 0.
    CVec r_far(n), r_mid(n), rp_far(n), rp_mid(n);
    for (int k = 0; k < n; ++k) {
      r_far[k] = far.mu_tilde[k] - base.lambdas[k] * t1;
      r_mid[k] = mid.mu_tilde[k] - base.lambdas[k] * t_half;
      rp_far[k] = far.mu_tilde[k] + base.lambdas[k] * t1;
      rp_mid[k] = mid.mu_tilde[k] + base.lambdas[k] * t_half;
    }
    const auto stabilized = [&](const CVec& a, const CVec& b) {
      double worst = 0.0;
      for (int k = 0; k < n; ++k) {
        worst = std::max(worst,
                         std::abs(a[k] - b[k]) / std::max(1.0, std::abs(a[k])));
      }
      return worst <= 1e-3;
    };
    const bool minus_converges = stabilized(r_far, r_mid);
    const bool plus_converges = stabilized(rp_far, rp_mid);
    if (!minus_converges && !plus_converges) {
      throw CmError(ErrorCode::NoConvergence,
                    "neither mu_tilde -+ lambda t stabilized by t_max");
    }
    const CVec& limit = minus_converges ? r_far : rp_far;
    const char* combo = minus_converges ? "mu_tilde - lambda t" : "mu_tilde + lambda t";

    // Match the real part of each limit against the signed fitted intercepts.
    const ScatteringData fit = scattering(s, t_max);
    const Vec& intercepts = direction > 0 ? fit.x_plus : fit.x_minus;
    for (int k = 0; k < n; ++k) {
      double best = std::numeric_limits<double>::infinity();
      int best_j = -1, best_sign = +1;
      for (int j = 0; j < n; ++j) {
        for (const int sign : {+1, -1}) {
          const double d = std::abs(limit[k].real() - sign * intercepts[j]);
          if (d < best) {
            best = d;
            best_j = j;
            best_sign = sign;
          }
        }
      }
      std::ostringstream label;
      label << combo << " -> " << (best_sign > 0 ? "+" : "-") << "x^"
            << (direction > 0 ? "+" : "-");
      report.add(label.str(), k, best_j, limit[k].real(),
                 best_sign * intercepts[best_j]);
    }

    // O(1/t) approach: residual against the window-T fit scales like C/T.
    for (const double T : {t_max / 4.0, t_max / 2.0, t_max}) {
      const ScatteringData fit_T = scattering(s, T);
      const Vec& icp = direction > 0 ? fit_T.x_plus : fit_T.x_minus;
      const SpectralCoords at_T = coords_at(direction * T);
      double resid = 0.0;
      for (int k = 0; k < n; ++k) {
        const Complex r = minus_converges
                              ? at_T.mu_tilde[k] - base.lambdas[k] * (direction * T)
                              : at_T.mu_tilde[k] + base.lambdas[k] * (direction * T);
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
          for (const int sign : {+1, -1}) {
            best = std::min(best, std::abs(r.real() - sign * icp[j]));
          }
        }
        resid = std::max(resid, best);
      }
      std::ostringstream label;
      label << "rate residual*T/t_max at T=" << T << (direction > 0 ? " (+)" : " (-)");
      // Bounded C/T behaviour: resid * T / t_max <= tol uniformly in T.
      report.add(label.str(), 0, 0, resid * T / t_max, 0.0);
    }
  }
  report.finalize();
  return report;
}

}  // namespace cmlax
