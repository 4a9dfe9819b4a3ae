#include "cmlax/lift.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

namespace cmlax::lift {

namespace {

CMat entrywise_gradient(const std::function<Complex(const CMat&)>& eval,
                        const CMat& m, double step_scale) {
  const int n = static_cast<int>(m.rows());
  CMat grad(n, n);
  CMat probe = m;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double h = step_scale * std::max(1.0, std::abs(m(i, j)));
      const Complex saved = probe(i, j);
      probe(i, j) = saved + h;
      const Complex up = eval(probe);
      probe(i, j) = saved - h;
      const Complex down = eval(probe);
      probe(i, j) = saved;
      // trace convention: (grad)_ji = d f / d A_ij
      grad(j, i) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

}  // namespace

MatrixGradient matrix_gradient(const MatrixObservable& f, const LiftedPoint& pt,
                               double step_scale) {
  MatrixGradient grad;
  grad.dA = entrywise_gradient(
      [&](const CMat& a) { return f.eval(LiftedPoint{a, pt.B}); }, pt.A,
      step_scale);
  grad.dB = entrywise_gradient(
      [&](const CMat& b) { return f.eval(LiftedPoint{pt.A, b}); }, pt.B,
      step_scale);
  return grad;
}

Complex bracket1_from_gradients(const MatrixGradient& f, const MatrixGradient& g,
                                const LiftedPoint& pt) {
  // <(A,B), [dg, df]> with [(a1,b1),(a2,b2)] = (b1 a2 - b2 a1, [b1, b2]).
  // The B-slot orientation [g_B, f_B] is forced by the Jacobi identity once
  // the A-slot is pinned by the bracket tables and the freezing.
  const CMat a_part = g.dB * f.dA - f.dB * g.dA;
  const CMat b_part = g.dB * f.dB - f.dB * g.dB;
  return (pt.A * a_part).trace() + (pt.B * b_part).trace();
}

Complex bracket0_from_gradients(const MatrixGradient& f, const MatrixGradient& g) {
  return (g.dB * f.dA - f.dB * g.dA).trace();
}

Complex bracket1(const MatrixObservable& f, const MatrixObservable& g,
                 const LiftedPoint& pt) {
  return bracket1_from_gradients(matrix_gradient(f, pt), matrix_gradient(g, pt), pt);
}

Complex bracket0(const MatrixObservable& f, const MatrixObservable& g,
                 const LiftedPoint& pt) {
  return bracket0_from_gradients(matrix_gradient(f, pt), matrix_gradient(g, pt));
}

Complex bracket_pencil(const MatrixObservable& f, const MatrixObservable& g,
                       const LiftedPoint& pt, double pencil_lambda) {
  const MatrixGradient fg = matrix_gradient(f, pt);
  const MatrixGradient gg = matrix_gradient(g, pt);
  return bracket0_from_gradients(fg, gg) +
         pencil_lambda * bracket1_from_gradients(fg, gg, pt);
}

MatrixObservable obs_H(int k) {
  std::ostringstream os;
  os << "H_" << k;
  return MatrixObservable{os.str(), [k](const LiftedPoint& pt) {
                            CMat power = pt.A;
                            for (int m = 1; m < k; ++m) power = power * pt.A;
                            return power.trace() / static_cast<double>(k);
                          }};
}

MatrixObservable obs_entry_A(int i, int j) {
  std::ostringstream os;
  os << "A_" << i << j;
  return MatrixObservable{os.str(),
                          [i, j](const LiftedPoint& pt) { return pt.A(i, j); }};
}

MatrixObservable obs_entry_B(int i, int j) {
  std::ostringstream os;
  os << "B_" << i << j;
  return MatrixObservable{os.str(),
                          [i, j](const LiftedPoint& pt) { return pt.B(i, j); }};
}

namespace {

std::vector<MatrixObservable> coordinate_observables(int n) {
  std::vector<MatrixObservable> coords;
  coords.reserve(2 * n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) coords.push_back(obs_entry_A(i, j));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) coords.push_back(obs_entry_B(i, j));
  }
  return coords;
}

}  // namespace

double jacobi_check(double pencil_lambda, const LiftedPoint& pt, int trials,
                    std::uint64_t seed) {
  const int n = pt.n();
  if (n > 3) {
    throw CmError(ErrorCode::InvalidInput, "jacobi_check is brute force; n <= 3");
  }
  const std::vector<MatrixObservable> coords = coordinate_observables(n);
  const int dim = static_cast<int>(coords.size());

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, dim - 1);

  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    int fi = pick(rng), gi = pick(rng), hi = pick(rng);
    while (gi == fi) gi = pick(rng);
    while (hi == fi || hi == gi) hi = pick(rng);

    // {{f,g},h} + cyclic, the inner bracket differentiated as a function.
    const auto outer = [&](const MatrixObservable& a, const MatrixObservable& b,
                           const MatrixObservable& c) {
      const MatrixObservable inner{
          "{" + a.name + "," + b.name + "}",
          [&](const LiftedPoint& q) { return bracket_pencil(a, b, q, pencil_lambda); }};
      return bracket_pencil(inner, c, pt, pencil_lambda);
    };
    const Complex cyc = outer(coords[fi], coords[gi], coords[hi]) +
                        outer(coords[gi], coords[hi], coords[fi]) +
                        outer(coords[hi], coords[fi], coords[gi]);
    worst = std::max(worst, std::abs(cyc));
  }
  return worst;
}

BracketReport hierarchy_check(const LiftedPoint& pt, int k_max, double tol) {
  const int n = pt.n();
  if (k_max < 1 || k_max > n) {
    throw CmError(ErrorCode::IndexOutOfRange, "hierarchy_check needs 1 <= k_max <= n");
  }
  const std::vector<MatrixObservable> coords = coordinate_observables(n);

  BracketReport report;
  report.check = "lift-hierarchy";
  report.tolerance = tol;

  std::vector<MatrixGradient> coord_grads;
  coord_grads.reserve(coords.size());
  for (const auto& c : coords) coord_grads.push_back(matrix_gradient(c, pt));

  for (int k = 1; k <= k_max; ++k) {
    const MatrixGradient grad_hk = matrix_gradient(obs_H(k), pt);
    const MatrixGradient grad_hk1 = matrix_gradient(obs_H(k + 1), pt);
    CMat a_power = CMat::Identity(n, n);
    for (int m = 1; m < k; ++m) a_power = a_power * pt.A;

    for (std::size_t c = 0; c < coords.size(); ++c) {
      // X_k = -P_0 dH_k has components (0, A^{k-1}): the directional
      // derivative of f along it is tr(f_B A^{k-1}) = {H_k, f}_0.
      const Complex field_value =
          bracket0_from_gradients(grad_hk, coord_grads[c]);
      const Complex expected = (coord_grads[c].dB * a_power).trace();
      report.add("{H_k,f}_0 = <df,(0,A^{k-1})>", k, static_cast<int>(c),
                 field_value, expected);

      const Complex lenard_lhs =
          bracket0_from_gradients(coord_grads[c], grad_hk1);
      const Complex lenard_rhs =
          bracket1_from_gradients(coord_grads[c], grad_hk, pt);
      report.add("{f,H_k+1}_0 = {f,H_k}_1", k, static_cast<int>(c), lenard_lhs,
                 lenard_rhs);
    }
  }
  report.finalize();
  return report;
}

BracketReport nijenhuis_spectrum_check(const LiftedPoint& pt, double tol) {
  const int n = pt.n();
  if (n > 3) {
    throw CmError(ErrorCode::InvalidInput, "nijenhuis_spectrum_check is dense; n <= 3");
  }
  const std::vector<MatrixObservable> coords = coordinate_observables(n);
  const int dim = static_cast<int>(coords.size());

  std::vector<MatrixGradient> grads;
  grads.reserve(dim);
  for (const auto& c : coords) grads.push_back(matrix_gradient(c, pt));

  CMat p0(dim, dim), p1(dim, dim);
  for (int u = 0; u < dim; ++u) {
    for (int v = 0; v < dim; ++v) {
      p0(u, v) = bracket0_from_gradients(grads[u], grads[v]);
      p1(u, v) = bracket1_from_gradients(grads[u], grads[v], pt);
    }
  }
  const CMat n_star = Eigen::PartialPivLU<CMat>(p0).solve(p1);

  Eigen::ComplexEigenSolver<CMat> solver(n_star);
  if (solver.info() != Eigen::Success) {
    throw CmError(ErrorCode::EvalFailure, "eigensolver failed on N*");
  }
  const CVec n_eigs = solver.eigenvalues();
  const CVec a_eigs = Eigen::ComplexEigenSolver<CMat>(pt.A).eigenvalues();

  const double scale = std::max(1.0, pt.A.norm());
  const double cluster_tol = std::max(tol, 1e-8) * scale;

  double a_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      a_gap = std::min(a_gap, std::abs(a_eigs[i] - a_eigs[j]));
    }
  }

  BracketReport report;
  report.check = "lift-nijenhuis-spectrum";
  report.tolerance = tol;
  if (n > 1 && a_gap < 1e-6 * scale) {
    report.add("DEGENERATE: spec(A) gap below threshold", 0, 0, a_gap, a_gap);
  }

  // Every eigenvalue of N* sits on spec(A) and vice versa.
  for (int u = 0; u < dim; ++u) {
    double nearest = std::numeric_limits<double>::infinity();
    int arg = -1;
    for (int j = 0; j < n; ++j) {
      const double d = std::abs(n_eigs[u] - a_eigs[j]);
      if (d < nearest) {
        nearest = d;
        arg = j;
      }
    }
    report.add("eig(N*) on spec(A)", u, arg, n_eigs[u], a_eigs[arg]);
  }
  for (int j = 0; j < n; ++j) {
    double nearest = std::numeric_limits<double>::infinity();
    for (int u = 0; u < dim; ++u) {
      nearest = std::min(nearest, std::abs(n_eigs[u] - a_eigs[j]));
    }
    report.add("spec(A) attained by eig(N*)", j, j, nearest, 0.0);
  }

  // Even multiplicity: greedily cluster the N* eigenvalues.
  std::vector<bool> taken(dim, false);
  for (int u = 0; u < dim; ++u) {
    if (taken[u]) continue;
    int count = 0;
    for (int v = 0; v < dim; ++v) {
      if (!taken[v] && std::abs(n_eigs[v] - n_eigs[u]) <= cluster_tol) {
        taken[v] = true;
        ++count;
      }
    }
    report.add("even multiplicity of cluster", u, count,
               static_cast<double>(count % 2), 0.0);
  }
  report.finalize();
  return report;
}

}  // namespace cmlax::lift
