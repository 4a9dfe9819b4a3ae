#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "cmlax/phase.hpp"
#include "cmlax/report.hpp"

namespace cmlax::lift {

/// A point of the unreduced space: a pair of square matrices (A, B).
struct LiftedPoint {
  CMat A;
  CMat B;

  int n() const { return static_cast<int>(A.rows()); }
};

/// Scalar function of a lifted point. Built-ins are polynomial in the
/// entries, so real-step central differences recover the holomorphic
/// derivatives exactly up to roundoff.
struct MatrixObservable {
  std::string name;
  std::function<Complex(const LiftedPoint&)> eval;
};

/// Gradient pair in the trace convention: df = tr(dA . deltaA) +
/// tr(dB . deltaB), i.e. (dA)_ij = d f / d A_ji.
struct MatrixGradient {
  CMat dA;
  CMat dB;
};

/// Entrywise central differences, step = step_scale * max(1, |entry|).
MatrixGradient matrix_gradient(const MatrixObservable& f, const LiftedPoint& pt,
                               double step_scale = 1e-6);

/// Lie-Poisson bracket of the semidirect-product structure:
/// {f,g}_1 = tr(A (g_B f_A - f_B g_A)) + tr(B [g_B, f_B]).
Complex bracket1(const MatrixObservable& f, const MatrixObservable& g,
                 const LiftedPoint& pt);
Complex bracket1_from_gradients(const MatrixGradient& f, const MatrixGradient& g,
                                const LiftedPoint& pt);

/// The freezing of bracket1 at (Id, 0): {f,g}_0 = tr(g_B f_A - f_B g_A),
/// the canonical bracket of sum dB_ij ^ dA_ji.
Complex bracket0(const MatrixObservable& f, const MatrixObservable& g,
                 const LiftedPoint& pt);
Complex bracket0_from_gradients(const MatrixGradient& f, const MatrixGradient& g);

/// {f,g}_0 + pencil_lambda {f,g}_1.
Complex bracket_pencil(const MatrixObservable& f, const MatrixObservable& g,
                       const LiftedPoint& pt, double pencil_lambda);

/// Max cyclic Jacobi sum |{{f,g},h} + {{g,h},f} + {{h,f},g}| of the pencil
/// bracket over randomly sampled triples of coordinate-entry observables.
/// The outer bracket differentiates the inner bracket's value function by
/// finite differences. Brute force; n <= 3.
double jacobi_check(double pencil_lambda, const LiftedPoint& pt, int trials,
                    std::uint64_t seed = 12345);

// Observable factories.
MatrixObservable obs_H(int k);                 // tr(A^k)/k
MatrixObservable obs_entry_A(int i, int j);
MatrixObservable obs_entry_B(int i, int j);

/// (a) The bracket0 flow of H_k is the field (0, A^{k-1}): checks
/// {H_k, f}_0 = <df, (0, A^{k-1})> for every entry observable f.
/// (b) Lenard: {f, H_{k+1}}_0 = {f, H_k}_1. k runs 1..k_max <= n.
BracketReport hierarchy_check(const LiftedPoint& pt, int k_max,
                              double tol = 1e-6);

/// Assembles N^* = P_0^{-1} P_1 on coordinate covectors (a 2n^2 x 2n^2
/// matrix) and checks that its distinct eigenvalues are those of A, each
/// with even multiplicity. n <= 3. A nearly-degenerate spectrum of A is
/// flagged in the report, not an error.
BracketReport nijenhuis_spectrum_check(const LiftedPoint& pt, double tol = 1e-6);

}  // namespace cmlax::lift
