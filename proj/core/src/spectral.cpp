#include "cmlax/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace cmlax {

CharData faddeev_leverrier(const CMat& L) {
  const int n = static_cast<int>(L.rows());
  if (n < 1 || L.cols() != n) {
    throw CmError(ErrorCode::InvalidInput, "faddeev_leverrier needs a square matrix");
  }
  CharData cd;
  cd.n = n;
  cd.delta = CVec::Zero(n + 1);
  cd.delta[n] = Complex(1.0, 0.0);
  cd.adj.assign(n, CMat());

  CMat M = CMat::Identity(n, n);
  for (int k = n - 1; k >= 0; --k) {
    cd.adj[k] = M;
    const CMat LM = L * M;
    const Complex c_k = -LM.trace() / static_cast<double>(n - k);
    cd.delta[k] = c_k;
    if (k > 0) M = LM + c_k * CMat::Identity(n, n);
  }
  return cd;
}

CMat adjugate_at(const CharData& cd, Complex lambda) {
  CMat acc = cd.adj[cd.n - 1];
  for (int k = cd.n - 2; k >= 0; --k) acc = lambda * acc + cd.adj[k];
  return acc;
}

double char_identity_residual(const CMat& L, const CharData& cd,
                              std::span<const Complex> probes) {
  const int n = cd.n;
  const CMat id = CMat::Identity(n, n);
  double worst = 0.0;
  for (const Complex lambda : probes) {
    const CMat lhs = (lambda * id - L) * adjugate_at(cd, lambda);
    const CMat rhs = delta_derivatives(cd, lambda).value * id;
    const double scale = std::max({1.0, lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff()});
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

std::vector<Complex> default_probes(int n) {
  // 0, 1, -1, 2, -2, ... gives n+1 distinct values.
  std::vector<Complex> probes;
  probes.reserve(n + 1);
  probes.emplace_back(0.0, 0.0);
  for (int k = 1; static_cast<int>(probes.size()) < n + 1; ++k) {
    probes.emplace_back(static_cast<double>(k), 0.0);
    if (static_cast<int>(probes.size()) < n + 1) {
      probes.emplace_back(static_cast<double>(-k), 0.0);
    }
  }
  return probes;
}

namespace {

double pairwise_min_gap(const CVec& lambdas) {
  const int n = static_cast<int>(lambdas.size());
  if (n < 2) return std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      gap = std::min(gap, std::abs(lambdas[i] - lambdas[j]));
    }
  }
  return gap;
}

std::vector<int> sort_permutation(const CVec& lambdas) {
  std::vector<int> perm(lambdas.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](int a, int b) {
    if (lambdas[a].real() != lambdas[b].real()) {
      return lambdas[a].real() < lambdas[b].real();
    }
    return lambdas[a].imag() < lambdas[b].imag();
  });
  return perm;
}

}  // namespace

Spectrum eigen_decompose(const CMat& L, Coupling coupling) {
  const int n = static_cast<int>(L.rows());
  if (n < 1 || L.cols() != n || !L.allFinite()) {
    throw CmError(ErrorCode::InvalidInput, "eigen_decompose needs a finite square matrix");
  }
  Spectrum sp;
  if (coupling == Coupling::Imaginary) {
    Eigen::SelfAdjointEigenSolver<CMat> solver(L);
    if (solver.info() != Eigen::Success) {
      throw CmError(ErrorCode::EvalFailure, "self-adjoint eigensolver failed");
    }
    sp.lambdas = solver.eigenvalues().cast<Complex>();  // ascending, real
    sp.right = solver.eigenvectors();
    sp.left = sp.right.adjoint();
  } else {
    Eigen::ComplexEigenSolver<CMat> solver(L);
    if (solver.info() != Eigen::Success) {
      throw CmError(ErrorCode::EvalFailure, "complex eigensolver failed");
    }
    const std::vector<int> perm = sort_permutation(solver.eigenvalues());
    sp.lambdas = CVec(n);
    sp.right = CMat(n, n);
    for (int i = 0; i < n; ++i) {
      sp.lambdas[i] = solver.eigenvalues()[perm[i]];
      sp.right.col(i) = solver.eigenvectors().col(perm[i]);
    }
    sp.left = sp.right.inverse();
  }
  sp.min_gap = pairwise_min_gap(sp.lambdas);
  sp.degenerate = sp.min_gap < kGapFactor * std::max(1.0, L.norm());
  return sp;
}

Complex gen_G(const CharData& cd, const Vec& x, Complex lambda) {
  // tr(X M_k) = sum_i x_i (M_k)_ii
  Complex acc(0.0, 0.0);
  for (int k = cd.n - 1; k >= 0; --k) {
    const Complex tr_xm = (x.array().cast<Complex>() * cd.adj[k].diagonal().array()).sum();
    acc = acc * lambda + tr_xm;
  }
  return acc;
}

Complex gen_E(const CharData& cd, const Vec& x, Complex lambda) {
  Complex acc(0.0, 0.0);
  for (int k = cd.n - 1; k >= 0; --k) {
    const Complex xme = (x.transpose().cast<Complex>() * cd.adj[k]).sum();
    acc = acc * lambda + xme;
  }
  return acc;
}

DeltaJet delta_derivatives(const CharData& cd, Complex lambda) {
  Complex v(0.0, 0.0), d1(0.0, 0.0), d2(0.0, 0.0);
  for (int k = cd.n; k >= 0; --k) {
    d2 = d2 * lambda + 2.0 * d1;
    d1 = d1 * lambda + v;
    v = v * lambda + cd.delta[k];
  }
  return DeltaJet{v, d1, d2};
}

SpectralCoords spectral_coords(const LaxPair& pair) {
  const Spectrum sp = eigen_decompose(pair.L, pair.coupling);
  if (sp.degenerate) {
    std::ostringstream msg;
    msg << "eigenvalue gap " << sp.min_gap << " too small for spectral coordinates";
    throw CmError(ErrorCode::DegenerateSpectrum, msg.str());
  }
  const CharData cd = faddeev_leverrier(pair.L);
  const Vec ones = Vec::Ones(pair.n());

  SpectralCoords out;
  out.lambdas = sp.lambdas;
  out.min_gap = sp.min_gap;
  out.degenerate = false;
  out.mu = CVec(pair.n());
  out.mu_tilde = CVec(pair.n());
  for (int i = 0; i < pair.n(); ++i) {
    const Complex lam = sp.lambdas[i];
    const DeltaJet jet = delta_derivatives(cd, lam);
    // e^T (lambda_i - L)^v e must reproduce Delta'(lambda_i).
    const Complex eae = gen_E(cd, ones, lam);
    const double dev = std::abs(eae - jet.d1) / std::max(1.0, std::abs(jet.d1));
    if (dev > 1e-9) {
      std::ostringstream msg;
      msg << "e^T adj e vs Delta' deviates by " << dev << " at eigenvalue " << i;
      throw CmError(ErrorCode::EvalFailure, msg.str());
    }
    out.mu[i] = gen_G(cd, pair.x, lam) / jet.d1;
    out.mu_tilde[i] = gen_E(cd, pair.x, lam) / jet.d1;
  }
  return out;
}

CVec eigenvector_coords(const LaxPair& pair) {
  const Spectrum sp = eigen_decompose(pair.L, pair.coupling);
  if (sp.degenerate) {
    throw CmError(ErrorCode::DegenerateSpectrum, "eigenvector formula needs simple spectrum");
  }
  const int n = pair.n();
  CVec out(n);
  for (int i = 0; i < n; ++i) {
    const CVec psi = sp.right.col(i);
    const Complex denom = psi.sum();
    if (std::abs(denom) < 1e-12 * psi.norm()) {
      throw CmError(ErrorCode::NormalizationFailure,
                    "eigenvector has vanishing component sum");
    }
    const Complex num = (pair.x.array().cast<Complex>() * psi.array()).sum();
    out[i] = num / denom;
  }
  return out;
}

double conjecture_residual(const LaxPair& pair, std::span<const Complex> probes,
                           Complex scale) {
  const CharData cd = faddeev_leverrier(pair.L);
  double worst = 0.0;
  for (const Complex lambda : probes) {
    const DeltaJet jet = delta_derivatives(cd, lambda);
    const Complex diff = gen_E(cd, pair.x, lambda) - gen_G(cd, pair.x, lambda) -
                         scale * 0.5 * jet.d2;
    worst = std::max(worst, std::abs(diff) / std::max(1.0, std::abs(jet.d2)));
  }
  return worst;
}

}  // namespace cmlax
