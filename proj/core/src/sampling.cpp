#include "cmlax/sampling.hpp"

#include <algorithm>

#include "cmlax/spectral.hpp"

namespace cmlax {

PhaseState random_state(int n, Coupling coupling, std::mt19937_64& rng,
                        double min_gap) {
  if (n < 1) throw CmError(ErrorCode::InvalidInput, "n must be >= 1");
  std::uniform_real_distribution<double> pos(-double(n), double(n));
  std::uniform_real_distribution<double> mom(-1.0, 1.0);

  PhaseState s;
  s.n = n;
  s.coupling = coupling;
  s.x = Vec(n);
  s.p = Vec(n);

  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<double> xs(n);
    for (double& v : xs) v = pos(rng);
    std::sort(xs.begin(), xs.end());
    bool ok = true;
    for (int i = 0; i + 1 < n; ++i) {
      if (xs[i + 1] - xs[i] < min_gap) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    for (int i = 0; i < n; ++i) s.x[i] = xs[i];
    for (int i = 0; i < n; ++i) s.p[i] = mom(rng);
    return s;
  }
  throw CmError(ErrorCode::InvalidInput, "rejection sampling failed to place particles");
}

PhaseState random_regular_state(int n, Coupling coupling, std::mt19937_64& rng,
                                double spectral_gap) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    PhaseState s = random_state(n, coupling, rng);
    const Spectrum sp = eigen_decompose(build_lax(s).L, coupling);
    if (!sp.degenerate && sp.min_gap >= spectral_gap) return s;
  }
  throw CmError(ErrorCode::DegenerateSpectrum,
                "could not sample a state with a comfortably simple spectrum");
}

lift::LiftedPoint random_lifted_point(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  lift::LiftedPoint pt;
  pt.A = CMat(n, n);
  pt.B = CMat(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      pt.A(i, j) = Complex(u(rng), u(rng));
      pt.B(i, j) = Complex(u(rng), u(rng));
    }
  }
  return pt;
}

}  // namespace cmlax
