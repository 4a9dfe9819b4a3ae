#include "cmlax/io.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

namespace cmlax {

using nlohmann::json;

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw CmError(ErrorCode::InvalidInput, "complex values serialize as [re, im]");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

json cvec_to_json(const CVec& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v[i]));
  return arr;
}

CVec cvec_from_json(const json& j) {
  CVec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = complex_from_json(j[i]);
  return v;
}

json state_to_json(const PhaseState& s) {
  json j;
  j["n"] = s.n;
  j["coupling"] = s.coupling == Coupling::Real ? "real" : "imaginary";
  j["x"] = std::vector<double>(s.x.data(), s.x.data() + s.x.size());
  j["p"] = std::vector<double>(s.p.data(), s.p.data() + s.p.size());
  return j;
}

PhaseState state_from_json(const json& j) {
  try {
    PhaseState s;
    s.n = j.at("n").get<int>();
    const std::string coupling = j.at("coupling").get<std::string>();
    if (coupling == "real") {
      s.coupling = Coupling::Real;
    } else if (coupling == "imaginary") {
      s.coupling = Coupling::Imaginary;
    } else {
      throw CmError(ErrorCode::InvalidInput, "coupling must be 'real' or 'imaginary'");
    }
    const auto xs = j.at("x").get<std::vector<double>>();
    const auto ps = j.at("p").get<std::vector<double>>();
    s.x = Eigen::Map<const Vec>(xs.data(), xs.size());
    s.p = Eigen::Map<const Vec>(ps.data(), ps.size());
    validate_state(s);
    return s;
  } catch (const json::exception& err) {
    throw CmError(ErrorCode::InvalidInput, std::string("malformed state: ") + err.what());
  }
}

json coords_to_json(const SpectralCoords& c) {
  json j;
  j["lambda"] = cvec_to_json(c.lambdas);
  j["mu"] = cvec_to_json(c.mu);
  j["mu_tilde"] = cvec_to_json(c.mu_tilde);
  j["min_gap"] = c.min_gap;
  j["degenerate"] = c.degenerate;
  return j;
}

SpectralCoords coords_from_json(const json& j) {
  try {
    SpectralCoords c;
    c.lambdas = cvec_from_json(j.at("lambda"));
    c.mu = cvec_from_json(j.at("mu"));
    c.mu_tilde = cvec_from_json(j.at("mu_tilde"));
    c.min_gap = j.at("min_gap").get<double>();
    c.degenerate = j.at("degenerate").get<bool>();
    return c;
  } catch (const json::exception& err) {
    throw CmError(ErrorCode::InvalidInput,
                  std::string("malformed coordinates: ") + err.what());
  }
}

json report_to_json(const BracketReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"label", e.label},
                       {"i", e.i},
                       {"j", e.j},
                       {"value", complex_to_json(e.value)},
                       {"target", complex_to_json(e.target)},
                       {"abs_err", e.abs_err}});
  }
  return json{{"check", r.check},
              {"entries", std::move(entries)},
              {"tolerance", r.tolerance},
              {"max_abs_err", r.max_abs_err},
              {"pass", r.pass}};
}

json scattering_to_json(const ScatteringData& d) {
  const auto vec = [](const Vec& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  return json{{"p_plus", vec(d.p_plus)},
              {"p_minus", vec(d.p_minus)},
              {"x_plus", vec(d.x_plus)},
              {"x_minus", vec(d.x_minus)},
              {"fit_residual", d.fit_residual}};
}

json lifted_to_json(const lift::LiftedPoint& pt) {
  const auto mat = [](const CMat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (int j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  return json{{"n", pt.n()}, {"A", mat(pt.A)}, {"B", mat(pt.B)}};
}

lift::LiftedPoint lifted_from_json(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    const auto mat = [n](const json& rows) {
      CMat m(n, n);
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) m(i, k) = complex_from_json(rows.at(i).at(k));
      }
      return m;
    };
    return lift::LiftedPoint{mat(j.at("A")), mat(j.at("B"))};
  } catch (const json::exception& err) {
    throw CmError(ErrorCode::InvalidInput,
                  std::string("malformed lifted point: ") + err.what());
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  if (traj.coord_tracks.size() != traj.states.size()) {
    throw CmError(ErrorCode::InvalidInput,
                  "trajectory must be coordinate-tracked before CSV export");
  }
  const int n = traj.states.empty() ? 0 : traj.states.front().n;
  os << "t";
  for (int i = 1; i <= n; ++i) os << ",x_" << i;
  for (int i = 1; i <= n; ++i) os << ",p_" << i;
  for (int i = 1; i <= n; ++i) os << ",lambda_" << i;
  for (int i = 1; i <= n; ++i) os << ",re_mu_" << i;
  for (int i = 1; i <= n; ++i) os << ",im_mu_" << i;
  for (int i = 1; i <= n; ++i) os << ",re_mutilde_" << i;
  for (int i = 1; i <= n; ++i) os << ",im_mutilde_" << i;
  os << ",energy\n";

  os << std::setprecision(17);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const PhaseState& s = traj.states[k];
    const SpectralCoords& c = traj.coord_tracks[k];
    os << traj.times[k];
    for (int i = 0; i < n; ++i) os << "," << s.x[i];
    for (int i = 0; i < n; ++i) os << "," << s.p[i];
    for (int i = 0; i < n; ++i) os << "," << c.lambdas[i].real();
    for (int i = 0; i < n; ++i) os << "," << c.mu[i].real();
    for (int i = 0; i < n; ++i) os << "," << c.mu[i].imag();
    for (int i = 0; i < n; ++i) os << "," << c.mu_tilde[i].real();
    for (int i = 0; i < n; ++i) os << "," << c.mu_tilde[i].imag();
    os << "," << traj.energy[k] << "\n";
  }
}

PhaseState load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw CmError(ErrorCode::InvalidInput, "cannot open state file: " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& err) {
    throw CmError(ErrorCode::InvalidInput, std::string("bad JSON: ") + err.what());
  }
  return state_from_json(j);
}

}  // namespace cmlax
