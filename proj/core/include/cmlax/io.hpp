#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "cmlax/dynamics.hpp"
#include "cmlax/lift.hpp"
#include "cmlax/poisson.hpp"

namespace cmlax {

// Complex numbers serialize as [re, im] pairs throughout.
nlohmann::json complex_to_json(const Complex& z);
Complex complex_from_json(const nlohmann::json& j);

nlohmann::json cvec_to_json(const CVec& v);
CVec cvec_from_json(const nlohmann::json& j);

// {"n": int, "coupling": "real"|"imaginary", "x": [float], "p": [float]}
nlohmann::json state_to_json(const PhaseState& s);
PhaseState state_from_json(const nlohmann::json& j);

// {"lambda": [[re,im]...], "mu": [...], "mu_tilde": [...],
//  "min_gap": float, "degenerate": bool}
nlohmann::json coords_to_json(const SpectralCoords& c);
SpectralCoords coords_from_json(const nlohmann::json& j);

// {"check": str, "entries": [{"i":..,"j":..,"value":[re,im],
//  "target":[re,im],"abs_err":..}], "pass": bool, "tolerance": float}
nlohmann::json report_to_json(const BracketReport& r);

nlohmann::json scattering_to_json(const ScatteringData& d);

// {"n": int, "A": [[[re,im],...],...], "B": ...}
nlohmann::json lifted_to_json(const lift::LiftedPoint& pt);
lift::LiftedPoint lifted_from_json(const nlohmann::json& j);

/// Header: t, x_1.., p_1.., lambda_1.., re_mu_1.., im_mu_1..,
/// re_mutilde_1.., im_mutilde_1.., energy. Requires coord_tracks.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Parses a PhaseState from a JSON file; throws InvalidInput on failure.
PhaseState load_state(const std::string& path);

}  // namespace cmlax
