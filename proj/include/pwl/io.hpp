#pragma once

#include "pwl/canard.hpp"
#include "pwl/hybrid.hpp"
#include "pwl/mmo.hpp"
#include "pwl/planar.hpp"
#include "pwl/singular.hpp"

#include <iosfwd>
#include <string>

// Single-header nlohmann/json lives in vendor/ as json.hpp.
#include "json.hpp"

namespace pwl::io {

using json = nlohmann::json;

/// 17-significant-digit decimal formatting used for every CSV number.
std::string fmt(double v);

/// CSV schema: t,x,y,z,zone (the z column is omitted for planar trajectories).
void write_trajectory_csv(std::ostream& os, const hybrid::Trajectory& traj, int dimension);
void write_trajectory_csv(const std::string& path, const hybrid::Trajectory& traj,
                          int dimension);

json classification_json(const geometry::SingularityClass& cls);
json canard_json(const canard::CanardSolution& sol);
json canard_search_json(const Params& params, const canard::CanardSearch& search);
json selected_json(const canard::SelectedCanard& sel);
json portrait_json(const singular::SingularPortrait& portrait);
json cycle_json(const planar::Cycle& cycle);
json scan_json(const planar::ExplosionScan& scan);
json transient_json(const planar::TransientMmo& tm);
json periodic_orbit_json(const mmo::PeriodicOrbit& orbit);
json signature_json(const mmo::MmoSignature& sig);

void write_json(const std::string& path, const json& j);

}  // namespace pwl::io
