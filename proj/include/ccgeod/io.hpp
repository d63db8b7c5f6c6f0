#pragma once

#include <string>

#include "ccgeod/asymptotics.hpp"
#include "ccgeod/chart.hpp"
#include "ccgeod/integrate.hpp"
#include "ccgeod/shoot.hpp"

namespace ccgeod {

// Writes content to path via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

// Trajectory CSV: '#'-prefixed metadata (chart, kind, termination), then a
// header row and one row per sample.  Columns are the parameter, the state
// components in packed order, rho and the energy.
std::string trajectory_csv(const FermiChart& chart, const Trajectory& traj);
void write_trajectory_csv(const FermiChart& chart, const Trajectory& traj,
                          const std::string& path);

// Reads back a trajectory CSV produced by trajectory_csv; rho and energy
// columns are ignored.
Trajectory read_trajectory_csv(const std::string& path);

std::string shoot_result_json(const ShootResult& result, const std::string& trajectory_file);
std::string expansion_fit_json(const ExpansionFit& fit);
std::string endpoint_jacobian_json(const EndpointJacobian& jac);

}  // namespace ccgeod
