#pragma once

#include "spintherm/observables.hpp"
#include "spintherm/types.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace spintherm {

// JSON schema (all numbers double unless noted):
//   fields:     { B_L, B_M, B_R, theta }            theta defaults to 0
//   coupling:   { J_LM, J_MR, g: [gx, gy, gz] }     optional; default J = 0, g = (0,0,1)
//   reservoirs: { T_L, T_M, T_R, kappa_L, kappa_M, kappa_R }
//   initial:    { "bare_index": int } | { "eigen_populations": [8 doubles] }
//               | { "subspace_fraction": double }   optional; default fraction 0.5
//   tolerances: { eps_zero, eps_conn, dT }          optional per key
// Unknown keys are rejected with a diagnostic naming the offending field.
nlohmann::json config_to_json(const SystemConfig& config);
SystemConfig config_from_json(const nlohmann::json& j);

SystemConfig load_config(const std::string& path);
void write_config(const std::string& path, const SystemConfig& config);

// Shortest round-trip-exact decimal form of a double.
std::string format_g17(double x);

// CSV with header `sweep_value,Q_L,Q_M,Q_R,components,flag`.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

// Self-contained gnuplot script plotting Q_L, Q_M, Q_R columns of `csv_path`.
void write_plot_script(std::ostream& os, const std::string& csv_path,
                       const std::string& xlabel);

}  // namespace spintherm
