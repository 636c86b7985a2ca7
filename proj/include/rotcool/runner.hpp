#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rotcool/config.hpp"
#include "rotcool/engine.hpp"

namespace rotcool {

// Rotor populations for one narrowband or broadband configuration.
struct RotorRun {
  MoleculeSpec spec;
  PopulationState initial;
  std::vector<PopulationState> states;   // at output_times(config)
  std::optional<PopulationState> steady;  // when run.steady_state is set
  std::vector<std::uint64_t> n_pulses;    // broadband: pulses applied up to each state
  std::optional<double> reference_K;      // analytic Doppler limit for this laser
  std::optional<double> equilibrium_J0;   // narrowband only
  double boundary_flux = 0.0;             // narrowband, final state
  std::vector<std::string> warnings;
};

RotorRun evaluate_rotor(const RunConfig& config);

// The state whose observables summarize a run: steady state if requested,
// else the last output, else the initial distribution.
const PopulationState& summary_state(const RotorRun& run);

struct RunReport {
  std::filesystem::path output_dir;
  std::vector<std::string> files;  // relative to output_dir
  std::vector<std::string> warnings;
};

// Hex SHA-256 of the canonical serialization of the configuration.
std::string config_sha256(const RunConfig& config);

// Runs the configured mode and writes its outputs plus manifest.json into
// config.output_dir. Scan points run on ROTCOOL_WORKERS threads (default:
// hardware concurrency); rows keep input order.
RunReport run(const RunConfig& config);

}  // namespace rotcool
