#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rotcool/classical.hpp"
#include "rotcool/engine.hpp"
#include "rotcool/structure.hpp"
#include "rotcool/toml_lite.hpp"

namespace rotcool {

enum class RunMode { classical_cw, classical_sech, narrowband, broadband, fortrat, scan };

std::string_view to_string(RunMode m);
std::string_view to_string(PropagationMethod m);

// [molecule]; b_upper_hz defaults to b_lower_hz, j_max 0 picks the thermal default.
struct MoleculeConfig {
  double b_lower_hz = 0.0;
  std::optional<double> b_upper_hz;
  int lambda_lower = 0;
  int lambda_upper = 0;
  double q_lower_hz = 0.0;
  double gamma_over_2pi_hz = 0.0;
  int j_max = 0;

  friend bool operator==(const MoleculeConfig&, const MoleculeConfig&) = default;
};

// [laser]. Lifetime-broadened modes use s0, s_b, s_total, delta_over_gamma;
// pulsed modes use tau_p_s, rep_period_s (default 7/gamma), one of
// theta0_rad / theta0_over_pi, and delta_tau_p.
struct LaserConfig {
  std::optional<double> s0;
  std::optional<double> s_b;
  std::optional<double> s_total;
  std::optional<double> delta_over_gamma;
  std::optional<double> tau_p_s;
  std::optional<double> rep_period_s;
  std::optional<double> theta0_rad;
  std::optional<double> theta0_over_pi;
  std::optional<double> delta_tau_p;

  friend bool operator==(const LaserConfig&, const LaserConfig&) = default;
};

enum class TimeSpacing { linear, log };

// [run]
struct RunSection {
  double initial_t_k = 0.0;
  double duration_s = 0.0;                  // 0 skips time evolution
  std::vector<double> output_times_s;       // explicit; otherwise n_outputs with spacing
  int n_outputs = 40;
  TimeSpacing spacing = TimeSpacing::log;
  PropagationMethod method = PropagationMethod::uniformization;
  bool steady_state = false;
  int fit_j_max = 15;
  int cooled_j_cut = 30;

  friend bool operator==(const RunSection&, const RunSection&) = default;
};

// [classical]
struct ClassicalSection {
  DofMode dof = DofMode::translation;
  std::optional<double> mass_amu;
  std::optional<double> wavelength_m;
  std::optional<double> inertia_kg_m2;     // rotation; else from molecule.b_lower_hz
  int n_particles = 0;                     // 0 writes the damping curve only
  double t_end_s = 0.0;
  double dt_s = 0.0;
  double initial_t_k = 0.0;
  std::int64_t seed = 1;
  int n_samples = 200;
  double curve_x_min = -2.0;
  double curve_x_max = 2.0;
  int curve_points = 401;

  friend bool operator==(const ClassicalSection&, const ClassicalSection&) = default;
};

// [scan]; rows are the outer x inner product in input order.
struct ScanSection {
  RunMode point_mode = RunMode::narrowband;
  std::string parameter;
  std::vector<double> values;
  std::string outer_parameter;
  std::vector<double> outer_values;

  friend bool operator==(const ScanSection&, const ScanSection&) = default;
};

struct RunConfig {
  RunMode mode = RunMode::narrowband;
  std::string output_dir = "out";
  MoleculeConfig molecule;
  LaserConfig laser;
  RunSection run;
  ClassicalSection classical;
  ScanSection scan;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Parsing checks types, rejects unknown keys, and validates the fields the
// mode needs; errors are ValidationError naming the field.
RunConfig parse_config(const toml::Document& doc);
RunConfig parse_config_text(std::string_view text, std::string_view source = "config");
RunConfig load_config(const std::string& path);

toml::Document to_document(const RunConfig& config);
std::string serialize_config(const RunConfig& config);

// Copy of a scan config as a single point of point_mode with the scanned
// keys set.
RunConfig scan_point(const RunConfig& scan, double value, std::optional<double> outer_value);

// Physical objects resolved from a validated config.
double gamma_rad_s(const RunConfig& c);
MoleculeSpec molecule_spec(const RunConfig& c);  // resolves j_max
NarrowbandLaser narrowband_laser(const RunConfig& c);
SechPulseTrain sech_pulse(const RunConfig& c);
CwLaser classical_cw_laser(const RunConfig& c, const DegreeOfFreedom& dof);
DegreeOfFreedom classical_dof(const RunConfig& c);
std::vector<double> output_times(const RunConfig& c);

}  // namespace rotcool
