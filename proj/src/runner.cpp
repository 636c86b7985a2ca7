#include "rotcool/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "rotcool/constants.hpp"
#include "rotcool/errors.hpp"
#include "rotcool/monte_carlo.hpp"
#include "rotcool/rates.hpp"

namespace rotcool {

using nlohmann::json;

namespace {

std::optional<double> optional_limit(auto&& f) {
  try {
    return f();
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

RotorRun evaluate_narrowband(const RunConfig& c, RotorRun out) {
  const NarrowbandLaser laser = narrowband_laser(c);
  const RateGenerator gen = build_generator(out.spec, laser);
  const double gamma = out.spec.gamma_rad_s;
  const double b = out.spec.b_lower_hz;
  out.reference_K = optional_limit(
      [&] { return doppler_limit_general(laser.detuning_rad_s, b, gamma, laser.saturation); });
  out.equilibrium_J0 = equilibrium_J0(laser.detuning_rad_s, b, gamma, laser.saturation);
  if (!out.equilibrium_J0) out.warnings.push_back("no cooling fixed point at this detuning");

  const auto times = output_times(c);
  if (!times.empty()) out.states = propagate(gen, out.initial, times, c.run.method);
  if (c.run.steady_state) out.steady = steady_state(gen.G, out.initial);

  out.boundary_flux = boundary_flux_fraction(gen, summary_state(out).p);
  if (out.boundary_flux > kBoundaryFluxWarning) {
    out.warnings.push_back(fmt::format(
        "boundary flux fraction {:.3g} exceeds {:.0e}; raise molecule.j_max", out.boundary_flux,
        kBoundaryFluxWarning));
  }
  return out;
}

RotorRun evaluate_broadband(const RunConfig& c, RotorRun out) {
  const SechPulseTrain pulse = sech_pulse(c);
  const PulseMap map = build_pulse_map(out.spec, pulse);
  out.reference_K = optional_limit([&] { return sech_doppler_limit(pulse); });

  PopulationState current = out.initial;
  std::uint64_t applied = 0;
  for (const double t : output_times(c)) {
    const auto n = static_cast<std::uint64_t>(std::llround(t / pulse.rep_period_s));
    if (n > applied) {
      current = apply_pulses(map, current, n - applied);
      applied = n;
    }
    out.states.push_back(current);
    out.n_pulses.push_back(applied);
  }
  if (c.run.steady_state) out.steady = steady_state(map, out.initial);
  return out;
}

json observables_json(const Observables& o) {
  json j = {{"mean_J", o.mean_J},
            {"T_eff_K", o.T_eff_K},
            {"T_eff_window_K", o.T_eff_window_K},
            {"peak_PSD", o.peak_PSD},
            {"peak_J", o.peak_J},
            {"psd_enhancement", o.psd_enhancement},
            {"cooled_fraction", o.cooled_fraction}};
  j["T_fit_K"] = o.T_fit_K ? json(*o.T_fit_K) : json(nullptr);
  if (!o.fit_note.empty()) j["fit_note"] = o.fit_note;
  return j;
}

ObservableOptions observable_options(const RunConfig& c) { return {c.run.fit_j_max, c.run.cooled_j_cut}; }

class OutputDir {
public:
  explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ValidationError("output_dir", "cannot create '" + dir_.string() + "': " + ec.message());
  }

  std::ofstream open(const std::string& name) {
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) throw ValidationError("output_dir", "cannot write '" + (dir_ / name).string() + "'");
    os.precision(17);
    files_.push_back(name);
    return os;
  }

  void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }

  const std::filesystem::path& path() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

void write_distribution(std::ostream& os, const RotorRun& r) {
  os << "t_s,J,eps,population\n";
  auto rows = [&os](const PopulationState& s) {
    for (std::size_t i = 0; i < s.basis->size(); ++i) {
      const auto& label = (*s.basis)[i];
      os << fmt::format("{},{},{},{}\n", s.t_s, label.J, to_string(label.parity),
                        s.p[static_cast<Eigen::Index>(i)]);
    }
  };
  rows(r.initial);
  for (const auto& s : r.states) rows(s);
}

void write_psd(std::ostream& os, const RotorRun& r) {
  const PopulationState* last = r.states.empty() ? nullptr : &r.states.back();
  os << "J,eps,psd_initial";
  if (last) os << ",psd_final";
  if (r.steady) os << ",psd_steady";
  os << '\n';
  for (std::size_t i = 0; i < r.initial.basis->size(); ++i) {
    const auto& label = (*r.initial.basis)[i];
    const auto k = static_cast<Eigen::Index>(i);
    const double g = 2.0 * label.J + 1.0;
    os << fmt::format("{},{},{}", label.J, to_string(label.parity), r.initial.p[k] / g);
    if (last) os << fmt::format(",{}", last->p[k] / g);
    if (r.steady) os << fmt::format(",{}", r.steady->p[k] / g);
    os << '\n';
  }
}

void run_rotor(const RunConfig& c, OutputDir& out, std::vector<std::string>& warnings) {
  const RotorRun r = evaluate_rotor(c);
  warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
  {
    auto os = out.open("distribution.csv");
    write_distribution(os, r);
  }
  {
    auto os = out.open("psd.csv");
    write_psd(os, r);
  }
  const auto opts = observable_options(c);
  const double b = r.spec.b_lower_hz;
  json s;
  s["mode"] = to_string(c.mode);
  s["j_max"] = r.spec.j_max;
  s["capture_J"] = capture_J(r.spec);
  s["initial"] = observables_json(observables(r.initial, b, opts));
  if (!r.states.empty()) {
    s["final"] = observables_json(observables(r.states.back(), b, opts, &r.initial));
    s["final"]["t_s"] = r.states.back().t_s;
    if (!r.n_pulses.empty()) s["final"]["n_pulses"] = r.n_pulses.back();
  }
  if (r.steady) s["steady_state"] = observables_json(observables(*r.steady, b, opts, &r.initial));
  s["doppler_limit_K"] = r.reference_K ? json(*r.reference_K) : json(nullptr);
  if (c.mode == RunMode::narrowband) {
    s["equilibrium_J0"] = r.equilibrium_J0 ? json(*r.equilibrium_J0) : json(nullptr);
    s["boundary_flux_fraction"] = r.boundary_flux;
    const NarrowbandLaser laser = narrowband_laser(c);
    s["energy_damping_time_s"] =
        rotor_energy_damping_time(laser.detuning_rad_s, b, r.spec.gamma_rad_s, laser.saturation);
  } else {
    const SechPulseTrain pulse = sech_pulse(c);
    s["rep_period_s"] = pulse.rep_period_s;
    s["comb_overlap"] = pulse.comb_overlap(r.spec.gamma_rad_s);
  }
  s["temperature_measure"] = fmt::format(
      "T_fit_K: unweighted fit of ln(P/(2J+1)) against J(J+1) over J <= {}; T_eff_K: h B <J(J+1)> / k_B",
      opts.fit_j_max);
  out.write_json("summary.json", s);
}

void run_fortrat(const RunConfig& c, OutputDir& out) {
  auto os = out.open("fortrat.csv");
  write_fortrat_csv(os, line_list(molecule_spec(c)));
}

json monte_carlo_json(const MonteCarloResult& mc) {
  return {{"temperature_K", mc.temperature_K},
          {"temperature_stderr_K", mc.temperature_stderr_K},
          {"dt_s", mc.dt_s},
          {"n_scattering_events", mc.n_scattering_events}};
}

void run_classical(const RunConfig& c, OutputDir& out) {
  const auto& k = c.classical;
  const DegreeOfFreedom dof = classical_dof(c);
  const double gamma = gamma_rad_s(c);
  json s;
  s["mode"] = to_string(c.mode);
  s["mu"] = dof.mu;
  s["kappa"] = dof.kappa;
  Excitation excitation;
  if (c.mode == RunMode::classical_cw) {
    const CwLaser laser = classical_cw_laser(c, dof);
    excitation = laser;
    auto os = out.open("damping_curve.csv");
    write_cw_damping_curve(os, laser, dof, gamma, k.curve_x_min, k.curve_x_max, k.curve_points);
    const double alpha = damping_coefficient(laser, dof, gamma, 6);
    s["damping_coefficient"] = alpha;
    s["energy_damping_time_s"] = energy_damping_time(dof, alpha);
    s["diffusion_constant"] = diffusion_constant(laser, dof, gamma);
    s["doppler_limit_K"] = optional_limit([&] { return cw_doppler_limit(laser.s0, laser.detuning_rad_s, gamma); })
                               .value_or(std::nan(""));
  } else {
    const SechPulseTrain pulse = sech_pulse(c);
    check_comb_regime(pulse, gamma);
    excitation = pulse;
    auto os = out.open("damping_curve.csv");
    write_sech_damping_curve(os, pulse, dof, k.curve_x_min, k.curve_x_max, k.curve_points);
    s["energy_damping_time_s"] = 1.0 / sech_energy_damping_rate(pulse, dof);
    s["heating_power_W"] = sech_heating_power(pulse, dof);
    s["doppler_limit_K"] = optional_limit([&] { return sech_doppler_limit(pulse); }).value_or(std::nan(""));
  }
  if (k.n_particles > 0) {
    MonteCarloConfig mc_cfg;
    mc_cfg.n_particles = static_cast<std::size_t>(k.n_particles);
    mc_cfg.t_end_s = k.t_end_s;
    mc_cfg.dt_s = k.dt_s;
    mc_cfg.initial_T_K = k.initial_t_k;
    mc_cfg.seed = static_cast<std::uint64_t>(k.seed);
    mc_cfg.n_samples = k.n_samples;
    const MonteCarloResult mc = jump_monte_carlo(dof, excitation, gamma, mc_cfg);
    auto os = out.open("mc_energy.csv");
    os << "t_s,mean_energy_J,temperature_K\n";
    for (std::size_t i = 0; i < mc.t_s.size(); ++i) {
      os << fmt::format("{},{},{}\n", mc.t_s[i], mc.mean_energy_J[i],
                        2.0 * mc.mean_energy_J[i] / (3.0 * constants::k_B));
    }
    s["monte_carlo"] = monte_carlo_json(mc);
  }
  for (auto& [key, v] : s.items()) {
    if (v.is_number_float() && !std::isfinite(v.get<double>())) v = nullptr;
  }
  out.write_json("summary.json", s);
}

unsigned worker_count() {
  if (const char* env = std::getenv("ROTCOOL_WORKERS")) {
    const int n = std::atoi(env);
    if (n < 1) throw ValidationError("ROTCOOL_WORKERS", "must be a positive integer");
    return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct ScanRow {
  std::optional<double> outer;
  double value = 0.0;
  std::optional<Observables> obs;
  std::optional<double> reference_K;
  std::string error;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void run_scan(const RunConfig& c, OutputDir& out, std::vector<std::string>& warnings) {
  const auto& sc = c.scan;
  std::vector<ScanRow> rows;
  if (sc.outer_values.empty()) {
    for (const double v : sc.values) rows.push_back({std::nullopt, v, {}, {}, {}});
  } else {
    for (const double o : sc.outer_values) {
      for (const double v : sc.values) rows.push_back({o, v, {}, {}, {}});
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex warn_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      ScanRow& row = rows[i];
      try {
        const RunConfig point = scan_point(c, row.value, row.outer);
        const RotorRun r = evaluate_rotor(point);
        row.obs = observables(summary_state(r), r.spec.b_lower_hz, observable_options(point), &r.initial);
        row.reference_K = r.reference_K;
        if (!r.warnings.empty()) {
          std::lock_guard lock(warn_mutex);
          for (const auto& w : r.warnings) warnings.push_back(fmt::format("{} = {}: {}", sc.parameter, row.value, w));
        }
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const unsigned n_workers = std::min<std::size_t>(worker_count(), rows.size());
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  auto os = out.open("scan.csv");
  if (!sc.outer_parameter.empty()) os << sc.outer_parameter << ',';
  os << sc.parameter
     << ",mean_J,T_eff_K,T_eff_window_K,T_fit_K,peak_PSD,peak_J,psd_enhancement,cooled_fraction,"
        "doppler_limit_K,error\n";
  auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); };
  for (const auto& row : rows) {
    if (!sc.outer_parameter.empty()) os << fmt::format("{},", *row.outer);
    os << fmt::format("{},", row.value);
    if (row.obs) {
      const auto& o = *row.obs;
      os << fmt::format("{},{},{},{},{},{},{},{},", o.mean_J, o.T_eff_K, o.T_eff_window_K, opt(o.T_fit_K),
                        o.peak_PSD, o.peak_J, o.psd_enhancement, o.cooled_fraction);
    } else {
      os << ",,,,,,,,";
    }
    os << opt(row.reference_K) << ',' << csv_field(row.error) << '\n';
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const PopulationState& summary_state(const RotorRun& run) {
  if (run.steady) return *run.steady;
  if (!run.states.empty()) return run.states.back();
  return run.initial;
}

RotorRun evaluate_rotor(const RunConfig& config) {
  if (config.mode != RunMode::narrowband && config.mode != RunMode::broadband) {
    throw ValidationError("mode", "rotor evaluation needs narrowband or broadband");
  }
  RotorRun out;
  out.spec = molecule_spec(config);
  out.initial = thermal_distribution(out.spec, config.run.initial_t_k);
  return config.mode == RunMode::narrowband ? evaluate_narrowband(config, std::move(out))
                                            : evaluate_broadband(config, std::move(out));
}

std::string config_sha256(const RunConfig& config) {
  const std::string text = serialize_config(config);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

RunReport run(const RunConfig& config) {
  OutputDir out(config.output_dir);
  std::vector<std::string> warnings;
  switch (config.mode) {
    case RunMode::narrowband:
    case RunMode::broadband: run_rotor(config, out, warnings); break;
    case RunMode::fortrat: run_fortrat(config, out); break;
    case RunMode::classical_cw:
    case RunMode::classical_sech: run_classical(config, out); break;
    case RunMode::scan: run_scan(config, out, warnings); break;
  }

  json manifest;
  manifest["version"] = ROTCOOL_VERSION;
  manifest["mode"] = to_string(config.mode);
  manifest["config_sha256"] = config_sha256(config);
  manifest["files"] = out.files();
  manifest["warnings"] = warnings;
  manifest["generated_at"] = utc_timestamp();
  std::vector<std::string> files = out.files();
  out.write_json("manifest.json", manifest);
  files.push_back("manifest.json");
  return {out.path(), files, warnings};
}

}  // namespace rotcool
