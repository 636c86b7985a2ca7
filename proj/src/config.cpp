#include "rotcool/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "rotcool/constants.hpp"
#include "rotcool/errors.hpp"

namespace rotcool {

std::string_view to_string(RunMode m) {
  switch (m) {
    case RunMode::classical_cw: return "classical_cw";
    case RunMode::classical_sech: return "classical_sech";
    case RunMode::narrowband: return "narrowband";
    case RunMode::broadband: return "broadband";
    case RunMode::fortrat: return "fortrat";
    case RunMode::scan: return "scan";
  }
  return "?";
}

std::string_view to_string(PropagationMethod m) {
  switch (m) {
    case PropagationMethod::uniformization: return "uniformization";
    case PropagationMethod::explicit_stepping: return "explicit_stepping";
    case PropagationMethod::matrix_exponential: return "matrix_exponential";
  }
  return "?";
}

namespace {

RunMode parse_mode(const std::string& s, const std::string& field) {
  for (const RunMode m : {RunMode::classical_cw, RunMode::classical_sech, RunMode::narrowband,
                          RunMode::broadband, RunMode::fortrat, RunMode::scan}) {
    if (s == to_string(m)) return m;
  }
  throw ValidationError(field, "unknown mode '" + s + "'");
}

PropagationMethod parse_method(const std::string& s) {
  for (const PropagationMethod m : {PropagationMethod::uniformization,
                                    PropagationMethod::explicit_stepping,
                                    PropagationMethod::matrix_exponential}) {
    if (s == to_string(m)) return m;
  }
  throw ValidationError("run.method", "unknown method '" + s + "'");
}

// Typed access to one table; remembers which keys were read so leftovers can
// be reported as unknown.
class TableReader {
public:
  TableReader(const toml::Document& doc, std::string name) : name_(std::move(name)) {
    if (const auto it = doc.tables.find(name_); it != doc.tables.end()) table_ = &it->second;
  }

  std::string field(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

  const toml::Value* get(const std::string& key) {
    used_.insert(key);
    if (!table_) return nullptr;
    const auto it = table_->find(key);
    return it == table_->end() ? nullptr : &it->second;
  }

  std::optional<double> number(const std::string& key) {
    const auto* v = get(key);
    if (!v) return std::nullopt;
    if (const auto* d = std::get_if<double>(&v->data())) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&v->data())) return static_cast<double>(*i);
    throw ValidationError(field(key), fmt::format("expected a number, got {}", v->type_name()));
  }

  void number(const std::string& key, double& out) {
    if (const auto v = number(key)) out = *v;
  }
  void number(const std::string& key, std::optional<double>& out) { out = number(key); }

  void integer(const std::string& key, int& out) {
    if (const auto v = integer64(key)) out = static_cast<int>(*v);
  }
  void integer(const std::string& key, std::int64_t& out) {
    if (const auto v = integer64(key)) out = *v;
  }

  void boolean(const std::string& key, bool& out) {
    const auto* v = get(key);
    if (!v) return;
    const auto* b = std::get_if<bool>(&v->data());
    if (!b) throw ValidationError(field(key), fmt::format("expected a boolean, got {}", v->type_name()));
    out = *b;
  }

  std::optional<std::string> string(const std::string& key) {
    const auto* v = get(key);
    if (!v) return std::nullopt;
    const auto* s = std::get_if<std::string>(&v->data());
    if (!s) throw ValidationError(field(key), fmt::format("expected a string, got {}", v->type_name()));
    return *s;
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    const auto* v = get(key);
    if (!v) return;
    const auto* a = std::get_if<toml::Value::Array>(&v->data());
    if (!a) throw ValidationError(field(key), fmt::format("expected an array, got {}", v->type_name()));
    out.clear();
    for (const auto& item : *a) {
      if (const auto* d = std::get_if<double>(&item.data())) {
        out.push_back(*d);
      } else if (const auto* i = std::get_if<std::int64_t>(&item.data())) {
        out.push_back(static_cast<double>(*i));
      } else {
        throw ValidationError(field(key), "array elements must be numbers");
      }
    }
  }

  void reject_unknown() const {
    if (!table_) return;
    for (const auto& [k, v] : *table_) {
      if (!used_.count(k)) throw ValidationError(field(k), "unknown key");
    }
  }

private:
  std::optional<std::int64_t> integer64(const std::string& key) {
    const auto* v = get(key);
    if (!v) return std::nullopt;
    if (const auto* i = std::get_if<std::int64_t>(&v->data())) return *i;
    throw ValidationError(field(key), fmt::format("expected an integer, got {}", v->type_name()));
  }

  std::string name_;
  const toml::Table* table_ = nullptr;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& field, const std::string& constraint) {
  if (!ok) throw ValidationError(field, constraint);
}

bool finite_positive(const std::optional<double>& v) { return v && std::isfinite(*v) && *v > 0.0; }

void validate_molecule(const RunConfig& c, bool needs_structure) {
  const auto& m = c.molecule;
  require(std::isfinite(m.gamma_over_2pi_hz) && m.gamma_over_2pi_hz > 0.0,
          "molecule.gamma_over_2pi_hz", "must be > 0");
  if (!needs_structure) return;
  require(std::isfinite(m.b_lower_hz) && m.b_lower_hz > 0.0, "molecule.b_lower_hz", "must be > 0");
  require(!m.b_upper_hz || finite_positive(m.b_upper_hz), "molecule.b_upper_hz", "must be > 0");
  require(m.lambda_lower == 0 || m.lambda_lower == 1, "molecule.lambda_lower", "must be 0 or 1");
  require(m.lambda_upper == 0 || m.lambda_upper == 1, "molecule.lambda_upper", "must be 0 or 1");
  require(std::isfinite(m.q_lower_hz), "molecule.q_lower_hz", "must be finite");
  require(m.j_max == 0 || m.j_max >= m.lambda_lower + 2, "molecule.j_max",
          "must be 0 (automatic) or >= lambda_lower + 2");
  require(m.j_max != 0 || c.run.initial_t_k > 0.0, "molecule.j_max",
          "required when run.initial_t_k is not set");
}

void validate_cw(const RunConfig& c) {
  const auto& l = c.laser;
  require(l.s0 && std::isfinite(*l.s0) && *l.s0 >= 0.0, "laser.s0", "required, >= 0");
  require(!l.s_b || (std::isfinite(*l.s_b) && *l.s_b >= 0.0), "laser.s_b", "must be >= 0");
  require(!l.s_total || (std::isfinite(*l.s_total) && *l.s_total >= *l.s0), "laser.s_total",
          "must be >= s0");
  require(l.delta_over_gamma && std::isfinite(*l.delta_over_gamma), "laser.delta_over_gamma",
          "required, finite");
}

void validate_sech(const RunConfig& c) {
  const auto& l = c.laser;
  require(finite_positive(l.tau_p_s), "laser.tau_p_s", "required, > 0");
  require(!l.rep_period_s || finite_positive(l.rep_period_s), "laser.rep_period_s", "must be > 0");
  require(l.theta0_rad.has_value() != l.theta0_over_pi.has_value(), "laser.theta0_rad",
          "exactly one of theta0_rad and theta0_over_pi is required");
  const double theta = l.theta0_rad ? *l.theta0_rad : *l.theta0_over_pi * constants::pi;
  require(std::isfinite(theta) && theta >= 0.0, l.theta0_rad ? "laser.theta0_rad" : "laser.theta0_over_pi",
          "must be >= 0");
  require(l.delta_tau_p && std::isfinite(*l.delta_tau_p), "laser.delta_tau_p", "required, finite");
}

void validate_run(const RunConfig& c, bool needs_time) {
  const auto& r = c.run;
  require(std::isfinite(r.initial_t_k) && r.initial_t_k > 0.0, "run.initial_t_k", "must be > 0");
  require(std::isfinite(r.duration_s) && r.duration_s >= 0.0, "run.duration_s", "must be >= 0");
  if (needs_time) {
    require(r.duration_s > 0.0 || r.steady_state, "run.duration_s",
            "must be > 0 unless run.steady_state = true");
  }
  require(r.n_outputs >= 1, "run.n_outputs", "must be >= 1");
  double prev = 0.0;
  for (const double t : r.output_times_s) {
    require(std::isfinite(t) && t > prev && t <= r.duration_s, "run.output_times_s",
            "must be ascending, > 0 and <= duration_s");
    prev = t;
  }
  require(r.fit_j_max >= 2, "run.fit_j_max", "must be >= 2");
  require(r.cooled_j_cut >= 0, "run.cooled_j_cut", "must be >= 0");
}

void validate_classical(const RunConfig& c) {
  const auto& k = c.classical;
  if (k.dof == DofMode::translation) {
    require(finite_positive(k.mass_amu), "classical.mass_amu", "required for translation, > 0");
    require(finite_positive(k.wavelength_m), "classical.wavelength_m", "required for translation, > 0");
  } else {
    require(finite_positive(k.inertia_kg_m2) || (std::isfinite(c.molecule.b_lower_hz) && c.molecule.b_lower_hz > 0.0),
            "classical.inertia_kg_m2", "rotation needs inertia_kg_m2 or molecule.b_lower_hz");
  }
  require(k.n_particles >= 0, "classical.n_particles", "must be >= 0");
  if (k.n_particles > 0) {
    require(std::isfinite(k.t_end_s) && k.t_end_s > 0.0, "classical.t_end_s", "must be > 0");
    require(std::isfinite(k.dt_s) && k.dt_s >= 0.0, "classical.dt_s", "must be >= 0");
    require(std::isfinite(k.initial_t_k) && k.initial_t_k >= 0.0, "classical.initial_t_k", "must be >= 0");
    require(k.n_samples >= 2, "classical.n_samples", "must be >= 2");
  }
  require(k.curve_x_max > k.curve_x_min, "classical.curve_x_max", "must exceed curve_x_min");
  require(k.curve_points >= 2, "classical.curve_points", "must be >= 2");
}

void validate(const RunConfig& c) {
  switch (c.mode) {
    case RunMode::fortrat:
      validate_molecule(c, true);
      break;
    case RunMode::narrowband:
      validate_run(c, true);
      validate_molecule(c, true);
      validate_cw(c);
      break;
    case RunMode::broadband:
      validate_run(c, true);
      validate_molecule(c, true);
      validate_sech(c);
      break;
    case RunMode::classical_cw:
      validate_molecule(c, false);
      validate_cw(c);
      validate_classical(c);
      break;
    case RunMode::classical_sech:
      validate_molecule(c, false);
      validate_sech(c);
      validate_classical(c);
      break;
    case RunMode::scan: {
      const auto& s = c.scan;
      require(s.point_mode == RunMode::narrowband || s.point_mode == RunMode::broadband,
              "scan.point_mode", "must be narrowband or broadband");
      require(!s.parameter.empty(), "scan.parameter", "required");
      require(!s.values.empty(), "scan.values", "must not be empty");
      for (const double v : s.values) require(std::isfinite(v), "scan.values", "must be finite");
      require(s.outer_parameter.empty() == s.outer_values.empty(), "scan.outer_values",
              "outer_parameter and outer_values go together");
      for (const double v : s.outer_values) require(std::isfinite(v), "scan.outer_values", "must be finite");
      // Every point must be a valid run.
      for (const double v : s.values) {
        if (s.outer_values.empty()) {
          scan_point(c, v, std::nullopt);
        } else {
          for (const double o : s.outer_values) scan_point(c, v, o);
        }
      }
      break;
    }
  }
}

}  // namespace

RunConfig parse_config(const toml::Document& doc) {
  RunConfig c;
  for (const auto& [name, table] : doc.tables) {
    static const std::set<std::string> known = {"", "molecule", "laser", "run", "classical", "scan"};
    if (!known.count(name)) throw ValidationError(name, "unknown table");
  }

  TableReader root(doc, "");
  if (const auto m = root.string("mode")) {
    c.mode = parse_mode(*m, "mode");
  } else {
    throw ValidationError("mode", "required");
  }
  if (const auto d = root.string("output_dir")) c.output_dir = *d;
  root.reject_unknown();

  TableReader mol(doc, "molecule");
  mol.number("b_lower_hz", c.molecule.b_lower_hz);
  mol.number("b_upper_hz", c.molecule.b_upper_hz);
  mol.integer("lambda_lower", c.molecule.lambda_lower);
  mol.integer("lambda_upper", c.molecule.lambda_upper);
  mol.number("q_lower_hz", c.molecule.q_lower_hz);
  mol.number("gamma_over_2pi_hz", c.molecule.gamma_over_2pi_hz);
  mol.integer("j_max", c.molecule.j_max);
  mol.reject_unknown();

  TableReader las(doc, "laser");
  las.number("s0", c.laser.s0);
  las.number("s_b", c.laser.s_b);
  las.number("s_total", c.laser.s_total);
  las.number("delta_over_gamma", c.laser.delta_over_gamma);
  las.number("tau_p_s", c.laser.tau_p_s);
  las.number("rep_period_s", c.laser.rep_period_s);
  las.number("theta0_rad", c.laser.theta0_rad);
  las.number("theta0_over_pi", c.laser.theta0_over_pi);
  las.number("delta_tau_p", c.laser.delta_tau_p);
  las.reject_unknown();

  TableReader run(doc, "run");
  run.number("initial_t_k", c.run.initial_t_k);
  run.number("duration_s", c.run.duration_s);
  run.numbers("output_times_s", c.run.output_times_s);
  run.integer("n_outputs", c.run.n_outputs);
  if (const auto s = run.string("spacing")) {
    if (*s == "log") {
      c.run.spacing = TimeSpacing::log;
    } else if (*s == "linear") {
      c.run.spacing = TimeSpacing::linear;
    } else {
      throw ValidationError("run.spacing", "must be \"log\" or \"linear\"");
    }
  }
  if (const auto m = run.string("method")) c.run.method = parse_method(*m);
  run.boolean("steady_state", c.run.steady_state);
  run.integer("fit_j_max", c.run.fit_j_max);
  run.integer("cooled_j_cut", c.run.cooled_j_cut);
  run.reject_unknown();

  TableReader cl(doc, "classical");
  if (const auto d = cl.string("dof")) {
    if (*d == "translation") {
      c.classical.dof = DofMode::translation;
    } else if (*d == "rotation") {
      c.classical.dof = DofMode::rotation;
    } else {
      throw ValidationError("classical.dof", "must be \"translation\" or \"rotation\"");
    }
  }
  cl.number("mass_amu", c.classical.mass_amu);
  cl.number("wavelength_m", c.classical.wavelength_m);
  cl.number("inertia_kg_m2", c.classical.inertia_kg_m2);
  cl.integer("n_particles", c.classical.n_particles);
  cl.number("t_end_s", c.classical.t_end_s);
  cl.number("dt_s", c.classical.dt_s);
  cl.number("initial_t_k", c.classical.initial_t_k);
  cl.integer("seed", c.classical.seed);
  cl.integer("n_samples", c.classical.n_samples);
  cl.number("curve_x_min", c.classical.curve_x_min);
  cl.number("curve_x_max", c.classical.curve_x_max);
  cl.integer("curve_points", c.classical.curve_points);
  cl.reject_unknown();

  TableReader sc(doc, "scan");
  if (const auto m = sc.string("point_mode")) c.scan.point_mode = parse_mode(*m, "scan.point_mode");
  if (const auto p = sc.string("parameter")) c.scan.parameter = *p;
  sc.numbers("values", c.scan.values);
  if (const auto p = sc.string("outer_parameter")) c.scan.outer_parameter = *p;
  sc.numbers("outer_values", c.scan.outer_values);
  sc.reject_unknown();

  validate(c);
  return c;
}

RunConfig parse_config_text(std::string_view text, std::string_view source) {
  return parse_config(toml::parse(text, source));
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

toml::Document to_document(const RunConfig& c) {
  toml::Document d;
  d.set("mode", std::string(to_string(c.mode)));
  d.set("output_dir", c.output_dir);
  auto opt = [&d](const char* key, const std::optional<double>& v) {
    if (v) d.set(key, *v);
  };

  const auto& m = c.molecule;
  d.set("molecule.b_lower_hz", m.b_lower_hz);
  opt("molecule.b_upper_hz", m.b_upper_hz);
  d.set("molecule.lambda_lower", m.lambda_lower);
  d.set("molecule.lambda_upper", m.lambda_upper);
  d.set("molecule.q_lower_hz", m.q_lower_hz);
  d.set("molecule.gamma_over_2pi_hz", m.gamma_over_2pi_hz);
  d.set("molecule.j_max", m.j_max);

  const auto& l = c.laser;
  opt("laser.s0", l.s0);
  opt("laser.s_b", l.s_b);
  opt("laser.s_total", l.s_total);
  opt("laser.delta_over_gamma", l.delta_over_gamma);
  opt("laser.tau_p_s", l.tau_p_s);
  opt("laser.rep_period_s", l.rep_period_s);
  opt("laser.theta0_rad", l.theta0_rad);
  opt("laser.theta0_over_pi", l.theta0_over_pi);
  opt("laser.delta_tau_p", l.delta_tau_p);

  const auto& r = c.run;
  d.set("run.initial_t_k", r.initial_t_k);
  d.set("run.duration_s", r.duration_s);
  if (!r.output_times_s.empty()) {
    d.set("run.output_times_s", toml::Value::Array(r.output_times_s.begin(), r.output_times_s.end()));
  }
  d.set("run.n_outputs", r.n_outputs);
  d.set("run.spacing", r.spacing == TimeSpacing::log ? "log" : "linear");
  d.set("run.method", std::string(to_string(r.method)));
  d.set("run.steady_state", r.steady_state);
  d.set("run.fit_j_max", r.fit_j_max);
  d.set("run.cooled_j_cut", r.cooled_j_cut);

  const auto& k = c.classical;
  d.set("classical.dof", k.dof == DofMode::translation ? "translation" : "rotation");
  opt("classical.mass_amu", k.mass_amu);
  opt("classical.wavelength_m", k.wavelength_m);
  opt("classical.inertia_kg_m2", k.inertia_kg_m2);
  d.set("classical.n_particles", k.n_particles);
  d.set("classical.t_end_s", k.t_end_s);
  d.set("classical.dt_s", k.dt_s);
  d.set("classical.initial_t_k", k.initial_t_k);
  d.set("classical.seed", k.seed);
  d.set("classical.n_samples", k.n_samples);
  d.set("classical.curve_x_min", k.curve_x_min);
  d.set("classical.curve_x_max", k.curve_x_max);
  d.set("classical.curve_points", k.curve_points);

  if (c.mode == RunMode::scan) {
    const auto& s = c.scan;
    d.set("scan.point_mode", std::string(to_string(s.point_mode)));
    d.set("scan.parameter", s.parameter);
    d.set("scan.values", toml::Value::Array(s.values.begin(), s.values.end()));
    if (!s.outer_parameter.empty()) {
      d.set("scan.outer_parameter", s.outer_parameter);
      d.set("scan.outer_values", toml::Value::Array(s.outer_values.begin(), s.outer_values.end()));
    }
  }
  return d;
}

std::string serialize_config(const RunConfig& config) { return toml::serialize(to_document(config)); }

RunConfig scan_point(const RunConfig& scan, double value, std::optional<double> outer_value) {
  RunConfig base = scan;
  base.mode = scan.scan.point_mode;
  base.scan = ScanSection{};
  toml::Document d = to_document(base);
  auto assign = [&d](const std::string& path, double v) {
    const toml::Value* existing = d.find(path);
    if (existing && std::holds_alternative<std::int64_t>(existing->data())) {
      if (v != std::floor(v)) throw ValidationError(path, "scanned value must be an integer");
      d.set(path, static_cast<std::int64_t>(v));
    } else {
      d.set(path, v);
    }
  };
  if (scan.scan.parameter.find('.') == std::string::npos) throw ValidationError("scan.parameter", "must name table.key");
  assign(scan.scan.parameter, value);
  if (outer_value) assign(scan.scan.outer_parameter, *outer_value);
  return parse_config(d);
}

double gamma_rad_s(const RunConfig& c) { return 2.0 * constants::pi * c.molecule.gamma_over_2pi_hz; }

MoleculeSpec molecule_spec(const RunConfig& c) {
  const auto& m = c.molecule;
  MoleculeSpec spec;
  spec.b_lower_hz = m.b_lower_hz;
  spec.b_upper_hz = m.b_upper_hz.value_or(m.b_lower_hz);
  spec.lambda_lower = m.lambda_lower;
  spec.lambda_upper = m.lambda_upper;
  spec.q_lower_hz = m.q_lower_hz;
  spec.gamma_rad_s = gamma_rad_s(c);
  spec.j_max = m.j_max > 0 ? m.j_max : default_j_max(m.b_lower_hz, m.lambda_lower, c.run.initial_t_k);
  spec.validate();
  return spec;
}

NarrowbandLaser narrowband_laser(const RunConfig& c) {
  const double s0 = c.laser.s0.value_or(0.0);
  return {c.laser.delta_over_gamma.value_or(0.0) * gamma_rad_s(c),
          {s0, c.laser.s_b.value_or(s0), true}};
}

SechPulseTrain sech_pulse(const RunConfig& c) {
  const auto& l = c.laser;
  SechPulseTrain p;
  p.tau_p_s = l.tau_p_s.value_or(0.0);
  p.rep_period_s = l.rep_period_s.value_or(7.0 / gamma_rad_s(c));
  p.theta0 = l.theta0_rad ? *l.theta0_rad : l.theta0_over_pi.value_or(0.0) * constants::pi;
  p.detuning_rad_s = l.delta_tau_p.value_or(0.0) / p.tau_p_s;
  return p;
}

CwLaser classical_cw_laser(const RunConfig& c, const DegreeOfFreedom&) {
  const double s0 = c.laser.s0.value_or(0.0);
  return {s0, c.laser.s_total.value_or(6.0 * s0), c.laser.delta_over_gamma.value_or(0.0) * gamma_rad_s(c)};
}

DegreeOfFreedom classical_dof(const RunConfig& c) {
  const auto& k = c.classical;
  if (k.dof == DofMode::translation) {
    return DegreeOfFreedom::translation(k.mass_amu.value_or(0.0) * constants::amu, k.wavelength_m.value_or(0.0));
  }
  if (k.inertia_kg_m2) return DegreeOfFreedom::rotation(*k.inertia_kg_m2);
  return DegreeOfFreedom::rotation_from_b(c.molecule.b_lower_hz);
}

std::vector<double> output_times(const RunConfig& c) {
  const auto& r = c.run;
  if (!r.output_times_s.empty()) return r.output_times_s;
  std::vector<double> t;
  if (!(r.duration_s > 0.0)) return t;
  const int n = r.n_outputs;
  for (int k = 0; k < n; ++k) {
    if (r.spacing == TimeSpacing::linear || n == 1) {
      t.push_back(r.duration_s * (k + 1.0) / n);
    } else {
      t.push_back(r.duration_s * std::pow(10.0, -4.0 + 4.0 * k / (n - 1.0)));
    }
  }
  t.back() = r.duration_s;
  return t;
}

}  // namespace rotcool
