#include "rotcool/classical.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "rotcool/constants.hpp"
#include "rotcool/errors.hpp"

namespace rotcool {

using constants::hbar;
using constants::k_B;

namespace {

double sech2(double x) {
  const double c = std::cosh(x);
  return 1.0 / (c * c);
}

void require_red(double detuning, const char* field) {
  if (!(detuning < 0.0)) throw ValidationError(field, "Doppler limit requires detuning < 0");
}

}  // namespace

DegreeOfFreedom DegreeOfFreedom::translation(double mass_kg, double wavelength_m) {
  if (!(mass_kg > 0.0)) throw ValidationError("mass", "must be > 0");
  if (!(wavelength_m > 0.0)) throw ValidationError("wavelength_m", "must be > 0");
  return {DofMode::translation, mass_kg, 2.0 * constants::pi / wavelength_m};
}

DegreeOfFreedom DegreeOfFreedom::rotation_from_b(double b_hz) {
  if (!(b_hz > 0.0)) throw ValidationError("b_hz", "must be > 0");
  return rotation(hbar / (4.0 * constants::pi * b_hz));
}

DegreeOfFreedom DegreeOfFreedom::rotation(double inertia_kg_m2) {
  if (!(inertia_kg_m2 > 0.0)) throw ValidationError("inertia", "must be > 0");
  return {DofMode::rotation, inertia_kg_m2, 1.0};
}

double DegreeOfFreedom::recoil_rad_s() const { return hbar * kappa * kappa / (2.0 * mu); }

double DegreeOfFreedom::capture_momentum(double gamma_rad_s) const {
  return mu * gamma_rad_s / kappa;
}

CwLaser CwLaser::from_lab_detuning(double s0, double s_total, double lab_detuning_rad_s,
                                   const DegreeOfFreedom& dof) {
  return {s0, s_total, lab_detuning_rad_s - dof.recoil_rad_s()};
}

void SechPulseTrain::validate() const {
  if (!(tau_p_s > 0.0)) throw ValidationError("tau_p_s", "must be > 0");
  if (!(rep_period_s > tau_p_s)) throw ValidationError("rep_period_s", "must exceed tau_p_s");
  if (!(theta0 >= 0.0)) throw ValidationError("theta0", "must be >= 0");
  if (!std::isfinite(detuning_rad_s)) throw ValidationError("detuning", "must be finite");
}

double SechPulseTrain::comb_overlap(double gamma_rad_s) const {
  return 1.0 / std::cosh(0.5 * gamma_rad_s * rep_period_s);
}

void check_comb_regime(const SechPulseTrain& pulse, double gamma_rad_s) {
  const double overlap = pulse.comb_overlap(gamma_rad_s);
  if (overlap > kCombOverlapLimit) {
    throw RegimeError("comb_regime",
                      fmt::format("sech(gamma T_r / 2) = {:.3g} exceeds {}; lengthen rep_period_s",
                                  overlap, kCombOverlapLimit));
  }
}

double kinetic_energy_change(const DegreeOfFreedom& dof, double pi0, double theta) {
  return hbar * dof.recoil_rad_s() + hbar * dof.kappa * pi0 * std::cos(theta) / dof.mu;
}

double cw_scattering_rate(const CwLaser& laser, const DegreeOfFreedom& dof,
                          const Eigen::Vector3d& pi, const Eigen::Vector3d& khat,
                          double gamma_rad_s) {
  const double shift = laser.detuning_rad_s - dof.kappa * khat.dot(pi) / dof.mu;
  const double g = gamma_rad_s;
  return 0.5 * g * laser.s0 / (1.0 + laser.s_total + 4.0 * shift * shift / (g * g));
}

double damping_1d(const CwLaser& laser, const DegreeOfFreedom& dof, double pi_parallel,
                  double gamma_rad_s) {
  const Eigen::Vector3d pi(pi_parallel, 0.0, 0.0);
  const Eigen::Vector3d x = Eigen::Vector3d::UnitX();
  return hbar * dof.kappa *
         (cw_scattering_rate(laser, dof, pi, x, gamma_rad_s) -
          cw_scattering_rate(laser, dof, pi, -x, gamma_rad_s));
}

double damping_1d_linear(const CwLaser& laser, const DegreeOfFreedom& dof, double pi_parallel,
                         double gamma_rad_s) {
  const double g = gamma_rad_s;
  const double d = laser.detuning_rad_s;
  const double den = g * g * (1.0 + laser.s_total) + 4.0 * d * d;
  return hbar * dof.kappa * 8.0 * g * g * g * d * laser.s0 / (den * den) * dof.kappa *
         pi_parallel / dof.mu;
}

double damping_coefficient(const CwLaser& laser, const DegreeOfFreedom& dof, double gamma_rad_s,
                           int n_beams) {
  if (n_beams != 2 && n_beams != 6) throw ValidationError("n_beams", "must be 2 or 6");
  const double g = gamma_rad_s;
  const double d = laser.detuning_rad_s;
  const double den = g * g * (1.0 + n_beams * laser.s0) + 4.0 * d * d;
  return -d * 8.0 * hbar * g * g * g * laser.s0 * dof.kappa * dof.kappa / (den * den);
}

double energy_damping_time(const DegreeOfFreedom& dof, double alpha) {
  return dof.mu / (2.0 * alpha);
}

double diffusion_constant(const CwLaser& laser, const DegreeOfFreedom& dof, double gamma_rad_s) {
  const double g = gamma_rad_s;
  const double d = laser.detuning_rad_s;
  return 3.0 * hbar * hbar * g * g * g * dof.kappa * dof.kappa * laser.s0 /
         (g * g * (1.0 + 6.0 * laser.s0) + 4.0 * d * d);
}

double cw_doppler_limit(double s0, double detuning_rad_s, double gamma_rad_s) {
  require_red(detuning_rad_s, "detuning");
  const double g = gamma_rad_s;
  const double d = detuning_rad_s;
  return -(hbar * g / (4.0 * k_B)) * ((1.0 + 6.0 * s0) * g / (2.0 * d) + 2.0 * d / g);
}

double rosen_zener_pex(double theta0, double detuning_rad_s, double tau_p_s) {
  const double s = std::sin(0.5 * theta0);
  return s * s * sech2(0.5 * detuning_rad_s * tau_p_s);
}

double sech_scattering_rate(const SechPulseTrain& pulse, const DegreeOfFreedom& dof,
                            const Eigen::Vector3d& pi, const Eigen::Vector3d& khat) {
  const double s = std::sin(0.5 * pulse.theta0);
  const double arg = 0.5 * pulse.detuning_rad_s * pulse.tau_p_s -
                     0.5 * pulse.tau_p_s / dof.mu * dof.kappa * khat.dot(pi);
  return s * s / pulse.rep_period_s * sech2(arg);
}

double sech_damping_1d(const SechPulseTrain& pulse, const DegreeOfFreedom& dof,
                       double pi_parallel) {
  const Eigen::Vector3d pi(pi_parallel, 0.0, 0.0);
  const Eigen::Vector3d x = Eigen::Vector3d::UnitX();
  return hbar * dof.kappa *
         (sech_scattering_rate(pulse, dof, pi, x) - sech_scattering_rate(pulse, dof, pi, -x));
}

double sech_energy_damping_rate(const SechPulseTrain& pulse, const DegreeOfFreedom& dof) {
  const double s = std::sin(0.5 * pulse.theta0);
  const double x = 0.5 * pulse.detuning_rad_s * pulse.tau_p_s;
  return -4.0 * hbar * dof.kappa * dof.kappa * pulse.tau_p_s * s * s /
         (dof.mu * pulse.rep_period_s) * std::tanh(x) * sech2(x);
}

double sech_heating_power(const SechPulseTrain& pulse, const DegreeOfFreedom& dof) {
  const double s = std::sin(0.5 * pulse.theta0);
  const double x = 0.5 * pulse.detuning_rad_s * pulse.tau_p_s;
  return 6.0 * hbar * hbar * dof.kappa * dof.kappa * s * s / (dof.mu * pulse.rep_period_s) *
         sech2(x);
}

double sech_doppler_limit(const SechPulseTrain& pulse) {
  require_red(pulse.detuning_rad_s, "detuning");
  if (!(pulse.tau_p_s > 0.0)) throw ValidationError("tau_p_s", "must be > 0");
  const double x = 0.5 * pulse.detuning_rad_s * pulse.tau_p_s;
  return -(hbar / pulse.tau_p_s) / std::tanh(x) / k_B;
}

double sech_optimal_detuning(double tau_p_s) { return std::log(2.0 - std::sqrt(3.0)) / tau_p_s; }

namespace {

void check_curve_args(double x_min, double x_max, int n_points) {
  if (!(x_max > x_min)) throw ValidationError("x_max", "must exceed x_min");
  if (n_points < 2) throw ValidationError("n_points", "must be >= 2");
}

}  // namespace

void write_cw_damping_curve(std::ostream& os, const CwLaser& laser, const DegreeOfFreedom& dof,
                            double gamma_rad_s, double x_min, double x_max, int n_points) {
  check_curve_args(x_min, x_max, n_points);
  const Eigen::Vector3d x_hat = Eigen::Vector3d::UnitX();
  os << "x,plus_beam,minus_beam,net\n";
  for (int i = 0; i < n_points; ++i) {
    const double x = x_min + (x_max - x_min) * i / (n_points - 1);
    const Eigen::Vector3d pi(x * dof.mu * gamma_rad_s / dof.kappa, 0.0, 0.0);
    const double plus = cw_scattering_rate(laser, dof, pi, x_hat, gamma_rad_s) / gamma_rad_s;
    const double minus = -cw_scattering_rate(laser, dof, pi, -x_hat, gamma_rad_s) / gamma_rad_s;
    os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", x, plus, minus, plus + minus);
  }
}

void write_sech_damping_curve(std::ostream& os, const SechPulseTrain& pulse,
                              const DegreeOfFreedom& dof, double x_min, double x_max,
                              int n_points) {
  check_curve_args(x_min, x_max, n_points);
  const Eigen::Vector3d x_hat = Eigen::Vector3d::UnitX();
  os << "x,plus_beam,minus_beam,net\n";
  for (int i = 0; i < n_points; ++i) {
    const double x = x_min + (x_max - x_min) * i / (n_points - 1);
    const Eigen::Vector3d pi(x * dof.mu / (dof.kappa * pulse.tau_p_s), 0.0, 0.0);
    const double plus = sech_scattering_rate(pulse, dof, pi, x_hat) * pulse.rep_period_s;
    const double minus = -sech_scattering_rate(pulse, dof, pi, -x_hat) * pulse.rep_period_s;
    os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", x, plus, minus, plus + minus);
  }
}

}  // namespace rotcool
