#pragma once

#include <iosfwd>

#include <Eigen/Core>

namespace rotcool {

enum class DofMode { translation, rotation };

// A momentum-like degree of freedom: momentum pi, inertia mu (kg or kg m^2),
// photon momentum hbar*kappa (kappa in 1/m for translation, 1 for rotation).
struct DegreeOfFreedom {
  DofMode mode = DofMode::translation;
  double mu = 0.0;
  double kappa = 0.0;

  static DegreeOfFreedom translation(double mass_kg, double wavelength_m);
  // Linear rotor of rotational constant B (Hz): I = hbar / (4 pi B).
  static DegreeOfFreedom rotation_from_b(double b_hz);
  static DegreeOfFreedom rotation(double inertia_kg_m2);

  double recoil_rad_s() const;                          // hbar kappa^2 / (2 mu)
  double capture_momentum(double gamma_rad_s) const;    // mu gamma / kappa
  double energy_J(const Eigen::Vector3d& pi) const { return pi.squaredNorm() / (2.0 * mu); }
};

// Lifetime-broadened excitation. detuning_rad_s already has the recoil shift
// absorbed (delta = delta' - omega_r).
struct CwLaser {
  double s0 = 0.0;          // per beam
  double s_total = 0.0;     // all beams
  double detuning_rad_s = 0.0;

  static CwLaser from_lab_detuning(double s0, double s_total, double lab_detuning_rad_s,
                                   const DegreeOfFreedom& dof);
};

// Train of transform-limited sech pulses.
struct SechPulseTrain {
  double tau_p_s = 0.0;
  double rep_period_s = 0.0;
  double theta0 = 0.0;         // pulse area Omega0 * tau_p
  double detuning_rad_s = 0.0;

  void validate() const;
  // sech(gamma T_r / 2); inter-pulse coherence is negligible when this is small.
  double comb_overlap(double gamma_rad_s) const;
};

// Flagged when sech(gamma T_r / 2) exceeds this.
inline constexpr double kCombOverlapLimit = 0.1;

// Throws RegimeError("comb_regime") when the pulse train is too fast for
// the excited state to decay between pulses.
void check_comb_regime(const SechPulseTrain& pulse, double gamma_rad_s);

double kinetic_energy_change(const DegreeOfFreedom& dof, double pi0, double theta);

// Per-beam steady-state rate for a beam of photon direction khat.
double cw_scattering_rate(const CwLaser& laser, const DegreeOfFreedom& dof,
                          const Eigen::Vector3d& pi, const Eigen::Vector3d& khat,
                          double gamma_rad_s);

// Net 1D force hbar kappa (Gamma(+k) - Gamma(-k)) from two counter-propagating
// beams, and its small-momentum linearization.
double damping_1d(const CwLaser& laser, const DegreeOfFreedom& dof, double pi_parallel,
                  double gamma_rad_s);
double damping_1d_linear(const CwLaser& laser, const DegreeOfFreedom& dof, double pi_parallel,
                         double gamma_rad_s);

// alpha in dpi/dt = -alpha pi / mu, with s_total = n_beams * s0 (n_beams 2 or 6).
double damping_coefficient(const CwLaser& laser, const DegreeOfFreedom& dof, double gamma_rad_s,
                           int n_beams);
double energy_damping_time(const DegreeOfFreedom& dof, double alpha);

// Six-beam momentum diffusion constant; heating power is D / mu.
double diffusion_constant(const CwLaser& laser, const DegreeOfFreedom& dof, double gamma_rad_s);

// Six-beam CW Doppler limit in K. Rejects detuning >= 0.
double cw_doppler_limit(double s0, double detuning_rad_s, double gamma_rad_s);

double rosen_zener_pex(double theta0, double detuning_rad_s, double tau_p_s);

double sech_scattering_rate(const SechPulseTrain& pulse, const DegreeOfFreedom& dof,
                            const Eigen::Vector3d& pi, const Eigen::Vector3d& khat);
double sech_damping_1d(const SechPulseTrain& pulse, const DegreeOfFreedom& dof,
                       double pi_parallel);

// Six-beam energy damping rate 1/tau_E and heating power (W).
double sech_energy_damping_rate(const SechPulseTrain& pulse, const DegreeOfFreedom& dof);
double sech_heating_power(const SechPulseTrain& pulse, const DegreeOfFreedom& dof);

// -(hbar / tau_p) coth(delta tau_p / 2) / k_B. Rejects detuning >= 0.
double sech_doppler_limit(const SechPulseTrain& pulse);

// Detuning of maximum damping, ln(2 - sqrt 3) / tau_p.
double sech_optimal_detuning(double tau_p_s);

// Figure-style damping curve: x = kappa pi / (mu gamma) (cw) or
// kappa pi tau_p / mu (sech); columns x, plus_beam, minus_beam, net with the
// force in units of hbar kappa gamma (cw) or hbar kappa / T_r (sech).
void write_cw_damping_curve(std::ostream& os, const CwLaser& laser, const DegreeOfFreedom& dof,
                            double gamma_rad_s, double x_min, double x_max, int n_points);
void write_sech_damping_curve(std::ostream& os, const SechPulseTrain& pulse,
                              const DegreeOfFreedom& dof, double x_min, double x_max,
                              int n_points);

}  // namespace rotcool
