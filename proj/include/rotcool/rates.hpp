#pragma once

#include <optional>

#include "rotcool/angular.hpp"

namespace rotcool {

// s0 = I0 / I_sat; s_b is the power-broadening saturation in the Lorentzian
// denominators. With polarization switching on, every rate carries a 1/3.
struct SaturationContext {
  double s0 = 0.0;
  double s_b = 0.0;
  bool polarization_switching = true;

  // s_b = s0, switching on.
  static SaturationContext standard(double s0) { return {s0, s0, true}; }
  void validate() const;

  friend bool operator==(const SaturationContext&, const SaturationContext&) = default;
};

// Rotationless two-level saturation intensity hbar omega^3 gamma / (12 pi c^2), W/m^2.
double saturation_intensity(double omega_rad_s, double gamma_rad_s);
// |mu_eg|^2 = 3 pi eps0 hbar c^3 gamma / omega^3, (C m)^2.
double dipole_moment_squared(double omega_rad_s, double gamma_rad_s);

// Saturation of one (J, M) -> (J', M + p) component of a P or R line.
// polarization_weight is (eps* . e_{-p})^2; 1 under polarization switching.
double sat_component(Branch branch, int J, int M, int p, double s0,
                     double polarization_weight = 1.0);

// Sum of sat_component over p: s0 J/(2J+1) for P, s0 (J+1)/(2J+1) for R.
double sat_averaged(Branch branch, int J, double s0);

// Steady-state P- or R-branch scattering rate from ground level J (1/s).
double branch_rate(Branch branch, int J, double detuning_rad_s, double b_hz,
                   double gamma_rad_s, const SaturationContext& ctx);

// Rotational power delivered by the laser at level J (W), from the branch
// rates, and its form for 4 pi B (J+1) << |delta|.
double cooling_power(int J, double detuning_rad_s, double b_hz, double gamma_rad_s,
                     const SaturationContext& ctx);
double cooling_power_simplified(int J, double detuning_rad_s, double b_hz, double gamma_rad_s,
                                const SaturationContext& ctx);

// alpha with 1/tau_E = 2 alpha / I and I = hbar / (4 pi B); one sixth of the
// classical six-beam alpha at kappa = 1 when s_b = 6 s0.
double rotor_damping_coefficient(double detuning_rad_s, double gamma_rad_s,
                                 const SaturationContext& ctx);
double rotor_energy_damping_time(double detuning_rad_s, double b_hz, double gamma_rad_s,
                                 const SaturationContext& ctx);

// Positive root J0 of h B J0(J0+1) = -(hbar gamma/4)((1+s_b) gamma/(2 delta)
// + 2 delta/gamma) - 2 h B; nullopt when the right side is negative (no
// cooling fixed point).
std::optional<double> equilibrium_J0(double detuning_rad_s, double b_hz, double gamma_rad_s,
                                     const SaturationContext& ctx);

// Doppler limit of a general singlet band in K,
//   -(hbar gamma / 4 k_B)((1 + s_b) gamma/(2 delta) + 2 delta/gamma) - 2 h B w / k_B.
// w has no closed form and defaults to 0. Rejects detuning >= 0.
double doppler_limit_general(double detuning_rad_s, double b_hz, double gamma_rad_s,
                             const SaturationContext& ctx, double w = 0.0);

}  // namespace rotcool
