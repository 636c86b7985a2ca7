#include "rotcool/rates.hpp"

#include <cmath>
#include <cstdlib>

#include "rotcool/constants.hpp"
#include "rotcool/errors.hpp"

namespace rotcool {

using constants::h;
using constants::hbar;
using constants::pi;

namespace {

double switching_factor(const SaturationContext& ctx) {
  return ctx.polarization_switching ? 1.0 / 3.0 : 1.0;
}

void require_j(int J) {
  if (J < 0) throw ValidationError("J", "must be >= 0");
}

}  // namespace

void SaturationContext::validate() const {
  if (!(s0 >= 0.0)) throw ValidationError("s0", "must be >= 0");
  if (!(s_b >= 0.0)) throw ValidationError("s_b", "must be >= 0");
}

double saturation_intensity(double omega_rad_s, double gamma_rad_s) {
  if (!(omega_rad_s > 0.0) || !(gamma_rad_s > 0.0)) {
    throw ValidationError("omega", "omega and gamma must be > 0");
  }
  const double c = constants::c;
  return hbar * omega_rad_s * omega_rad_s * omega_rad_s * gamma_rad_s / (12.0 * pi * c * c);
}

double dipole_moment_squared(double omega_rad_s, double gamma_rad_s) {
  if (!(omega_rad_s > 0.0) || !(gamma_rad_s > 0.0)) {
    throw ValidationError("omega", "omega and gamma must be > 0");
  }
  const double c = constants::c;
  return 3.0 * pi * constants::epsilon_0 * hbar * c * c * c * gamma_rad_s /
         (omega_rad_s * omega_rad_s * omega_rad_s);
}

double sat_component(Branch branch, int J, int M, int p, double s0, double polarization_weight) {
  require_j(J);
  if (std::abs(M) > J) throw ValidationError("M", "|M| must not exceed J");
  if (p < -1 || p > 1) throw ValidationError("p", "must be -1, 0 or +1");
  int j_upper = 0;
  double multiplicity = 0.0;
  switch (branch) {
    case Branch::P: j_upper = J - 1; multiplicity = J; break;
    case Branch::R: j_upper = J + 1; multiplicity = J + 1; break;
    case Branch::Q: throw ValidationError("branch", "sat_component covers P and R only");
  }
  if (j_upper < 0 || std::abs(M + p) > j_upper) return 0.0;
  const double tj = wigner3j(j_upper, 1, J, -M - p, p, M);
  return s0 * polarization_weight * multiplicity * tj * tj;
}

double sat_averaged(Branch branch, int J, double s0) {
  require_j(J);
  switch (branch) {
    case Branch::P: return s0 * J / (2.0 * J + 1.0);
    case Branch::R: return s0 * (J + 1.0) / (2.0 * J + 1.0);
    case Branch::Q: break;
  }
  throw ValidationError("branch", "sat_averaged covers P and R only");
}

double branch_rate(Branch branch, int J, double detuning_rad_s, double b_hz, double gamma_rad_s,
                   const SaturationContext& ctx) {
  const double s = sat_averaged(branch, J, ctx.s0);
  const double line = branch == Branch::P ? -4.0 * pi * b_hz * J : 4.0 * pi * b_hz * (J + 1.0);
  const double x = 2.0 * (detuning_rad_s - line) / gamma_rad_s;
  return switching_factor(ctx) * 0.5 * gamma_rad_s * s / (1.0 + ctx.s_b + x * x);
}

double cooling_power(int J, double detuning_rad_s, double b_hz, double gamma_rad_s,
                     const SaturationContext& ctx) {
  const double gr = branch_rate(Branch::R, J, detuning_rad_s, b_hz, gamma_rad_s, ctx);
  const double gp = branch_rate(Branch::P, J, detuning_rad_s, b_hz, gamma_rad_s, ctx);
  return 2.0 * h * b_hz * (J + 2.0) * gr - 2.0 * h * b_hz * (J - 1.0) * gp;
}

double cooling_power_simplified(int J, double detuning_rad_s, double b_hz, double gamma_rad_s,
                                const SaturationContext& ctx) {
  require_j(J);
  const double g = gamma_rad_s;
  const double d = detuning_rad_s;
  const double den = g * g * (1.0 + ctx.s_b) + 4.0 * d * d;
  const double jj = J * (J + 1.0);
  return switching_factor(ctx) * g * g * g * ctx.s0 / den *
         (2.0 * h * b_hz + h * b_hz * (jj + 2.0) * 32.0 * pi * d * b_hz / den);
}

double rotor_damping_coefficient(double detuning_rad_s, double gamma_rad_s,
                                 const SaturationContext& ctx) {
  const double g = gamma_rad_s;
  const double d = detuning_rad_s;
  const double den = g * g * (1.0 + ctx.s_b) + 4.0 * d * d;
  return -d * 4.0 * switching_factor(ctx) * hbar * g * g * g * ctx.s0 / (den * den);
}

double rotor_energy_damping_time(double detuning_rad_s, double b_hz, double gamma_rad_s,
                                 const SaturationContext& ctx) {
  const double alpha = rotor_damping_coefficient(detuning_rad_s, gamma_rad_s, ctx);
  return 1.0 / (alpha * 8.0 * pi * b_hz / hbar);
}

std::optional<double> equilibrium_J0(double detuning_rad_s, double b_hz, double gamma_rad_s,
                                     const SaturationContext& ctx) {
  if (!(detuning_rad_s < 0.0)) return std::nullopt;
  const double g = gamma_rad_s;
  const double d = detuning_rad_s;
  const double rhs =
      -(hbar * g / 4.0) * ((1.0 + ctx.s_b) * g / (2.0 * d) + 2.0 * d / g) - 2.0 * h * b_hz;
  if (rhs < 0.0) return std::nullopt;
  // J0^2 + J0 - y = 0
  const double y = rhs / (h * b_hz);
  return 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * y));
}

double doppler_limit_general(double detuning_rad_s, double b_hz, double gamma_rad_s,
                             const SaturationContext& ctx, double w) {
  if (!(detuning_rad_s < 0.0)) throw ValidationError("detuning", "Doppler limit requires detuning < 0");
  const double g = gamma_rad_s;
  const double d = detuning_rad_s;
  return -(hbar * g / (4.0 * constants::k_B)) * ((1.0 + ctx.s_b) * g / (2.0 * d) + 2.0 * d / g) -
         2.0 * h * b_hz * w / constants::k_B;
}

}  // namespace rotcool
