#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "rotcool/classical.hpp"
#include "rotcool/population.hpp"
#include "rotcool/rates.hpp"
#include "rotcool/structure.hpp"

namespace rotcool {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Lifetime-broadened laser for the rotor engine; detuning from the band origin.
struct NarrowbandLaser {
  double detuning_rad_s = 0.0;
  SaturationContext saturation;
};

// dP/dt = G P over the ground (J, eps) basis. G[g', g] is the rate g -> g'
// through one absorption and one spontaneous decay; columns sum to zero.
struct RateGenerator {
  std::shared_ptr<const LevelBasis> basis;
  SparseMatrix G;
  Eigen::VectorXd absorption_rate;  // total excitation rate out of each level, 1/s
  Eigen::VectorXd leak_rate;        // part of it whose decay would leave the basis
};

// Decays that would land above J_max are returned to the in-basis levels in
// proportion to their branching ratios; the lost share is kept in leak_rate.
RateGenerator build_generator(const MoleculeSpec& spec, const NarrowbandLaser& laser);

// Fraction of the scattering flux of P that reaches the truncation boundary.
double boundary_flux_fraction(const RateGenerator& gen, const Eigen::VectorXd& p);

// Above this boundary flux fraction the runner emits a truncation warning.
inline constexpr double kBoundaryFluxWarning = 1e-6;

enum class PropagationMethod { uniformization, explicit_stepping, matrix_exponential };

// P(t) = exp(G (t - t0)) P0 at each requested time (ascending, >= P0.t_s).
// uniformization: Poisson-weighted powers of I + G/L, truncation below 1e-15.
// explicit_stepping: embedded Dormand-Prince 5(4), dt <= 0.1 / max|G_ii|.
// matrix_exponential: dense scaling-and-squaring Pade, intended for N <= 3000.
// Negative entries above -1e-10 are clipped to zero; anything lower throws
// NumericalError.
std::vector<PopulationState> propagate(const SparseMatrix& G, const PopulationState& p0,
                                       const std::vector<double>& output_times_s,
                                       PropagationMethod method = PropagationMethod::uniformization);
std::vector<PopulationState> propagate(const RateGenerator& gen, const PopulationState& p0,
                                       const std::vector<double>& output_times_s,
                                       PropagationMethod method = PropagationMethod::uniformization);

// Stationary distribution of dP/dt = G P, solved separately on every
// connected class of levels and scaled to the class's share of P0.
PopulationState steady_state(const SparseMatrix& G, const PopulationState& p0);

// One pulse followed by complete spontaneous decay: M[g', g] is the
// probability of ending in g' when starting in g. Columns sum to one.
struct PulseMap {
  std::shared_ptr<const LevelBasis> basis;
  Eigen::MatrixXd M;
  double rep_period_s = 0.0;
  double max_excitation = 0.0;  // largest per-level sum of excitation probabilities
};

// Each line is driven with area theta0 sqrt(S / (2J+1)) and Rosen-Zener
// excitation at detuning delta - 2 pi offset. Throws RegimeError for the
// comb regime ("comb_regime"), N theta0 >= pi ("weak_pulse", N the number of
// lines of a level within the sech^2 half-maximum) and excitation sums
// above one ("excitation_sum").
PulseMap build_pulse_map(const MoleculeSpec& spec, const SechPulseTrain& pulse);

// M^n P0 by binary exponentiation; time advances by n T_r.
PopulationState apply_pulses(const PulseMap& map, const PopulationState& p0, std::uint64_t n_pulses);

// Steady state of the pulse map, per connected class.
PopulationState steady_state(const PulseMap& map, const PopulationState& p0);

struct ObservableOptions {
  int fit_j_max = 15;      // Boltzmann fit window J <= fit_j_max
  int cooled_j_cut = 30;   // cooled fraction and windowed T_eff use J <= cooled_j_cut
};

struct Observables {
  double mean_J = 0.0;
  double T_eff_K = 0.0;          // h B <J(J+1)> / k_B, full distribution
  double T_eff_window_K = 0.0;   // same, restricted to J <= cooled_j_cut and renormalized
  std::optional<double> T_fit_K; // unweighted fit of ln(P/(2J+1)) vs J(J+1)
  std::string fit_note;          // reason when T_fit_K is empty
  double peak_PSD = 0.0;         // max P / (2J+1)
  int peak_J = 0;
  double psd_enhancement = 0.0;  // peak_PSD / reference peak_PSD, 0 without reference
  double cooled_fraction = 0.0;  // sum of P for J <= cooled_j_cut
};

Observables observables(const PopulationState& state, double b_lower_hz,
                        const ObservableOptions& options = {},
                        const PopulationState* reference = nullptr);

double peak_psd(const PopulationState& state);

}  // namespace rotcool
