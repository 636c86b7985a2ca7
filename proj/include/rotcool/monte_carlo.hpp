#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "rotcool/classical.hpp"

namespace rotcool {

using Excitation = std::variant<CwLaser, SechPulseTrain>;

struct MonteCarloConfig {
  std::size_t n_particles = 1000;
  double t_end_s = 0.0;
  double dt_s = 0.0;          // 0 picks the largest step allowed by the guard
  double initial_T_K = 0.0;   // Maxwell-Boltzmann start; 0 starts at rest
  std::uint64_t seed = 1;
  int n_samples = 200;
  unsigned n_threads = 0;     // 0 uses hardware concurrency
};

// Largest allowed (total six-beam event rate) * dt.
inline constexpr double kMaxEventsPerStep = 0.1;

struct MonteCarloResult {
  std::vector<double> t_s;
  std::vector<double> mean_energy_J;  // ensemble mean of |pi|^2 / (2 mu)
  double temperature_K = 0.0;         // (2/3) <E> / k_B over the second half
  double temperature_stderr_K = 0.0;  // across particles
  double dt_s = 0.0;
  std::uint64_t n_scattering_events = 0;
};

// Six-beam (+-x, +-y, +-z) molasses. Each step a particle absorbs from beam b
// with probability Gamma_b dt, receiving hbar kappa along the beam plus an
// isotropic emission kick of the same magnitude. Every particle owns a random
// stream derived from (seed, particle index), so results do not depend on the
// thread count. Throws NumericalError when dt violates kMaxEventsPerStep.
MonteCarloResult jump_monte_carlo(const DegreeOfFreedom& dof, const Excitation& excitation,
                                  double gamma_rad_s, const MonteCarloConfig& config);

}  // namespace rotcool
