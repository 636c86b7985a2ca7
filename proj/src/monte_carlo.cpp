#include "rotcool/monte_carlo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "rotcool/constants.hpp"
#include "rotcool/errors.hpp"

namespace rotcool {

namespace {

const std::array<Eigen::Vector3d, 6>& beam_directions() {
  static const std::array<Eigen::Vector3d, 6> dirs = {
      Eigen::Vector3d::UnitX(), -Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
      -Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ(), -Eigen::Vector3d::UnitZ()};
  return dirs;
}

double peak_beam_rate(const Excitation& ex, double gamma) {
  return std::visit(
      [gamma](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, CwLaser>) {
          return 0.5 * gamma * l.s0 / (1.0 + l.s_total);
        } else {
          const double s = std::sin(0.5 * l.theta0);
          return s * s / l.rep_period_s;
        }
      },
      ex);
}

double beam_rate(const Excitation& ex, const DegreeOfFreedom& dof, const Eigen::Vector3d& pi,
                 const Eigen::Vector3d& khat, double gamma) {
  if (const auto* cw = std::get_if<CwLaser>(&ex)) return cw_scattering_rate(*cw, dof, pi, khat, gamma);
  return sech_scattering_rate(std::get<SechPulseTrain>(ex), dof, pi, khat);
}

Eigen::Vector3d isotropic(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> phi(0.0, 2.0 * constants::pi);
  const double z = u(rng);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double p = phi(rng);
  return {r * std::cos(p), r * std::sin(p), z};
}

struct ParticleTrace {
  std::vector<double> energy;  // at each sample
  std::uint64_t events = 0;
};

}  // namespace

MonteCarloResult jump_monte_carlo(const DegreeOfFreedom& dof, const Excitation& excitation,
                                  double gamma_rad_s, const MonteCarloConfig& config) {
  if (config.n_particles < 1) throw ValidationError("n_particles", "must be >= 1");
  if (!(config.t_end_s > 0.0)) throw ValidationError("t_end_s", "must be > 0");
  if (config.n_samples < 2) throw ValidationError("n_samples", "must be >= 2");
  if (!(config.initial_T_K >= 0.0)) throw ValidationError("initial_t_k", "must be >= 0");
  if (!(dof.mu > 0.0) || !(dof.kappa > 0.0)) throw ValidationError("dof", "mu and kappa must be > 0");
  if (const auto* p = std::get_if<SechPulseTrain>(&excitation)) p->validate();

  const double max_rate = 6.0 * peak_beam_rate(excitation, gamma_rad_s);
  double dt = config.dt_s > 0.0 ? config.dt_s : kMaxEventsPerStep / std::max(max_rate, 1e-300);
  if (max_rate * dt > kMaxEventsPerStep * (1.0 + 1e-12)) {
    throw NumericalError(fmt::format("step-size guard: event rate * dt = {:.3g} exceeds {}",
                                     max_rate * dt, kMaxEventsPerStep));
  }
  const auto n_steps = static_cast<std::uint64_t>(std::ceil(config.t_end_s / dt));
  dt = config.t_end_s / static_cast<double>(n_steps);

  const auto n_samples = static_cast<std::size_t>(config.n_samples);
  std::vector<std::uint64_t> sample_step(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    sample_step[k] = n_steps * k / (n_samples - 1);
  }

  const double sigma = std::sqrt(dof.mu * constants::k_B * config.initial_T_K);
  const double kick = constants::hbar * dof.kappa;
  const auto& dirs = beam_directions();

  auto run_particle = [&](std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                      static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(index) >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    Eigen::Vector3d pi(sigma * normal(rng), sigma * normal(rng), sigma * normal(rng));
    ParticleTrace trace;
    trace.energy.resize(n_samples);
    std::size_t next = 0;
    std::array<double, 6> rates{};
    for (std::uint64_t step = 0; step <= n_steps; ++step) {
      while (next < n_samples && sample_step[next] == step) trace.energy[next++] = dof.energy_J(pi);
      if (step == n_steps) break;
      double total = 0.0;
      for (std::size_t b = 0; b < 6; ++b) {
        rates[b] = beam_rate(excitation, dof, pi, dirs[b], gamma_rad_s);
        total += rates[b];
      }
      const double u = uniform(rng) / dt;
      if (u >= total) continue;
      // u is uniform on [0, total) here; it also selects the beam.
      std::size_t b = 0;
      double acc = rates[0];
      while (b < 5 && u >= acc) acc += rates[++b];
      pi += kick * dirs[b];
      pi += kick * isotropic(rng);
      ++trace.events;
    }
    return trace;
  };

  std::vector<ParticleTrace> traces(config.n_particles);
  unsigned n_threads = config.n_threads ? config.n_threads : std::thread::hardware_concurrency();
  n_threads = std::clamp<unsigned>(n_threads, 1u,
                                   static_cast<unsigned>(std::min<std::size_t>(config.n_particles, 256)));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < config.n_particles; ++i) traces[i] = run_particle(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < config.n_particles; i += n_threads) traces[i] = run_particle(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  MonteCarloResult out;
  out.dt_s = dt;
  out.t_s.resize(n_samples);
  out.mean_energy_J.assign(n_samples, 0.0);
  for (std::size_t k = 0; k < n_samples; ++k) {
    out.t_s[k] = static_cast<double>(sample_step[k]) * dt;
  }
  const std::size_t first = n_samples / 2;
  std::vector<double> per_particle(config.n_particles, 0.0);
  for (std::size_t i = 0; i < config.n_particles; ++i) {
    const auto& tr = traces[i];
    out.n_scattering_events += tr.events;
    for (std::size_t k = 0; k < n_samples; ++k) out.mean_energy_J[k] += tr.energy[k];
    for (std::size_t k = first; k < n_samples; ++k) per_particle[i] += tr.energy[k];
    per_particle[i] /= static_cast<double>(n_samples - first);
  }
  const auto n = static_cast<double>(config.n_particles);
  for (auto& e : out.mean_energy_J) e /= n;

  double mean = 0.0;
  for (const double e : per_particle) mean += e;
  mean /= n;
  double var = 0.0;
  for (const double e : per_particle) var += (e - mean) * (e - mean);
  var = config.n_particles > 1 ? var / (n - 1.0) : 0.0;
  const double to_T = 2.0 / (3.0 * constants::k_B);
  out.temperature_K = to_T * mean;
  out.temperature_stderr_K = to_T * std::sqrt(var / n);
  return out;
}

}  // namespace rotcool
