#include <cmath>

#include <fmt/format.h>

#include "rotcool/constants.hpp"
#include "rotcool/engine.hpp"
#include "rotcool/errors.hpp"

namespace rotcool {

double peak_psd(const PopulationState& state) {
  double best = 0.0;
  for (std::size_t i = 0; i < state.basis->size(); ++i) {
    const int J = (*state.basis)[i].J;
    best = std::max(best, state.p[static_cast<Eigen::Index>(i)] / (2.0 * J + 1.0));
  }
  return best;
}

Observables observables(const PopulationState& state, double b_lower_hz,
                        const ObservableOptions& options, const PopulationState* reference) {
  if (!state.basis || static_cast<std::size_t>(state.p.size()) != state.basis->size()) {
    throw ValidationError("population", "basis and population sizes differ");
  }
  const double to_K = constants::h * b_lower_hz / constants::k_B;
  Observables obs;
  double total = 0.0;
  double jj_sum = 0.0;
  double window_mass = 0.0;
  double window_jj = 0.0;
  double best = -1.0;

  // Boltzmann fit accumulators over (x = J(J+1), y = ln(P / (2J+1))).
  int n_fit = 0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;

  for (std::size_t i = 0; i < state.basis->size(); ++i) {
    const int J = (*state.basis)[i].J;
    const double p = state.p[static_cast<Eigen::Index>(i)];
    const double jj = J * (J + 1.0);
    total += p;
    obs.mean_J += p * J;
    jj_sum += p * jj;
    if (J <= options.cooled_j_cut) {
      window_mass += p;
      window_jj += p * jj;
    }
    const double psd = p / (2.0 * J + 1.0);
    if (psd > best) {
      best = psd;
      obs.peak_J = J;
    }
    if (J <= options.fit_j_max && p > 0.0) {
      const double y = std::log(psd);
      ++n_fit;
      sx += jj;
      sy += y;
      sxx += jj * jj;
      sxy += jj * y;
    }
  }
  obs.mean_J /= total;
  obs.T_eff_K = to_K * jj_sum / total;
  obs.T_eff_window_K = window_mass > 0.0 ? to_K * window_jj / window_mass : 0.0;
  obs.cooled_fraction = window_mass;
  obs.peak_PSD = best;

  if (n_fit < 3) {
    obs.fit_note = fmt::format("only {} populated states with J <= {}", n_fit, options.fit_j_max);
  } else {
    const double denom = n_fit * sxx - sx * sx;
    const double slope = (n_fit * sxy - sx * sy) / denom;
    if (!(slope < 0.0) || !std::isfinite(slope)) {
      obs.fit_note = "non-thermal window: fitted slope is not negative";
    } else {
      obs.T_fit_K = -to_K / slope;
    }
  }
  if (reference) {
    const double ref = peak_psd(*reference);
    obs.psd_enhancement = ref > 0.0 ? obs.peak_PSD / ref : 0.0;
  }
  return obs;
}

}  // namespace rotcool
