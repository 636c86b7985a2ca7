#include <cmath>

#include <fmt/format.h>

#include "decay.hpp"
#include "rotcool/constants.hpp"
#include "rotcool/engine.hpp"
#include "rotcool/errors.hpp"

namespace rotcool {

namespace {

double sech2(double x) {
  const double c = std::cosh(x);
  return 1.0 / (c * c);
}

}  // namespace

PulseMap build_pulse_map(const MoleculeSpec& spec, const SechPulseTrain& pulse) {
  spec.validate();
  pulse.validate();
  check_comb_regime(pulse, spec.gamma_rad_s);

  PulseMap map;
  map.basis = ground_basis(spec);
  map.rep_period_s = pulse.rep_period_s;
  const auto upper = excited_basis(spec);
  const auto decays = detail::decay_table(spec, *map.basis, *upper);
  const auto n = static_cast<Eigen::Index>(map.basis->size());
  map.M = Eigen::MatrixXd::Zero(n, n);

  Eigen::VectorXd excitation = Eigen::VectorXd::Zero(n);
  std::vector<int> bright(static_cast<std::size_t>(n), 0);
  for (const auto& line : line_list(spec)) {
    const auto ig = *map.basis->index_of(line.lower.J, line.lower.parity);
    const auto ie = *upper->index_of(line.upper.J, line.upper.parity);
    const double area = pulse.theta0 * std::sqrt(line.strength / (2.0 * line.lower.J + 1.0));
    const double detuning = pulse.detuning_rad_s - 2.0 * constants::pi * line.offset_hz;
    const double shape = sech2(0.5 * detuning * pulse.tau_p_s);
    if (shape >= 0.5) ++bright[ig];
    const double s = std::sin(0.5 * area);
    const double p_ex = s * s * shape;
    if (p_ex == 0.0) continue;
    const auto col = static_cast<Eigen::Index>(ig);
    excitation[col] += p_ex;
    for (const auto& ch : decays[ie].channels) {
      map.M(static_cast<Eigen::Index>(ch.ground), col) += p_ex * ch.branching;
    }
  }

  for (Eigen::Index g = 0; g < n; ++g) {
    const auto& s = (*map.basis)[static_cast<std::size_t>(g)];
    const int n_bright = bright[static_cast<std::size_t>(g)];
    if (n_bright * pulse.theta0 >= constants::pi) {
      throw RegimeError("weak_pulse",
                        fmt::format("level J={}{} has {} lines in the pulse bandwidth; "
                                    "N theta0 = {:.3g} is not << pi",
                                    s.J, to_string(s.parity), n_bright, n_bright * pulse.theta0));
    }
    if (excitation[g] > 1.0) {
      throw RegimeError("excitation_sum",
                        fmt::format("level J={}{} has total excitation probability {:.4g} > 1",
                                    s.J, to_string(s.parity), excitation[g]));
    }
    map.M(g, g) += 1.0 - excitation[g];
  }
  map.max_excitation = n > 0 ? excitation.maxCoeff() : 0.0;
  return map;
}

PopulationState apply_pulses(const PulseMap& map, const PopulationState& p0, std::uint64_t n_pulses) {
  if (p0.p.size() != map.M.cols()) throw ValidationError("population", "size does not match the map");
  PopulationState out = p0;
  Eigen::MatrixXd base = map.M;
  std::uint64_t n = n_pulses;
  while (n > 0) {
    if (n & 1u) out.p = base * out.p;
    n >>= 1u;
    if (n > 0) base = base * base;
  }
  for (Eigen::Index i = 0; i < out.p.size(); ++i) {
    if (out.p[i] < 0.0) {
      if (out.p[i] < -1e-10) throw NumericalError("pulse map produced a negative population");
      out.p[i] = 0.0;
    }
  }
  out.t_s = p0.t_s + static_cast<double>(n_pulses) * map.rep_period_s;
  return out;
}

PopulationState steady_state(const PulseMap& map, const PopulationState& p0) {
  Eigen::MatrixXd g = map.M;
  g.diagonal().array() -= 1.0;
  const SparseMatrix sparse = g.sparseView(0.0, 0.0);
  return steady_state(sparse, p0);
}

}  // namespace rotcool
