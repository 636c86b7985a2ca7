#include "rotcool/structure.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "rotcool/constants.hpp"
#include "rotcool/errors.hpp"

namespace rotcool {

namespace {

constexpr double kTailTolerance = 1e-6;
constexpr int kJMaxCap = 2000;

// Energies measured from the lowest level so that T0 -> 0 stays finite.
double boltzmann_weight(double b_hz, int lambda, int J, double T0_K) {
  const double x = constants::h * b_hz / (constants::k_B * T0_K);
  return (2.0 * J + 1.0) * std::exp(-x * (J * (J + 1.0) - lambda * (lambda + 1.0)));
}

// Untruncated norm; terms past x J(J+1) > 800 underflow.
double thermal_norm(double b_hz, int lambda, double T0_K) {
  const double x = constants::h * b_hz / (constants::k_B * T0_K);
  double total = 0.0;
  for (int J = lambda;; ++J) {
    total += boltzmann_weight(b_hz, lambda, J, T0_K);
    if (x * (J * (J + 1.0) - lambda * (lambda + 1.0)) > 800.0) break;
  }
  return total;
}

void check_temperature(double T0_K) {
  if (!(T0_K > 0.0) || !std::isfinite(T0_K)) throw ValidationError("initial_t_k", "must be > 0");
}

}  // namespace

void MoleculeSpec::validate() const {
  if (!(b_lower_hz > 0.0)) throw ValidationError("b_lower_hz", "must be > 0");
  if (!(b_upper_hz > 0.0)) throw ValidationError("b_upper_hz", "must be > 0");
  if (lambda_lower < 0 || lambda_lower > 1) throw ValidationError("lambda_lower", "must be 0 or 1");
  if (lambda_upper < 0 || lambda_upper > 1) throw ValidationError("lambda_upper", "must be 0 or 1");
  if (!(gamma_rad_s > 0.0)) throw ValidationError("gamma", "must be > 0");
  if (j_max < lambda_lower + 2) throw ValidationError("j_max", "must be >= Lambda + 2");
  if (!std::isfinite(q_lower_hz)) throw ValidationError("q_lower_hz", "must be finite");
}

double level_energy_hz(const MoleculeSpec& spec, Manifold m, const StateLabel& s) {
  const bool lower = m == Manifold::lower;
  const int lambda = lower ? spec.lambda_lower : spec.lambda_upper;
  if (s.J < lambda) throw ValidationError("J", "must be >= Lambda");
  const double jj = s.J * (s.J + 1.0);
  const double b = lower ? spec.b_lower_hz : spec.b_upper_hz;
  double e = b * jj;
  if (lower && lambda > 0) e += static_cast<int>(s.parity) * 0.5 * spec.q_lower_hz * jj;
  return e;
}

std::shared_ptr<const LevelBasis> ground_basis(const MoleculeSpec& spec) {
  return std::make_shared<const LevelBasis>(spec.lambda_lower, spec.j_max);
}

std::shared_ptr<const LevelBasis> excited_basis(const MoleculeSpec& spec) {
  return std::make_shared<const LevelBasis>(spec.lambda_upper, spec.j_max + 1);
}

std::vector<LineEntry> line_list(const MoleculeSpec& spec) {
  spec.validate();
  const LevelBasis lower(spec.lambda_lower, spec.j_max);
  const LevelBasis upper(spec.lambda_upper, spec.j_max + 1);
  std::vector<LineEntry> lines;
  for (const auto& g : lower.states()) {
    for (int ju = g.J - 1; ju <= g.J + 1; ++ju) {
      for (const Parity p : {Parity::e, Parity::f}) {
        const auto iu = upper.index_of(ju, p);
        if (!iu) continue;
        const StateLabel& u = upper[*iu];
        if (!dipole_allowed(u, g)) continue;
        const double s = honl_london(u, g);
        if (!(s > 0.0)) continue;
        lines.push_back({branch_of(u.J, g.J), g, u,
                         level_energy_hz(spec, Manifold::upper, u) -
                             level_energy_hz(spec, Manifold::lower, g),
                         s});
      }
    }
  }
  return lines;
}

double thermal_tail(double b_hz, int lambda, int j_max, double T0_K) {
  check_temperature(T0_K);
  const double total = thermal_norm(b_hz, lambda, T0_K);
  double kept = 0.0;
  for (int J = lambda; J <= j_max; ++J) kept += boltzmann_weight(b_hz, lambda, J, T0_K);
  return std::max(0.0, 1.0 - kept / total);
}

int default_j_max(double b_hz, int lambda, double T0_K) {
  check_temperature(T0_K);
  if (!(b_hz > 0.0)) throw ValidationError("b_lower_hz", "must be > 0");
  const double total = thermal_norm(b_hz, lambda, T0_K);
  double kept = 0.0;
  int J = lambda;
  for (; J < kJMaxCap; ++J) {
    kept += boltzmann_weight(b_hz, lambda, J, T0_K);
    if (J >= lambda + 2 && 1.0 - kept / total < kTailTolerance) break;
  }
  return J;
}

PopulationState thermal_distribution(const MoleculeSpec& spec, double T0_K) {
  spec.validate();
  check_temperature(T0_K);
  const double tail = thermal_tail(spec.b_lower_hz, spec.lambda_lower, spec.j_max, T0_K);
  if (tail > kTailTolerance) {
    throw ValidationError("j_max", fmt::format("truncation discards {:.3g} of the thermal norm "
                                               "(limit 1e-6); raise j_max",
                                               tail));
  }
  PopulationState st;
  st.basis = ground_basis(spec);
  st.p.resize(static_cast<Eigen::Index>(st.basis->size()));
  for (std::size_t i = 0; i < st.basis->size(); ++i) {
    st.p[static_cast<Eigen::Index>(i)] =
        boltzmann_weight(spec.b_lower_hz, spec.lambda_lower, (*st.basis)[i].J, T0_K);
  }
  st.p /= st.p.sum();
  return st;
}

double capture_J(const MoleculeSpec& spec) {
  return (spec.gamma_rad_s / (2.0 * constants::pi)) / (2.0 * spec.b_lower_hz);
}

void write_fortrat_csv(std::ostream& os, const std::vector<LineEntry>& lines) {
  os << "branch,J_lower,eps_lower,offset_hz,strength\n";
  for (const auto& l : lines) {
    os << fmt::format("{},{},{},{:.17g},{:.17g}\n", to_string(l.branch), l.lower.J,
                      to_string(l.lower.parity), l.offset_hz, l.strength);
  }
}

}  // namespace rotcool
