#include <cmath>

#include "decay.hpp"
#include "rotcool/constants.hpp"
#include "rotcool/engine.hpp"
#include "rotcool/errors.hpp"

namespace rotcool {

namespace detail {

std::vector<ExcitedDecay> decay_table(const MoleculeSpec& spec, const LevelBasis& ground,
                                      const LevelBasis& excited) {
  std::vector<ExcitedDecay> table(excited.size());
  for (std::size_t ie = 0; ie < excited.size(); ++ie) {
    const StateLabel& u = excited[ie];
    const double nominal = honl_london_sum(u.J, spec.lambda_upper, spec.lambda_lower);
    double kept = 0.0;
    auto& entry = table[ie];
    for (int J = u.J - 1; J <= u.J + 1; ++J) {
      for (const Parity p : {Parity::e, Parity::f}) {
        const auto ig = ground.index_of(J, p);
        if (!ig) continue;
        const double s = honl_london(u, ground[*ig]);
        if (s > 0.0) {
          entry.channels.push_back({*ig, s});
          kept += s;
        }
      }
    }
    entry.leak = std::max(0.0, 1.0 - kept / nominal);
    for (auto& c : entry.channels) c.branching /= kept;
  }
  return table;
}

}  // namespace detail

namespace {

// Rounds each column's off-diagonal entries to a common power-of-two quantum a
// few ulps below the column's total rate, then sets the diagonal to minus
// their sum. Every partial sum is then exact, so columns sum to exactly zero
// in any summation order.
void snap_columns(Eigen::SparseMatrix<double>& G) {
  for (Eigen::Index j = 0; j < G.outerSize(); ++j) {
    double total = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(G, j); it; ++it) {
      if (it.row() != j) total += it.value();
    }
    if (total == 0.0) continue;
    const double quantum = std::ldexp(1.0, std::ilogb(total) - 50);
    double sum = 0.0;
    double* diag = nullptr;
    for (Eigen::SparseMatrix<double>::InnerIterator it(G, j); it; ++it) {
      if (it.row() == j) {
        diag = &it.valueRef();
        continue;
      }
      it.valueRef() = std::nearbyint(it.value() / quantum) * quantum;
      sum += it.value();
    }
    *diag = -sum;
  }
}

}  // namespace

RateGenerator build_generator(const MoleculeSpec& spec, const NarrowbandLaser& laser) {
  spec.validate();
  laser.saturation.validate();
  if (!std::isfinite(laser.detuning_rad_s)) throw ValidationError("detuning", "must be finite");

  RateGenerator gen;
  gen.basis = ground_basis(spec);
  const auto upper = excited_basis(spec);
  const auto decays = detail::decay_table(spec, *gen.basis, *upper);
  const auto n = static_cast<Eigen::Index>(gen.basis->size());
  gen.absorption_rate = Eigen::VectorXd::Zero(n);
  gen.leak_rate = Eigen::VectorXd::Zero(n);

  const auto& ctx = laser.saturation;
  const double gamma = spec.gamma_rad_s;
  const double switching = ctx.polarization_switching ? 1.0 / 3.0 : 1.0;

  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd diagonal = Eigen::VectorXd::Zero(n);
  for (const auto& line : line_list(spec)) {
    const auto ig = *gen.basis->index_of(line.lower.J, line.lower.parity);
    const auto ie = *upper->index_of(line.upper.J, line.upper.parity);
    const double s = ctx.s0 * line.strength / (2.0 * line.lower.J + 1.0);
    const double x = 2.0 * (laser.detuning_rad_s - 2.0 * constants::pi * line.offset_hz) / gamma;
    const double rate = switching * 0.5 * gamma * s / (1.0 + ctx.s_b + x * x);
    if (rate == 0.0) continue;
    const auto col = static_cast<Eigen::Index>(ig);
    gen.absorption_rate[col] += rate;
    gen.leak_rate[col] += rate * decays[ie].leak;
    for (const auto& ch : decays[ie].channels) {
      if (ch.ground == ig) continue;
      const double r = rate * ch.branching;
      triplets.emplace_back(static_cast<Eigen::Index>(ch.ground), col, r);
      diagonal[col] -= r;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (diagonal[i] != 0.0) triplets.emplace_back(i, i, diagonal[i]);
  }
  gen.G.resize(n, n);
  gen.G.setFromTriplets(triplets.begin(), triplets.end());
  gen.G.makeCompressed();
  snap_columns(gen.G);
  return gen;
}

double boundary_flux_fraction(const RateGenerator& gen, const Eigen::VectorXd& p) {
  const double total = gen.absorption_rate.dot(p);
  if (!(total > 0.0)) return 0.0;
  return gen.leak_rate.dot(p) / total;
}

}  // namespace rotcool
