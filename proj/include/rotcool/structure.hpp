#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "rotcool/angular.hpp"
#include "rotcool/population.hpp"

namespace rotcool {

enum class Manifold { lower, upper };

// Level scheme of a singlet band ¹Λ' <- ¹Λ. Frequencies are cyclic (Hz),
// gamma is the full spontaneous width in rad/s.
struct MoleculeSpec {
  double b_lower_hz = 0.0;
  double b_upper_hz = 0.0;
  int lambda_lower = 0;
  int lambda_upper = 0;
  double q_lower_hz = 0.0;  // Λ-doubling, lower manifold only
  double gamma_rad_s = 0.0;
  int j_max = 0;            // lower-manifold truncation; upper runs to j_max + 1

  void validate() const;

  friend bool operator==(const MoleculeSpec&, const MoleculeSpec&) = default;
};

// E/h in Hz. Π levels: B J(J+1) + ε (q/2) J(J+1), with q applied to the
// lower manifold only.
double level_energy_hz(const MoleculeSpec& spec, Manifold m, const StateLabel& s);

std::shared_ptr<const LevelBasis> ground_basis(const MoleculeSpec& spec);
std::shared_ptr<const LevelBasis> excited_basis(const MoleculeSpec& spec);

struct LineEntry {
  Branch branch;
  StateLabel lower;
  StateLabel upper;
  double offset_hz;  // E_upper - E_lower relative to the band origin
  double strength;   // Hönl-London factor
};

// Every dipole-allowed line with nonzero strength from a lower level up to
// j_max, ordered by lower level then upper J.
std::vector<LineEntry> line_list(const MoleculeSpec& spec);

// Boltzmann distribution over the ground basis. Fails with ValidationError
// when the truncated tail exceeds 1e-6 of the untruncated norm.
PopulationState thermal_distribution(const MoleculeSpec& spec, double T0_K);

// Fraction of the untruncated thermal norm above j_max.
double thermal_tail(double b_hz, int lambda, int j_max, double T0_K);

// Smallest J_max whose thermal tail is below 1e-6, capped at 2000.
int default_j_max(double b_hz, int lambda, double T0_K);

// gamma / (4 pi B_lower)
double capture_J(const MoleculeSpec& spec);

// Columns branch,J_lower,eps_lower,offset_hz,strength.
void write_fortrat_csv(std::ostream& os, const std::vector<LineEntry>& lines);

}  // namespace rotcool
