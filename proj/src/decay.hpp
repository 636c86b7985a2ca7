#pragma once

#include <cstddef>
#include <vector>

#include "rotcool/population.hpp"
#include "rotcool/structure.hpp"

namespace rotcool::detail {

struct DecayChannel {
  std::size_t ground;
  double branching;  // renormalized over in-basis levels
};

struct ExcitedDecay {
  std::vector<DecayChannel> channels;
  double leak = 0.0;  // share of the nominal branching that falls outside the basis
};

// Indexed like the excited basis.
std::vector<ExcitedDecay> decay_table(const MoleculeSpec& spec, const LevelBasis& ground,
                                      const LevelBasis& excited);

}  // namespace rotcool::detail
