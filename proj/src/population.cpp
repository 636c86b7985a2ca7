#include "rotcool/population.hpp"

#include "rotcool/errors.hpp"

namespace rotcool {

LevelBasis::LevelBasis(int lambda, int j_max) : lambda_(lambda), j_max_(j_max) {
  if (lambda < 0 || lambda > 1) throw ValidationError("lambda", "must be 0 (Sigma) or 1 (Pi)");
  if (j_max < lambda) throw ValidationError("j_max", "must be >= Lambda");
  for (int J = lambda; J <= j_max; ++J) {
    states_.push_back({J, lambda, Parity::e});
    if (lambda > 0) states_.push_back({J, lambda, Parity::f});
  }
}

std::optional<std::size_t> LevelBasis::index_of(int J, Parity p) const {
  if (J < lambda_ || J > j_max_) return std::nullopt;
  const auto base = static_cast<std::size_t>(J - lambda_);
  if (lambda_ == 0) {
    if (p != Parity::e) return std::nullopt;
    return base;
  }
  return 2 * base + (p == Parity::f ? 1 : 0);
}

}  // namespace rotcool
