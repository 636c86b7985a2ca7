#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "rotcool/angular.hpp"

namespace rotcool {

// Ordered set of rotational levels of one electronic manifold, J ascending
// and e before f within a J. Σ manifolds carry e levels only.
class LevelBasis {
public:
  LevelBasis(int lambda, int j_max);

  int lambda() const noexcept { return lambda_; }
  int j_max() const noexcept { return j_max_; }
  std::size_t size() const noexcept { return states_.size(); }
  const StateLabel& operator[](std::size_t i) const { return states_[i]; }
  const std::vector<StateLabel>& states() const noexcept { return states_; }

  std::optional<std::size_t> index_of(int J, Parity p) const;

private:
  int lambda_;
  int j_max_;
  std::vector<StateLabel> states_;
};

// Occupation probabilities over a ground-state basis at time t.
struct PopulationState {
  std::shared_ptr<const LevelBasis> basis;
  Eigen::VectorXd p;
  double t_s = 0.0;

  double total() const { return p.sum(); }
};

}  // namespace rotcool
