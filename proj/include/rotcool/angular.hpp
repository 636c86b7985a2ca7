#pragma once

#include <array>
#include <string_view>

namespace rotcool {

// Rotational parity label; the numeric value is the conventional epsilon.
enum class Parity : int { e = +1, f = -1 };

// Branch of a transition, classified by Delta J = J_upper - J_lower.
enum class Branch { P, Q, R };

std::string_view to_string(Parity p);
std::string_view to_string(Branch b);
Branch branch_of(int j_upper, int j_lower);

// A rotational level of a singlet linear molecule.
struct StateLabel {
  int J = 0;
  int Lambda = 0;
  Parity parity = Parity::e;

  friend bool operator==(const StateLabel&, const StateLabel&) = default;
};

// Arguments of a 3j symbol, held as twice their value so that half-integers
// are exact. Construction rejects malformed arguments (negative j, |m| > j,
// j and m of different integrality).
class ThreeJArgs {
public:
  ThreeJArgs(int j1, int j2, int j3, int m1, int m2, int m3);

  static ThreeJArgs from_twice(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3);

  const std::array<int, 3>& twice_j() const noexcept { return tj_; }
  const std::array<int, 3>& twice_m() const noexcept { return tm_; }

private:
  ThreeJArgs() = default;
  void validate() const;

  std::array<int, 3> tj_{};
  std::array<int, 3> tm_{};
};

/// Wigner 3j symbol by the Racah single-sum formula.
///
/// The alternating sum is accumulated as an exact rational; only the
/// factorial prefactor under the square root is carried in floating point
/// (64-bit mantissa), so there is no cancellation error at large j.
/// Returns 0 whenever a selection rule (m-sum, triangle, parity of the
/// all-zero-m case) forbids the symbol.
double wigner3j(const ThreeJArgs& args);
double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3);

// Electric-dipole selection rules: |Delta J| <= 1, e<->e and f<->f for
// Delta J = +-1, e<->f for Delta J = 0.
bool dipole_allowed(const StateLabel& upper, const StateLabel& lower);

/// Hönl-London factor for parity eigenstates,
///   S = (1 + d(L',0) + d(L,0) - 2 d(L',0) d(L,0)) (2J'+1)(2J+1)
///       * (J' 1 J; -L', L'-L, L)^2,
/// zero for forbidden lines. Throws ValidationError for |L'-L| > 1 or J < L.
double honl_london(const StateLabel& upper, const StateLabel& lower);

// Sum of honl_london over every lower level a given upper level decays to:
// (1 + d(L',0) d(L,1)) (2J'+1).
double honl_london_sum(int j_upper, int lambda_upper, int lambda_lower);

// Spontaneous-emission branching ratio upper -> lower.
double emission_branching(const StateLabel& upper, const StateLabel& lower);

}  // namespace rotcool
