#include <cmath>

#include <doctest.h>

#include "../oracles/racah_exact.hpp"
#include "rotcool/angular.hpp"
#include "rotcool/errors.hpp"

using namespace rotcool;

namespace {
bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }
}  // namespace

TEST_CASE("3j frozen values") {
  CHECK(near(wigner3j(1, 1, 0, 0, 0, 0), -0.57735026918962573, 1e-15));
  CHECK(near(wigner3j(2, 1, 1, 1, 0, -1), -0.31622776601683794, 1e-15));
  CHECK(near(wigner3j(1, 1, 0, -1, 1, 0), std::sqrt(3.0) / 3.0, 1e-15));
  CHECK(near(wigner3j(3, 2, 1, 1, -1, 0), 0.27602622373694169, 1e-15));
  CHECK(near(wigner3j(10, 9, 1, -3, 2, 1), -0.13981728140845512, 1e-15));
  CHECK(near(wigner3j(12, 11, 1, 0, 0, 0), 0.14446302370292305, 1e-15));
  CHECK(near(wigner3j(5, 4, 3, 2, -1, -1), 0.14103623609278537, 1e-15));
}

TEST_CASE("3j selection rules give exact zeros") {
  CHECK(wigner3j(1, 1, 1, 0, 0, 0) == 0.0);  // odd j sum with m = 0
  CHECK(wigner3j(2, 1, 1, 1, 1, 0) == 0.0);  // m sum
  CHECK(wigner3j(5, 1, 1, 0, 0, 0) == 0.0);  // triangle
}

TEST_CASE("3j half-integer arguments") {
  // (1/2 1/2 1; 1/2 -1/2 0) = 1/sqrt(6)
  CHECK(near(wigner3j(ThreeJArgs::from_twice(1, 1, 2, 1, -1, 0)), 1.0 / std::sqrt(6.0), 1e-15));
  CHECK_THROWS_AS(ThreeJArgs::from_twice(1, 2, 2, 0, 0, 0), ValidationError);
  CHECK_THROWS_AS(ThreeJArgs(1, 1, 1, 2, -2, 0), ValidationError);
}

TEST_CASE("3j agrees with the exact rational sum for J <= 50") {
  for (int J = 0; J <= 50; J += 7) {
    for (int Jp : {J - 1, J, J + 1}) {
      if (Jp < 0) continue;
      for (int m = -std::min(J, Jp); m <= std::min(J, Jp); m += 3) {
        for (int p = -1; p <= 1; ++p) {
          if (std::abs(m + p) > Jp) continue;
          const double ref = oracle::three_j(Jp, 1, J, -(m + p), p, m);
          CHECK(near(wigner3j(Jp, 1, J, -(m + p), p, m), ref, 1e-14));
        }
      }
    }
  }
}

TEST_CASE("3j orthogonality sum rule for J <= 50") {
  // sum over m, p of (J' 1 J; -m', p, m)^2 = 1 for every allowed J'
  for (int J = 0; J <= 50; ++J) {
    for (int Jp = std::max(0, J - 1); Jp <= J + 1; ++Jp) {
      if (J == 0 && Jp == 0) continue;
      double s = 0.0;
      for (int m = -J; m <= J; ++m) {
        for (int p = -1; p <= 1; ++p) {
          if (std::abs(m + p) > Jp) continue;
          const double w = wigner3j(Jp, 1, J, -(m + p), p, m);
          s += w * w;
        }
      }
      CHECK(near(s, 1.0, 1e-12));
    }
  }
}

TEST_CASE("Honl-London sum rules for J <= 50") {
  for (const auto [lu, ll] : {std::pair{0, 0}, std::pair{0, 1}, std::pair{1, 0}, std::pair{1, 1}}) {
    for (int Ju = std::max(lu, 1); Ju <= 50; ++Ju) {
      for (const Parity pu : {Parity::e, Parity::f}) {
        if (lu == 0 && pu == Parity::f) continue;
        const StateLabel upper{Ju, lu, pu};
        double total = 0.0;
        double branching = 0.0;
        for (int Jl = std::max(ll, Ju - 1); Jl <= Ju + 1; ++Jl) {
          for (const Parity pl : {Parity::e, Parity::f}) {
            if (ll == 0 && pl == Parity::f) continue;
            const StateLabel lower{Jl, ll, pl};
            total += honl_london(upper, lower);
            branching += emission_branching(upper, lower);
          }
        }
        CHECK(near(total, honl_london_sum(Ju, lu, ll), 1e-12 * total));
        CHECK(near(branching, 1.0, 1e-12));
      }
    }
  }
}

TEST_CASE("Sigma-Sigma Honl-London closed forms") {
  for (int J = 1; J <= 20; ++J) {
    const StateLabel lower{J, 0, Parity::e};
    CHECK(near(honl_london({J + 1, 0, Parity::e}, lower), J + 1.0, 1e-12));  // R(J)
    CHECK(near(honl_london({J - 1, 0, Parity::e}, lower), static_cast<double>(J), 1e-12));  // P(J)
  }
}

TEST_CASE("dipole selection rules") {
  CHECK(dipole_allowed({2, 1, Parity::e}, {1, 1, Parity::e}));
  CHECK_FALSE(dipole_allowed({2, 1, Parity::e}, {1, 1, Parity::f}));
  CHECK(dipole_allowed({1, 1, Parity::e}, {1, 0, Parity::f}) == true);
  CHECK_FALSE(dipole_allowed({1, 1, Parity::e}, {1, 1, Parity::e}));
  CHECK_FALSE(dipole_allowed({3, 0, Parity::e}, {1, 0, Parity::e}));
  CHECK(branch_of(3, 2) == Branch::R);
  CHECK(branch_of(2, 2) == Branch::Q);
  CHECK(branch_of(1, 2) == Branch::P);
  CHECK_THROWS_AS(honl_london({2, 2, Parity::e}, {1, 0, Parity::e}), ValidationError);
  CHECK_THROWS_AS(honl_london({2, 1, Parity::e}, {0, 1, Parity::e}), ValidationError);
}
