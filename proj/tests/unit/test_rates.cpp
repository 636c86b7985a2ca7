#include <cmath>

#include <doctest.h>

#include "rotcool/classical.hpp"
#include "rotcool/constants.hpp"
#include "rotcool/errors.hpp"
#include "rotcool/rates.hpp"

using namespace rotcool;
using constants::h;
using constants::hbar;
using constants::k_B;
using constants::pi;

namespace {
bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }
bool rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }
const double kGamma = 2 * pi * 20e6;
}  // namespace

TEST_CASE("polarization-summed saturation is independent of M for J <= 200") {
  const double s0 = 0.37;
  for (int J = 0; J <= 200; ++J) {
    for (const Branch b : {Branch::P, Branch::R}) {
      if (b == Branch::P && J == 0) continue;
      const double avg = sat_averaged(b, J, s0);
      for (int M = -J; M <= J; ++M) {
        double s = 0.0;
        for (int p = -1; p <= 1; ++p) s += sat_component(b, J, M, p, s0);
        CHECK(near(s, avg, 1e-12));
      }
    }
  }
}

TEST_CASE("P and R saturation sum to s0") {
  for (int J = 0; J <= 500; ++J) {
    CHECK(near(sat_averaged(Branch::P, J, 0.8) + sat_averaged(Branch::R, J, 0.8), 0.8, 1e-15));
  }
  CHECK(sat_averaged(Branch::P, 0, 1.0) == 0.0);
}

TEST_CASE("single polarization component") {
  // J=1, M=0, p=0 on the R line: 2 * (2 1 1; 0 0 0)^2 = 2 * 2/15
  CHECK(near(sat_component(Branch::R, 1, 0, 0, 1.0), 4.0 / 15.0, 1e-15));
  CHECK(near(sat_component(Branch::R, 1, 0, 0, 1.0, 0.5), 2.0 / 15.0, 1e-15));
  CHECK_THROWS_AS(sat_component(Branch::R, 1, 2, 0, 1.0), ValidationError);
  CHECK_THROWS_AS(sat_component(Branch::Q, 1, 0, 0, 1.0), ValidationError);
}

TEST_CASE("branch rates are bounded and smooth in detuning") {
  const SaturationContext ctx = SaturationContext::standard(0.5);
  for (const int J : {1, 5, 30}) {
    for (const Branch b : {Branch::P, Branch::R}) {
      const double cap = kGamma / 2 * sat_averaged(b, J, 0.5) / 3.0 / 1.5;
      double prev = branch_rate(b, J, -5 * kGamma, 0.4e6, kGamma, ctx);
      for (double d = -5.0; d <= 5.0; d += 0.01) {
        const double r = branch_rate(b, J, d * kGamma, 0.4e6, kGamma, ctx);
        CHECK(r > 0.0);
        CHECK(r <= cap * (1 + 1e-12));
        CHECK(std::abs(r - prev) <= 0.05 * cap);
        prev = r;
      }
    }
  }
  // On resonance with the R(J) line.
  const double on = branch_rate(Branch::R, 3, 4 * pi * 0.4e6 * 4, 0.4e6, kGamma, ctx);
  CHECK(rel(on, kGamma / 2 * sat_averaged(Branch::R, 3, 0.5) / 3.0 / 1.5, 1e-14));
}

TEST_CASE("saturation intensity and dipole moment") {
  const double omega = 2 * pi * constants::c / 606e-9;
  CHECK(rel(saturation_intensity(omega, kGamma),
            hbar * omega * omega * omega * kGamma / (12 * pi * constants::c * constants::c), 1e-15));
  // I_sat = c eps0 hbar^2 gamma^2 / (4 |mu|^2)
  CHECK(rel(saturation_intensity(omega, kGamma),
            constants::c * constants::epsilon_0 * hbar * hbar * kGamma * kGamma /
                (4 * dipole_moment_squared(omega, kGamma)),
            1e-12));
}

TEST_CASE("cooling power and its simplified form agree for slow rotation") {
  const SaturationContext ctx = SaturationContext::standard(0.1);
  for (const int J : {2, 5, 10}) {
    const double full = cooling_power(J, -kGamma / 2, 100.0, kGamma, ctx);
    const double simple = cooling_power_simplified(J, -kGamma / 2, 100.0, kGamma, ctx);
    CHECK(rel(simple, full, 1e-3));
  }
}

TEST_CASE("rotor damping is one sixth of the six-beam classical value") {
  for (const double s0 : {0.01, 0.1, 1.0}) {
    for (const double dg : {-1.0, -0.5, -0.2}) {
      const SaturationContext ctx{s0, 6 * s0, true};
      const auto rot = DegreeOfFreedom::rotation_from_b(0.4e6);
      const CwLaser laser{s0, 6 * s0, dg * kGamma};
      CHECK(rel(rotor_damping_coefficient(dg * kGamma, kGamma, ctx),
                damping_coefficient(laser, rot, kGamma, 6) / 6.0, 1e-13));
      CHECK(rel(rotor_energy_damping_time(dg * kGamma, 0.4e6, kGamma, ctx),
                (hbar / (4 * pi * 0.4e6)) / (2 * rotor_damping_coefficient(dg * kGamma, kGamma, ctx)), 1e-13));
    }
  }
}

TEST_CASE("equilibrium J0 and the general Doppler limit are consistent") {
  for (const double b : {0.05e6, 0.2e6, 0.4e6}) {
    for (const double s0 : {0.1, 1.0, 3.0}) {
      for (double dg = -2.0; dg <= -0.1; dg += 0.1) {
        const SaturationContext ctx = SaturationContext::standard(s0);
        const auto j0 = equilibrium_J0(dg * kGamma, b, kGamma, ctx);
        REQUIRE(j0.has_value());
        const double lhs = h * b * *j0 * (*j0 + 1) + 2 * h * b;
        CHECK(rel(lhs, k_B * doppler_limit_general(dg * kGamma, b, kGamma, ctx), 1e-12));
      }
    }
  }
  CHECK_FALSE(equilibrium_J0(0.5 * kGamma, 0.4e6, kGamma, SaturationContext::standard(0.1)).has_value());
  CHECK_THROWS_AS(doppler_limit_general(0.0, 0.4e6, kGamma, SaturationContext::standard(0.1)), ValidationError);
}

TEST_CASE("general Doppler limit reduces to the classical one with s_b = 6 s0") {
  const SaturationContext ctx{0.1, 0.6, true};
  CHECK(rel(doppler_limit_general(-0.7 * kGamma, 0.4e6, kGamma, ctx), cw_doppler_limit(0.1, -0.7 * kGamma, kGamma),
            1e-14));
  CHECK(rel(doppler_limit_general(-0.7 * kGamma, 0.4e6, kGamma, ctx, 1.0),
            cw_doppler_limit(0.1, -0.7 * kGamma, kGamma) - 2 * h * 0.4e6 / k_B, 1e-14));
}

TEST_CASE("saturation context validation") {
  CHECK_THROWS_AS((SaturationContext{-1.0, 0.0, true}.validate()), ValidationError);
  CHECK_THROWS_AS((SaturationContext{1.0, -0.1, true}.validate()), ValidationError);
  CHECK(SaturationContext::standard(0.3) == SaturationContext{0.3, 0.3, true});
}
