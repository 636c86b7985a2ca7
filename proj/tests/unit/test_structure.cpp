#include <cmath>
#include <sstream>

#include <doctest.h>

#include "rotcool/constants.hpp"
#include "rotcool/errors.hpp"
#include "rotcool/structure.hpp"

using namespace rotcool;

namespace {
bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

MoleculeSpec sigma_sigma(int j_max = 40) {
  return {0.4e6, 0.4e6, 0, 0, 0.0, 2 * constants::pi * 20e6, j_max};
}
MoleculeSpec sigma_pi(int j_max = 40) {
  return {0.4e6, 0.4e6, 1, 0, -0.0825e6, 2 * constants::pi * 20e6, j_max};
}
}  // namespace

TEST_CASE("level energies") {
  const auto pi = sigma_pi();
  CHECK(near(level_energy_hz(pi, Manifold::lower, {10, 1, Parity::e}), 39.4625e6, 1e-6));
  CHECK(near(level_energy_hz(pi, Manifold::lower, {10, 1, Parity::f}), 48.5375e6, 1e-6));
  CHECK(near(level_energy_hz(pi, Manifold::upper, {10, 0, Parity::e}), 44e6, 1e-6));
}

TEST_CASE("bases") {
  const auto g = ground_basis(sigma_sigma(10));
  CHECK(g->size() == 11);
  CHECK((*g)[0].J == 0);
  const auto p = ground_basis(sigma_pi(10));
  CHECK(p->size() == 20);
  CHECK((*p)[0] == StateLabel{1, 1, Parity::e});
  CHECK((*p)[1] == StateLabel{1, 1, Parity::f});
  CHECK(p->index_of(3, Parity::f).value() == 5);
  CHECK_FALSE(g->index_of(3, Parity::f).has_value());
  CHECK(excited_basis(sigma_sigma(10))->size() == 12);
}

TEST_CASE("capture J is 25 for the narrowband reference parameters") {
  CHECK(capture_J(sigma_sigma()) == 25.0);
}

TEST_CASE("line list") {
  const auto lines = line_list(sigma_sigma(5));
  // J=0 has R only; J=1..5 have P and R.
  CHECK(lines.size() == 11);
  for (const auto& l : lines) {
    CHECK(l.branch != Branch::Q);
    const double expect = l.branch == Branch::R ? 2.0 * 0.4e6 * (l.lower.J + 1) : -2.0 * 0.4e6 * l.lower.J;
    CHECK(near(l.offset_hz, expect, 1e-6));
  }
}

TEST_CASE("Pi lower state: P branch crosses zero offset near J = 20") {
  const auto lines = line_list(sigma_pi(40));
  int crossing = -1;
  double prev = 0.0;
  for (const auto& l : lines) {
    if (l.branch != Branch::P || l.lower.parity != Parity::e) continue;
    if (prev < 0.0 && l.offset_hz >= 0.0) crossing = l.lower.J;
    prev = l.offset_hz;
  }
  CHECK(crossing >= 17);
  CHECK(crossing <= 23);
}

TEST_CASE("thermal distribution") {
  MoleculeSpec spec = sigma_sigma(0);
  spec.j_max = default_j_max(spec.b_lower_hz, 0, 4.0);
  const auto p = thermal_distribution(spec, 4.0);
  CHECK(near(p.total(), 1.0, 1e-12));
  Eigen::Index peak = 0;
  for (Eigen::Index i = 0; i < p.p.size(); ++i) {
    if (p.p[i] > p.p[peak]) peak = i;
  }
  CHECK((*p.basis)[static_cast<std::size_t>(peak)].J == 322);
  CHECK(thermal_tail(spec.b_lower_hz, 0, spec.j_max, 4.0) <= 1e-6);
  CHECK(thermal_tail(spec.b_lower_hz, 0, spec.j_max - 1, 4.0) > 1e-6);

  spec.j_max = 200;
  CHECK_THROWS_AS(thermal_distribution(spec, 4.0), ValidationError);
}

TEST_CASE("room-temperature YF+ mean J(J+1)") {
  MoleculeSpec spec{8.7e9, 8.7e9, 0, 0, 0.0, 2 * constants::pi * 37e6, 0};
  spec.j_max = default_j_max(spec.b_lower_hz, 0, 300.0);
  const auto p = thermal_distribution(spec, 300.0);
  double jj = 0.0;
  for (std::size_t i = 0; i < p.basis->size(); ++i) {
    const int J = (*p.basis)[i].J;
    jj += p.p[static_cast<Eigen::Index>(i)] * J * (J + 1.0);
  }
  CHECK(near(jj, 718.17, 0.01));
}

TEST_CASE("fortrat csv") {
  std::ostringstream os;
  write_fortrat_csv(os, line_list(sigma_sigma(2)));
  const std::string s = os.str();
  CHECK(s.rfind("branch,J_lower,eps_lower,offset_hz,strength\n", 0) == 0);
  CHECK(s.find("R,0,e,800000") != std::string::npos);
}

TEST_CASE("molecule parameters are validated") {
  MoleculeSpec bad = sigma_sigma();
  bad.lambda_lower = 2;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = sigma_sigma();
  bad.b_lower_hz = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}
