#include <vector>
#include <cmath>
#include <random>

#include <doctest.h>

#include "../oracles/markov.hpp"
#include "rotcool/constants.hpp"
#include "rotcool/engine.hpp"
#include "rotcool/errors.hpp"

using namespace rotcool;
using constants::pi;

namespace {
bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }
const double kGamma = 2 * pi * 20e6;

MoleculeSpec sigma_sigma(double b_hz, int j_max) { return {b_hz, b_hz, 0, 0, 0.0, kGamma, j_max}; }
MoleculeSpec sigma_pi(int j_max) { return {0.4e6, 0.4e6, 1, 0, -0.0825e6, kGamma, j_max}; }
NarrowbandLaser red(double s0, double dg = -0.5) { return {dg * kGamma, SaturationContext::standard(s0)}; }

// Columns sum to zero in absolute terms (1/s), summed in storage order and
// in reverse.
void check_generator_columns(const SparseMatrix& G) {
  for (Eigen::Index k = 0; k < G.cols(); ++k) {
    std::vector<double> entries;
    for (SparseMatrix::InnerIterator it(G, k); it; ++it) {
      entries.push_back(it.value());
      if (it.row() != it.col()) CHECK(it.value() >= 0.0);
    }
    double forward = 0.0, backward = 0.0;
    for (const double v : entries) forward += v;
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) backward += *it;
    CHECK(std::abs(forward) <= 1e-12);
    CHECK(std::abs(backward) <= 1e-12);
  }
}

std::shared_ptr<const LevelBasis> basis_of(std::size_t n) {
  return std::make_shared<LevelBasis>(0, static_cast<int>(n) - 1);
}

PopulationState state(std::shared_ptr<const LevelBasis> basis, Eigen::VectorXd p) {
  return {std::move(basis), std::move(p), 0.0};
}
}  // namespace

TEST_CASE("generator columns sum to zero") {
  check_generator_columns(build_generator(sigma_sigma(0.4e6, 120), red(0.1)).G);
  check_generator_columns(build_generator(sigma_pi(80), red(0.3, -0.01)).G);
  check_generator_columns(build_generator(sigma_pi(80), red(0.3, 0.5)).G);
  // A random band.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    MoleculeSpec spec{1e5 + 1e6 * u(rng), 1e5 + 1e6 * u(rng), trial % 2, (trial / 2) % 2,
                      (trial % 2) ? -1e5 * u(rng) : 0.0, kGamma * (0.5 + u(rng)), 30 + trial};
    const auto gen = build_generator(spec, {(u(rng) - 0.7) * kGamma, {u(rng), u(rng), true}});
    check_generator_columns(gen.G);
  }
}

TEST_CASE("zero intensity gives a zero generator") {
  const auto gen = build_generator(sigma_sigma(0.4e6, 50), red(0.0));
  CHECK(gen.G.norm() == 0.0);
  CHECK(gen.absorption_rate.norm() == 0.0);
}

TEST_CASE("Sigma-Sigma couplings change J by 0 or 2 and never mix J parity") {
  const auto gen = build_generator(sigma_sigma(0.4e6, 80), red(0.1));
  for (Eigen::Index k = 0; k < gen.G.cols(); ++k) {
    for (SparseMatrix::InnerIterator it(gen.G, k); it; ++it) {
      const int dj = std::abs((*gen.basis)[static_cast<std::size_t>(it.row())].J -
                              (*gen.basis)[static_cast<std::size_t>(it.col())].J);
      CHECK((dj == 0 || dj == 2));
    }
  }
  // Populations stay in their class.
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(gen.basis->size()));
  p[10] = 1.0;
  const auto out = propagate(gen, state(gen.basis, p), {1e-3});
  double odd = 0.0;
  for (std::size_t i = 0; i < gen.basis->size(); ++i) {
    if ((*gen.basis)[i].J % 2) odd += out[0].p[static_cast<Eigen::Index>(i)];
  }
  CHECK(odd == 0.0);
}

TEST_CASE("generator rates against closed form for an isolated line") {
  // J=0 absorbs only on R(0); the upper J=1 decays 1/3 to J=0 and 2/3 to J=2.
  const auto spec = sigma_sigma(0.4e6, 10);
  const auto laser = red(0.1);
  const auto gen = build_generator(spec, laser);
  const double x = 2 * (laser.detuning_rad_s - 2 * pi * 0.8e6) / kGamma;
  const double rate = (1.0 / 3.0) * (kGamma / 2) * 0.1 * 1.0 / (1 + 0.1 + x * x);
  CHECK(near(gen.absorption_rate[0], rate, 1e-12 * rate));
  CHECK(near(gen.G.coeff(2, 0), 2.0 / 3.0 * rate, 1e-12 * rate));
  CHECK(near(gen.G.coeff(0, 0), -2.0 / 3.0 * rate, 1e-12 * rate));
}

TEST_CASE("propagation of a zero generator is the identity") {
  SparseMatrix G(4, 4);
  const auto b = basis_of(4);
  Eigen::VectorXd p(4);
  p << 0.1, 0.2, 0.3, 0.4;
  for (const auto m : {PropagationMethod::uniformization, PropagationMethod::explicit_stepping,
                       PropagationMethod::matrix_exponential}) {
    const auto out = propagate(G, state(b, p), {1.0, 2.0}, m);
    CHECK((out[1].p - p).norm() == 0.0);
    CHECK(out[1].t_s == 2.0);
  }
}

TEST_CASE("two-state relaxation matches the closed form to 1e-10") {
  const double k12 = 3e4, k21 = 1e4;
  SparseMatrix G(2, 2);
  G.insert(0, 0) = -k12;
  G.insert(1, 0) = k12;
  G.insert(0, 1) = k21;
  G.insert(1, 1) = -k21;
  const auto b = basis_of(2);
  const std::vector<double> times{1e-6, 1e-5, 3e-5, 1e-4, 1e-3};
  for (const auto m : {PropagationMethod::uniformization, PropagationMethod::explicit_stepping,
                       PropagationMethod::matrix_exponential}) {
    const auto out = propagate(G, state(b, Eigen::Vector2d(1.0, 0.0)), times, m);
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(near(out[i].p[0], oracle::two_state_p1(k12, k21, 1.0, times[i]), 1e-10));
      CHECK(near(out[i].p.sum(), 1.0, 1e-12));
    }
  }
}

TEST_CASE("propagation methods agree and conserve population") {
  const auto spec = sigma_sigma(0.2e6, default_j_max(0.2e6, 0, 0.05));
  const auto gen = build_generator(spec, red(0.1));
  const auto p0 = thermal_distribution(spec, 0.05);
  const std::vector<double> times{1e-5, 1e-4, 1e-3};
  const auto a = propagate(gen, p0, times, PropagationMethod::uniformization);
  const auto b = propagate(gen, p0, times, PropagationMethod::explicit_stepping);
  const auto c = propagate(gen, p0, times, PropagationMethod::matrix_exponential);
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK((a[i].p - c[i].p).norm() <= 1e-8);
    CHECK((b[i].p - c[i].p).norm() <= 1e-8);
  }
  // Long horizon: one second of simulated time.
  for (const auto m : {PropagationMethod::uniformization, PropagationMethod::matrix_exponential}) {
    const auto out = propagate(gen, p0, {0.1, 1.0}, m);
    CHECK(near(out.back().p.sum(), 1.0, 1e-10));
    CHECK(out.back().p.minCoeff() >= 0.0);
  }
  const auto small_spec = sigma_sigma(0.2e6, default_j_max(0.2e6, 0, 1e-4));
  const auto small = build_generator(small_spec, red(0.01, -2.0));
  const auto q0 = thermal_distribution(small_spec, 1e-4);
  const auto out = propagate(small, q0, {1.0}, PropagationMethod::explicit_stepping);
  CHECK(near(out.back().p.sum(), 1.0, 1e-10));
}

TEST_CASE("bad output times are rejected") {
  const auto spec = sigma_sigma(0.2e6, default_j_max(0.2e6, 0, 0.01));
  const auto gen = build_generator(spec, red(0.1));
  const auto p0 = thermal_distribution(spec, 0.01);
  CHECK_THROWS_AS(propagate(gen, p0, {2e-3, 1e-3}), ValidationError);
  CHECK_THROWS_AS(propagate(gen, p0, {-1e-3}), ValidationError);
}

TEST_CASE("steady state matches power iteration to 1e-6") {
  for (const auto& spec : {sigma_sigma(0.2e6, default_j_max(0.2e6, 0, 2e-3)), sigma_pi(default_j_max(0.4e6, 1, 4e-3))}) {
    const double t0 = spec.lambda_lower ? 4e-3 : 2e-3;
    const auto gen = build_generator(spec, red(0.3, -0.5));
    const auto p0 = thermal_distribution(spec, t0);
    const auto ss = steady_state(gen.G, p0);
    const Eigen::VectorXd ref = oracle::power_iteration(gen.G, p0.p);
    CHECK((ss.p - ref).lpNorm<Eigen::Infinity>() <= 1e-6);
    CHECK(near(ss.p.sum(), 1.0, 1e-10));
    CHECK((gen.G * ss.p).lpNorm<Eigen::Infinity>() <= 1e-9 * gen.absorption_rate.maxCoeff());
    // Long propagation approaches it.
    const auto late = propagate(gen, p0, {1.0});
    CHECK((late[0].p - ss.p).lpNorm<Eigen::Infinity>() <= 1e-6);
  }
}

TEST_CASE("boundary flux") {
  const auto spec = sigma_sigma(0.4e6, 30);
  const auto gen = build_generator(spec, red(0.1));
  Eigen::VectorXd cold = Eigen::VectorXd::Zero(31);
  cold[0] = 1.0;
  CHECK(boundary_flux_fraction(gen, cold) <= 1e-15);
  Eigen::VectorXd top = Eigen::VectorXd::Zero(31);
  top[30] = 1.0;
  CHECK(boundary_flux_fraction(gen, top) > kBoundaryFluxWarning);
}

TEST_CASE("peak PSD grows monotonically over the first 50 us") {
  const MoleculeSpec spec{0.4e6, 0.4e6, 0, 0, 0.0, kGamma, default_j_max(0.4e6, 0, 4.0)};
  const auto gen = build_generator(spec, red(0.1));
  const auto p0 = thermal_distribution(spec, 4.0);
  std::vector<double> times;
  for (int k = 1; k <= 50; ++k) times.push_back(k * 1e-6);
  double prev = peak_psd(p0);
  for (const auto& s : propagate(gen, p0, times)) {
    CHECK(peak_psd(s) >= prev);
    prev = peak_psd(s);
  }
}

TEST_CASE("pulse map: zero area is the identity") {
  const auto spec = sigma_sigma(20e6, 40);
  const auto map = build_pulse_map(spec, {6e-12, 7.0 / kGamma, 0.0, -4.0 / 6e-12});
  CHECK((map.M - Eigen::MatrixXd::Identity(41, 41)).norm() == 0.0);
}

TEST_CASE("pulse map columns sum to one") {
  for (const auto& spec : {sigma_sigma(20e6, 80), MoleculeSpec{20e6, 20e6, 1, 0, -1e5, kGamma, 80}}) {
    const auto map = build_pulse_map(spec, {6e-12, 7.0 / kGamma, pi / 8, -4.0 / 6e-12});
    for (Eigen::Index k = 0; k < map.M.cols(); ++k) {
      CHECK(near(map.M.col(k).sum(), 1.0, 1e-12));
      CHECK(map.M.col(k).minCoeff() >= 0.0);
    }
    CHECK(map.max_excitation <= 1.0);
  }
}

TEST_CASE("pulse map: isolated resonant line") {
  const double b = 100e9;
  const auto spec = sigma_sigma(b, 4);
  const double tau = 6e-12;
  const SechPulseTrain pulse{tau, 7.0 / kGamma, pi / 8, 2 * pi * 2 * b};
  const auto map = build_pulse_map(spec, pulse);
  const double pex = std::pow(std::sin(pi / 16), 2);
  CHECK(near(map.M(0, 0), 1.0 - pex + pex / 3.0, 1e-12));
  CHECK(near(map.M(2, 0), 2.0 * pex / 3.0, 1e-12));
}

TEST_CASE("pulse map regime errors") {
  const auto spec = sigma_sigma(20e6, 40);
  CHECK_THROWS_AS(build_pulse_map(spec, {6e-12, 1.0 / kGamma, pi / 8, -4.0 / 6e-12}), RegimeError);
  try {
    build_pulse_map(spec, {6e-12, 1.0 / kGamma, pi / 8, -4.0 / 6e-12});
  } catch (const RegimeError& e) {
    CHECK(e.flag() == "comb_regime");
  }
  // Many lines inside the bandwidth with a large area.
  try {
    build_pulse_map(sigma_sigma(0.5e9, 200), {6e-12, 7.0 / kGamma, 0.9 * pi, -1.0 / 6e-12});
    FAIL("expected a regime error");
  } catch (const RegimeError& e) {
    CHECK((e.flag() == "weak_pulse" || e.flag() == "excitation_sum"));
  }
}

TEST_CASE("YF+ pulses drive P lines and suppress R lines at low J") {
  const MoleculeSpec spec{8.7e9, 8.7e9, 0, 0, 0.0, 2 * pi * 37e6, 40};
  const auto map = build_pulse_map(spec, {6e-12, 7.0 / (2 * pi * 37e6), pi / 8, -10.0 / 6e-12});
  for (int J = 2; J <= 8; ++J) {
    CHECK(map.M(J + 2, J) < 0.1 * map.M(J - 2, J));
  }
}

TEST_CASE("binary exponentiation matches sequential pulses to 1e-10") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd M(10, 10);
  for (Eigen::Index j = 0; j < 10; ++j) {
    for (Eigen::Index i = 0; i < 10; ++i) M(i, j) = u(rng);
    M.col(j) /= M.col(j).sum();
  }
  const PulseMap map{basis_of(10), M, 1e-7, 0.0};
  Eigen::VectorXd p0 = Eigen::VectorXd::Constant(10, 0.0);
  p0[3] = 1.0;
  const auto s0 = state(map.basis, p0);
  CHECK((apply_pulses(map, s0, 0).p - p0).norm() == 0.0);
  CHECK((apply_pulses(map, s0, 1).p - M * p0).norm() <= 1e-15);
  for (const std::uint64_t n : {2u, 7u, 64u, 1000u, 4097u}) {
    const auto out = apply_pulses(map, s0, n);
    CHECK((out.p - oracle::sequential_pulses(M, p0, n)).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK(near(out.t_s, n * 1e-7, 1e-18));
  }
}

TEST_CASE("pulse map steady state is a fixed point") {
  const auto spec = sigma_sigma(20e6, default_j_max(20e6, 0, 20.0));
  const auto map = build_pulse_map(spec, {6e-12, 7.0 / kGamma, pi / 8, -4.0 / 6e-12});
  const auto p0 = thermal_distribution(spec, 20.0);
  const auto ss = steady_state(map, p0);
  CHECK((map.M * ss.p - ss.p).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(near(ss.p.sum(), 1.0, 1e-10));
  const auto late = apply_pulses(map, p0, 1u << 22);
  CHECK((late.p - ss.p).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("narrowband and broadband both cool for red detuning") {
  auto teff = [](const PopulationState& s, double b) { return observables(s, b).T_eff_K; };
  const MoleculeSpec nb{0.4e6, 0.4e6, 0, 0, 0.0, kGamma, default_j_max(0.4e6, 0, 0.05)};
  const auto gen = build_generator(nb, red(0.1));
  const auto p0 = thermal_distribution(nb, 0.05);
  CHECK(teff(propagate(gen, p0, {1e-4})[0], 0.4e6) < teff(p0, 0.4e6));

  const MoleculeSpec bb{20e6, 20e6, 0, 0, 0.0, kGamma, default_j_max(20e6, 0, 20.0)};
  const auto map = build_pulse_map(bb, {6e-12, 7.0 / kGamma, pi / 8, -4.0 / 6e-12});
  const auto q0 = thermal_distribution(bb, 20.0);
  CHECK(teff(apply_pulses(map, q0, 10000), 20e6) < teff(q0, 20e6));
}

TEST_CASE("observables") {
  const auto spec = sigma_sigma(0.4e6, 200);
  for (const double T : {1e-3, 5e-3, 0.02}) {
    const auto p = thermal_distribution(spec, T);
    const auto o = observables(p, spec.b_lower_hz);
    REQUIRE(o.T_fit_K.has_value());
    CHECK(std::abs(*o.T_fit_K / T - 1.0) < 0.01);
    CHECK(near(o.cooled_fraction, p.p.head(31).sum(), 1e-15));
    CHECK(o.peak_J == 0);
    CHECK(near(o.peak_PSD, p.p[0], 0.0));
  }
  // Fit failure with fewer than three populated states.
  Eigen::VectorXd two = Eigen::VectorXd::Zero(201);
  two[0] = 0.5;
  two[1] = 0.5;
  const auto o = observables(state(ground_basis(spec), two), spec.b_lower_hz);
  CHECK_FALSE(o.T_fit_K.has_value());
  CHECK_FALSE(o.fit_note.empty());
  CHECK(near(o.mean_J, 0.5, 1e-15));
  CHECK(near(o.T_eff_K, 0.5 * 2 * constants::h * 0.4e6 / constants::k_B, 1e-18));
  // Enhancement against a reference.
  const auto ref = thermal_distribution(spec, 0.02);
  const auto with_ref = observables(state(ground_basis(spec), two), spec.b_lower_hz, {}, &ref);
  CHECK(near(with_ref.psd_enhancement, 0.5 / peak_psd(ref), 1e-9));
}
