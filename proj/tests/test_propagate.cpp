#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "drivenloc/errors.hpp"
#include "drivenloc/linalg.hpp"
#include "drivenloc/propagate.hpp"
#include "drivenloc/rng.hpp"

using namespace drivenloc;

namespace {

ModelParams chain(int L, double g, double nu, bool square, std::uint64_t seed = 3) {
  const Lattice lat(1, L);
  return ModelParams(lat, sample_potential(Density::uniform(1.0), lat, seed),
                     square ? canonical_square_wave(lat, nu) : canonical_smooth(lat, nu), g);
}

CVector random_state(std::size_t n, std::uint64_t seed) {
  SplitMix rng(seed);
  CVector v(static_cast<Eigen::Index>(n));
  for (auto& z : v) z = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  return v.normalized();
}

}  // namespace

TEST_CASE("static diagonal evolution is exact") {
  const ModelParams m = chain(4, 0.0, 1.0, false);
  const CVector psi0 = random_state(m.lattice.size(), 1);
  const double t = 3.7;
  const CVector psi = evolve(m, psi0, 0.0, t);
  for (std::size_t x = 0; x < m.lattice.size(); ++x)
    CHECK(std::abs(psi[x] - std::polar(1.0, -m.disorder.values[x] * t) * psi0[x]) < 1e-12);

  const Lattice lat(1, 2);
  const ModelParams zero(lat, fixed_potential(std::vector<double>(5, 0.0), Density::uniform(1.0)), canonical_smooth(lat, 1.0),
                         0.0);
  const CVector p = random_state(5, 2);
  CHECK((evolve(zero, p, 0.0, 5.0) - p).norm() < 1e-14);
  CHECK((monodromy(zero).U - CMatrix::Identity(5, 5)).norm() < 1e-14);
}

TEST_CASE("evolution preserves the norm") {
  for (bool square : {false, true}) {
    const ModelParams m = chain(6, 0.5, 0.9, square);
    const CVector psi = evolve(m, random_state(m.lattice.size(), 4), 0.3, 17.0);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("smooth driving: fourth-order self-convergence") {
  const ModelParams m = chain(4, 0.8, 1.0, false);
  const CVector psi0 = random_state(m.lattice.size(), 5);
  auto run = [&](int steps) {
    Propagator p;
    p.steps_per_period = steps;
    return evolve(m, psi0, 0.0, m.period(), p);
  };
  const CVector ref = run(1024);
  const double e1 = (run(16) - ref).norm(), e2 = (run(32) - ref).norm();
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.15));

  Propagator mid;
  mid.method = Method::Midpoint;
  auto run_mid = [&](int steps) {
    mid.steps_per_period = steps;
    return evolve(m, psi0, 0.0, m.period(), mid);
  };
  const double m1 = (run_mid(32) - ref).norm(), m2 = (run_mid(64) - ref).norm();
  CHECK(m1 / m2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("square wave: per-segment exponentials are step independent") {
  // The Hamiltonian is constant between switches, so switch-aligned exact
  // exponentials leave nothing to converge.
  const ModelParams m = chain(4, 0.8, 1.0, true);
  const CVector psi0 = random_state(m.lattice.size(), 6);
  Propagator a, b;
  a.steps_per_period = 8;
  b.steps_per_period = 512;
  CHECK((evolve(m, psi0, 0.1, 2.5 * m.period(), a) - evolve(m, psi0, 0.1, 2.5 * m.period(), b)).norm() < 1e-11);
  // Against the product of the two segment propagators.
  const HamiltonianParts parts = hamiltonian_parts(m);
  RMatrix HA = parts.potential.asDiagonal();
  RMatrix HB = HA;
  HA += parts.hopping[0];
  HB += parts.hopping[1];
  const CMatrix U = expm_hermitian(HB, m.period() / 2) * expm_hermitian(HA, m.period() / 2);
  CHECK((monodromy(m).U - U).norm() < 1e-11);
}

TEST_CASE("monodromy: unitarity and uncoupled phases") {
  const ModelParams m = chain(32, 0.1, 1.0, false);
  const Monodromy U = monodromy(m);
  CHECK(U.unitarity_defect <= 1e-8);
  CHECK(unitarity_defect(U.U) <= 1e-8);
  const ModelParams off = chain(3, 0.0, 1.0, false);
  const CMatrix U0 = monodromy(off).U;
  for (std::size_t x = 0; x < 7; ++x) CHECK(std::abs(U0(x, x) - std::polar(1.0, -off.disorder.values[x] * off.period())) < 1e-12);
  CHECK((U0 - CMatrix(U0.diagonal().asDiagonal())).norm() < 1e-14);
}

TEST_CASE("Floquet spectrum of simple monodromies") {
  const Lattice lat(1, 1);
  const ModelParams m(lat, fixed_potential({0.7, 0.7, 0.7}, Density::uniform(1.0)), canonical_smooth(lat, 1.0), 0.0);
  const FloquetSolution s = floquet_spectrum(monodromy(m).U, 1.0);
  for (double q : s.quasienergies) CHECK(q == doctest::Approx(0.7).epsilon(1e-12));

  const FloquetSolution id = floquet_spectrum(CMatrix::Identity(4, 4), 0.5);
  for (double q : id.quasienergies) CHECK(std::abs(q) < 1e-14);
  CHECK((effective_hamiltonian(id).H).norm() < 1e-14);

  CMatrix bad = CMatrix::Identity(3, 3);
  bad(0, 0) = 1.1;
  CHECK_THROWS_AS(floquet_spectrum(bad, 1.0), ValidationError);
}

TEST_CASE("random Hermitian generator: quasi-energies are its eigenvalues modulo nu") {
  SplitMix rng(9);
  const int n = 6;
  CMatrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      A(i, j) = i == j ? Complex(rng.uniform(-3, 3), 0.0) : Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
      A(j, i) = std::conj(A(i, j));
    }
  const double nu = 0.9, T = 2.0 * M_PI / nu;
  const FloquetSolution s = floquet_spectrum(expm_hermitian(A, T), nu);
  std::vector<double> expect;
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(A);
  for (double e : es.eigenvalues()) expect.push_back(std::fmod(std::fmod(e, nu) + nu, nu));
  std::vector<double> got(s.quasienergies.data(), s.quasienergies.data() + n);
  std::sort(expect.begin(), expect.end());
  std::sort(got.begin(), got.end());
  for (int i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-9));
  // Floquet vectors are orthonormal.
  CHECK((s.vectors.adjoint() * s.vectors - CMatrix::Identity(n, n)).norm() < 1e-10);
}

TEST_CASE("effective Hamiltonian") {
  const ModelParams off = chain(3, 0.0, 0.6, false);
  const EffectiveHamiltonian H0 = effective_hamiltonian(floquet_spectrum(monodromy(off).U, 0.6));
  for (std::size_t x = 0; x < 7; ++x) {
    const double v = off.disorder.values[x];
    CHECK(H0.H(x, x).real() == doctest::Approx(std::fmod(std::fmod(v, 0.6) + 0.6, 0.6)).epsilon(1e-10));
  }
  const ModelParams m = chain(8, 0.1, 0.5, false);
  const CMatrix U = monodromy(m).U;
  const EffectiveHamiltonian H = effective_hamiltonian(floquet_spectrum(U, 0.5));
  CHECK(hermiticity_defect(H.H) < 1e-12);
  CHECK(reconstruction_defect(H.H, U, m.period()) <= 1e-8);
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(H.H);
  for (double e : es.eigenvalues()) {
    CHECK(e > -1e-10);
    CHECK(e < 0.5 + 1e-10);
  }
}

TEST_CASE("branch-cut warnings") {
  const Lattice lat(1, 1);
  const ModelParams m(lat, fixed_potential({1e-9, 0.3, 0.5}, Density::uniform(1.0)), canonical_smooth(lat, 1.0), 0.0);
  const FloquetSolution s = floquet_spectrum(monodromy(m).U, 1.0);
  CHECK_FALSE(effective_hamiltonian(s).warnings.empty());
}

TEST_CASE("effective decay profile") {
  const ModelParams off = chain(4, 0.0, 1.0, false);
  const CMatrix H0 = effective_hamiltonian(floquet_spectrum(monodromy(off).U, 1.0)).H;
  const DecayProfile p0 = effective_decay_profile(H0, off.lattice);
  for (const auto& b : p0.bins) {
    if (b.distance == 0) {
      std::vector<double> diag;
      for (Eigen::Index i = 0; i < H0.rows(); ++i) diag.push_back(std::abs(H0(i, i)));
      std::sort(diag.begin(), diag.end());
      CHECK(b.max == doctest::Approx(diag.back()));
      CHECK(b.count == diag.size());
    } else {
      CHECK(b.max < 1e-12);
    }
  }
  const ModelParams m = chain(16, 0.05, 0.5, false);
  const DecayProfile p = effective_decay_profile(effective_hamiltonian(floquet_spectrum(monodromy(m).U, 0.5)).H, m.lattice);
  REQUIRE(p.fit_rate.has_value());
  CHECK(*p.fit_rate > 1.0);
}
