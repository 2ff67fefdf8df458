#include <doctest.h>

#include <cmath>

#include "drivenloc/decay.hpp"
#include "drivenloc/errors.hpp"
#include "drivenloc/rng.hpp"

using namespace drivenloc;

namespace {

// Non-negative kernel with every row sum at most `norm`, zero with probability `sparsity`.
RMatrix random_kernel(int n, double norm, std::uint64_t seed, double sparsity = 0.3) {
  SplitMix rng(seed);
  RMatrix G = RMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (rng.uniform(0, 1) > sparsity) G(i, j) = rng.uniform(0, 1);
  const double s = G.rowwise().sum().maxCoeff();
  return s > 0 ? RMatrix(G * (norm / s)) : G;
}

// Sum of path weights x -> y of length 1..max_len by dynamic programming over lengths.
RMatrix enumerate_paths(const RMatrix& G, int max_len) {
  RMatrix power = G, sum = G;
  for (int len = 2; len <= max_len; ++len) {
    power = power * G;
    sum += power;
  }
  return sum;
}

}  // namespace

TEST_CASE("two-vertex geometric series") {
  RMatrix G(2, 2);
  G << 0.0, 0.1, 0.1, 0.0;
  const DecayFunction d(G);
  CHECK(d.path_sum(0, 1) == doctest::Approx(0.1 / (1.0 - 0.01)).epsilon(1e-14));
  CHECK(d(0, 1) == doctest::Approx(-std::log(0.1 / 0.99)).epsilon(1e-14));
  CHECK(d(0, 1) == doctest::Approx(2.2925).epsilon(1e-4));
  CHECK(d(0, 0) == 0.0);

  const BoundarySum b = boundary_decay_sum(d, {{0}, {1}}, 0, 1);
  CHECK(b.sum == doctest::Approx(0.1 / 0.99).epsilon(1e-14));
  CHECK(b.bound == doctest::Approx(0.1 / 0.9).epsilon(1e-14));
  CHECK(b.holds);
}

TEST_CASE("zero kernel and hypothesis check") {
  const DecayFunction z(RMatrix::Zero(3, 3));
  CHECK(std::isinf(z(0, 2)));
  CHECK(z(1, 1) == 0.0);
  CHECK(boundary_decay_sum(z, {{0}, {1}, {2}}, 0, 1).sum == 0.0);

  RMatrix G = RMatrix::Zero(2, 2);
  G(0, 1) = 0.5;
  CHECK_THROWS_AS(DecayFunction{G}, DomainError);
  G(0, 1) = -0.1;
  CHECK_THROWS_AS(DecayFunction{G}, DomainError);
  CHECK(l1max_norm(random_kernel(5, 0.37, 1)) == doctest::Approx(0.37));
}

TEST_CASE("linear solve agrees with path enumeration") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const int n = 2 + static_cast<int>(s % 7);
    const RMatrix G = random_kernel(n, 0.45, 100 + s);
    const DecayFunction d(G);
    const RMatrix P = enumerate_paths(G, 12);
    const double tail = std::pow(d.norm(), 13) / (1.0 - d.norm());
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        CHECK(d.path_sum(x, y) >= P(x, y) - 1e-14);
        CHECK(d.path_sum(x, y) - P(x, y) <= tail + 1e-14);
      }
  }
}

TEST_CASE("decay function: non-negativity and zero diagonal") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const DecayFunction d(random_kernel(6, 0.49, 300 + s));
    for (int x = 0; x < 6; ++x)
      for (int y = 0; y < 6; ++y) CHECK(d(x, y) >= 0.0);
    for (int x = 0; x < 6; ++x) CHECK(d(x, x) == 0.0);
  }
}

TEST_CASE("triangle inequality up to the return-loop factor") {
  // Splitting a path x -> z at its first visit to y gives
  // S(x, y) S(y, z) <= (1 + S(y, y)) S(x, z).
  int strict_failures = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const DecayFunction d(random_kernel(6, 0.49, 700 + s));
    for (int x = 0; x < 6; ++x)
      for (int y = 0; y < 6; ++y)
        for (int z = 0; z < 6; ++z) {
          if (std::isinf(d(x, y)) || std::isinf(d(y, z))) continue;
          const double lhs = d(x, z), rhs = d(x, y) + d(y, z);
          CHECK(lhs <= rhs + std::log1p(d.path_sum(y, y)) + 1e-12);
          strict_failures += lhs > rhs + 1e-12;
        }
  }
  MESSAGE("strict triangle violations: " << strict_failures);
}

TEST_CASE("strict triangle inequality fails when paths revisit the midpoint") {
  const double a = 0.2, b = 0.25, c = 0.2;
  RMatrix G = RMatrix::Zero(3, 3);
  G(0, 1) = a;
  G(1, 1) = b;
  G(1, 2) = c;
  const DecayFunction d(G);
  CHECK(d.path_sum(0, 1) == doctest::Approx(a / (1 - b)));
  CHECK(d.path_sum(1, 2) == doctest::Approx(c / (1 - b)));
  CHECK(d.path_sum(0, 2) == doctest::Approx(a * c / (1 - b)));
  CHECK(d(0, 2) > d(0, 1) + d(1, 2));
  CHECK(d(0, 2) - d(0, 1) - d(1, 2) == doctest::Approx(std::log1p(d.path_sum(1, 1))));
}

TEST_CASE("boundary sums obey the geometric bound") {
  // Nearest-neighbour kernels on an 11 x 11 patch of Z^2.
  std::vector<Site> coords;
  for (int x = -5; x <= 5; ++x)
    for (int k = -5; k <= 5; ++k) coords.push_back({x, k});
  const int n = static_cast<int>(coords.size());
  for (std::uint64_t s = 0; s < 10; ++s) {
    SplitMix rng(900 + s);
    RMatrix G = RMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && sup_distance(coords[i], coords[j]) <= 1) G(i, j) = rng.uniform(0, 1);
    G *= 0.45 / G.rowwise().sum().maxCoeff();
    const DecayFunction d(G);
    const Eigen::Index centre = n / 2;
    for (int L = 1; L <= 5; ++L) {
      const BoundarySum b = boundary_decay_sum(d, coords, centre, L);
      CHECK(b.sum > 0.0);
      CHECK(b.holds);
      CHECK(b.bound == doctest::Approx(std::pow(d.norm(), L) / (1 - d.norm())));
    }
  }
}
