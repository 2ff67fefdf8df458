#include <doctest.h>

#include <cmath>

#include "drivenloc/columns.hpp"
#include "drivenloc/errors.hpp"

using namespace drivenloc;

namespace {

// Potential that keeps every (x, k) at distance >= 0.3 from lambda + Z nu
// for nu = 1: values alternate between lambda + 0.35 and lambda - 0.4.
std::vector<double> clean_potential(const Lattice& lat, double lambda) {
  std::vector<double> v(lat.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = lambda + ((i % 2) ? 0.35 : -0.4) + 0.01 * std::sin(1.0 + i);
  return v;
}

ModelParams fixed_chain(int L, const std::vector<double>& v, double g, double nu = 1.0) {
  const Lattice lat(1, L);
  return ModelParams(lat, fixed_potential(v, Density::uniform(1.0)), canonical_smooth(lat, nu), g);
}

}  // namespace

TEST_CASE("column kernel") {
  const Lattice lat(1, 2);
  const ModelParams m = fixed_chain(2, clean_potential(lat, 0.5), 0.01);
  const QuasiEnergyOperator op = build_quasienergy_operator(m, 0, 2);
  const RMatrix G = column_kernel(op, 1.0);
  const CMatrix H = op.dense();
  for (Eigen::Index a = 0; a < op.dim(); ++a)
    for (Eigen::Index b = 0; b < op.dim(); ++b) {
      const double expect = a == b ? 0.0 : std::abs(H(a, b)) * weight_P_extended(op.k_of(b), 0.01, 1.0, 1.0);
      CHECK(G(a, b) == doctest::Approx(expect));
    }
}

TEST_CASE("good column verdicts") {
  const Lattice lat(1, 4);
  const double lambda = 0.5;
  const ModelParams off = fixed_chain(4, clean_potential(lat, lambda), 0.0);
  const BoxReport r0 = is_good_column(build_quasienergy_operator(off, 0, 3), lambda, 10.0, 1.0, 0.0);
  CHECK(r0.good);
  CHECK(r0.kind == "column");

  // No resonant point and the spectrum away from lambda.
  const ModelParams m = fixed_chain(4, clean_potential(lat, lambda), 0.0025);
  const QuasiEnergyOperator op = build_quasienergy_operator(m, 0, 3);
  REQUIRE(spectral_distance(op.dense(), lambda) > std::sqrt(0.0025));
  const BoxReport r = is_good_column(op, lambda, 0.5, 1.0, 0.0);
  CHECK(r.resonant_points == 0);
  CHECK(r.good);
  CHECK(r.measured_rate > 0.5);
  CHECK(r.offset == doctest::Approx(column_offset(4, 1, 1.0, 0.0025, 0.0)));

  // Dense check of the pointwise inequality behind the verdict.
  const CMatrix X = restricted_resolvent(op, lambda).X;
  const DecayFunction D(column_kernel(op, 1.0));
  const Eigen::Index x0 = op.index(op.lattice.center(), 0);
  for (Eigen::Index j = 0; j < op.dim(); ++j) {
    if (!op.lattice.on_outer_shell(op.site_of(j))) continue;
    CHECK(std::abs(X(x0, j)) <= weight_P_extended(0, 0.0025, 1.0, 1.0) * std::exp(r.offset) * D.path_sum(x0, j));
  }

  // A resonant centre spoils the certificate.
  std::vector<double> v = clean_potential(lat, lambda);
  v[lat.center()] = lambda + 0.02;
  const BoxReport bad = is_good_column(build_quasienergy_operator(fixed_chain(4, v, 0.0025), 0, 3), lambda, 0.5, 1.0, 0.0);
  CHECK_FALSE(bad.good);
  CHECK(bad.strongly_resonant);
  CHECK(bad.reason == "strongly resonant");
}

TEST_CASE("column resolvent bound") {
  const Lattice lat(1, 3);
  const double lambda = 0.4;
  const ModelParams off = fixed_chain(3, clean_potential(lat, lambda), 0.0);
  const ColumnBoundReport r0 = column_resolvent_bound_check(build_quasienergy_operator(off, 0, 4), lambda, 1.0, 0.0);
  CHECK(r0.holds);

  const ModelParams m = fixed_chain(3, clean_potential(lat, lambda), 0.05);
  const QuasiEnergyOperator op = build_quasienergy_operator(m, 0, 4);
  const ColumnBoundReport probe = column_resolvent_bound_check(op, lambda, 1.0, 0.0);
  const ColumnBoundReport at = column_resolvent_bound_check(op, lambda, 1.0, probe.required_constant);
  CHECK(at.min_slack >= -1e-12);
  if (probe.required_constant > 0.0) {
    CHECK_FALSE(probe.holds);
    CHECK_FALSE(column_resolvent_bound_check(op, lambda, 1.0, 0.5 * probe.required_constant).holds);
  } else {
    CHECK(probe.holds);
  }
  CHECK(probe.sup_inverse_distance == doctest::Approx(1.0 / spectral_distance(op.dense(), lambda)));

  // Entries fall off in |k_z - k_y| at least as fast as the bound's 1/(1 + |dk|).
  const CMatrix X = restricted_resolvent(op, lambda).X;
  const Eigen::Index z = op.index(op.lattice.center(), 0);
  for (int dk = 1; 2 * dk <= 4; ++dk) {
    const double a = std::abs(X(z, op.index(op.lattice.center(), dk)));
    const double b = std::abs(X(z, op.index(op.lattice.center(), 2 * dk)));
    CHECK(b * (1.0 + 2 * dk) <= a * (1.0 + dk) * (1.0 + 1e-9) + 1e-15);
  }
}

TEST_CASE("calibrated constant is the requested quantile") {
  std::vector<double> r;
  for (int i = 100; i >= 1; --i) r.push_back(i);
  const double c = calibrate_column_constant(r, 0.99);
  int below = 0;
  for (double x : r) below += x <= c;
  CHECK(below >= 99);
  CHECK(calibrate_column_constant(r, 0.5) == doctest::Approx(51.0));
  CHECK(calibrate_column_constant({-3.0, -1.0}) == 0.0);
  CHECK_THROWS_AS(calibrate_column_constant({}), ConfigError);
}

TEST_CASE("uniform l1 bound of the kernel") {
  const Lattice lat(1, 3);
  const ModelParams off = fixed_chain(3, clean_potential(lat, 0.3), 0.0);
  CHECK(uniform_l1_kernel_bound(build_quasienergy_operator(off, 0, 2), 1.0) == 0.0);

  const double g = 0.04;
  const ModelParams m = fixed_chain(3, clean_potential(lat, 0.3), g);
  const QuasiEnergyOperator op = build_quasienergy_operator(m, 0, 5);
  const CMatrix H = op.dense();
  double sup = 0.0;
  for (std::size_t y = 0; y < lat.size(); ++y)
    for (int kx = -5; kx <= 5; ++kx) {
      double s = 0.0;
      for (int ky = -5; ky <= 5; ++ky)
        for (Eigen::Index z = 0; z < op.dim(); ++z) {
          const Eigen::Index a = op.index(y, ky);
          if (z == a) continue;
          s += std::abs(H(a, z)) / g * weight_P_extended(op.k_of(z), g, 1.0, 1.0) / (1.0 + std::abs(kx - ky));
        }
      sup = std::max(sup, s);
    }
  const double b = uniform_l1_kernel_bound(op, 1.0);
  CHECK(std::isfinite(b));
  CHECK(b == doctest::Approx(sup).epsilon(1e-12));
}

TEST_CASE("two-scale column step with one bad centre") {
  const int Lk = 4, Lk1 = 16, K = 2;
  const double lambda = 0.5, g = 0.01, mu = 0.5;
  const Lattice lat(1, Lk1);
  std::vector<double> v = clean_potential(lat, lambda);
  v[lat.center()] = lambda + 0.08;
  const ModelParams m = fixed_chain(Lk1, v, g);
  const TwoScaleReport rep = two_scale_column_check(m, Lk, Lk1, K, lambda, mu, 0.0);
  MESSAGE("bad centres " << rep.bad_centers.size() << ", kernel norm " << rep.kernel_norm << ", mu' " << rep.mu_prime
                         << ", target " << rep.target << ", dense rate " << rep.dense_rate);
  CHECK_FALSE(rep.bad_centers.empty());
  for (const Site& s : rep.bad_centers) CHECK(std::abs(s[0]) <= Lk);
  CHECK(rep.hypotheses_hold);
  CHECK(rep.huygens_holds);
  CHECK(rep.good);
  CHECK(rep.mu_prime >= mu - 3.0 * Lk / Lk1 + std::log(1.0 - rep.kernel_norm) / Lk1);
  CHECK(std::isfinite(rep.l1_kernel_bound));

  // With a clean centre every sub-column is good.
  const TwoScaleReport clean = two_scale_column_check(fixed_chain(Lk1, clean_potential(lat, lambda), g), Lk, Lk1, K,
                                                      lambda, mu, 0.0);
  CHECK(clean.bad_centers.empty());
  CHECK(clean.huygens_holds);
  CHECK_THROWS_AS(two_scale_column_check(m, 4, 8, K, lambda, mu, 0.0), ConfigError);
}
