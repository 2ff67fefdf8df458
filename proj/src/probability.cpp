#include "drivenloc/probability.hpp"

#include <algorithm>
#include <cmath>

#include "drivenloc/columns.hpp"
#include "drivenloc/errors.hpp"
#include "drivenloc/floquet.hpp"
#include "drivenloc/parallel.hpp"
#include "drivenloc/rng.hpp"

namespace drivenloc {

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) throw DomainError("wilson interval: no trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double den = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / den;
  const double half = z / den * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

const char* to_string(BoundDirection direction) {
  return direction == BoundDirection::Upper ? "upper" : "lower";
}

BoundComparison compare_to_bound(std::string label, std::size_t successes, std::size_t trials, double bound,
                                 BoundDirection direction, double parameter) {
  BoundComparison c;
  c.label = std::move(label);
  c.successes = successes;
  c.trials = trials;
  c.frequency = static_cast<double>(successes) / static_cast<double>(trials);
  const WilsonInterval ci = wilson_interval(successes, trials);
  c.ci_lo = ci.lo;
  c.ci_hi = ci.hi;
  c.bound = bound;
  c.direction = direction;
  c.parameter = parameter;
  c.violated = direction == BoundDirection::Upper ? ci.lo > bound : ci.hi < bound;
  return c;
}

double wegner_bound_finite(double eps, int K, std::size_t sites, double rho_inf) {
  return 2.0 * M_PI * eps * (2.0 * K + 1.0) * static_cast<double>(sites) * rho_inf;
}

double wegner_bound_infinite(double eps, std::size_t sites, double M, double nu, double rho_inf) {
  return 2.0 * M_PI * std::sqrt(eps) * static_cast<double>(sites) * rho_inf * std::max(1.0, M / nu);
}

double intersection_bound(std::size_t sites, int N, double g, double nu, double rho_inf) {
  const double n = static_cast<double>(sites);
  const double sg = std::sqrt(g);
  const double pairs = 2.0 * n * (n - 1.0);
  if (nu <= sg) return pairs * (N * nu + sg) * rho_inf;
  return pairs * (N + 1.0) * sg * rho_inf;
}

double strong_resonance_bound_c1(double M, int N, int dim, double g, double nu) {
  return 4.0 * M * (std::pow(N, dim) * (2.0 * std::sqrt(g) / nu + 2.0 * N)) * nu * alpha_g(g, nu);
}

double resonance_bound_c2(double rho_inf, double M, double nu, int L, int dim, double g) {
  return rho_inf * (2.0 * M / nu) * std::pow(2.0 * L + 1.0, dim) * std::sqrt(2.0 * g);
}

double good_region_target(int L, double p) { return 1.0 - std::pow(static_cast<double>(L), -2.0 * p); }

double msa_frequency_threshold(double g, double p, int dim) {
  if (!(g > 0.0 && g < 1.0)) throw DomainError("msa threshold: g must lie in (0, 1)");
  if (!(p > 2.0 * dim)) throw DomainError("msa threshold: p must exceed 2d");
  return std::exp(-std::pow(g, -1.0 / (4.0 * p + 8.0 * dim)));
}

// ---------------------------------------------------------------------------

ModelParams ensemble_model(const EnsembleSpec& spec, std::size_t index) {
  if (spec.realizations < 1) throw ConfigError("ensemble: need at least one realization");
  Lattice lat = Lattice::box(spec.dim, spec.side);
  DisorderRealization dis = sample_potential(spec.density, lat, derive_seed(spec.base_seed, index));
  DrivingSpec drv = spec.driving == DrivingKind::SquareWave ? canonical_square_wave(lat, spec.nu)
                                                            : canonical_smooth(lat, spec.nu);
  return ModelParams(std::move(lat), std::move(dis), std::move(drv), spec.g);
}

namespace {

std::size_t region_sites(const EnsembleSpec& spec) {
  return static_cast<std::size_t>(std::llround(std::pow(spec.side, spec.dim)));
}

int infinite_proxy_window(const EnsembleSpec& spec, double eps_max) {
  const double M = spec.density.support_bound();
  const double reach = std::abs(spec.energy - spec.k0 * spec.nu) + eps_max + 2.0 * (M + spec.g);
  return std::max(spec.K, static_cast<int>(std::ceil(reach / spec.nu)) + 1);
}

}  // namespace

std::vector<BoundComparison> estimate_window_probability(const EnsembleSpec& spec, const std::vector<double>& eps,
                                                         bool infinite_column) {
  const double eps_max = eps.empty() ? 0.0 : *std::max_element(eps.begin(), eps.end());
  const int K = infinite_column ? infinite_proxy_window(spec, eps_max) : spec.K;
  const std::size_t n_sites = region_sites(spec);
  if (n_sites * static_cast<std::size_t>(2 * K + 1) > kDefaultMaxBlockDim)
    throw ResourceError("window probability: region too large for dense diagonalization");

  // Distance from E to the nearest eigenvalue per realization.
  const auto dist = parallel_map<double>(spec.realizations, spec.jobs, [&](std::size_t i) {
    const ModelParams m = ensemble_model(spec, i);
    const QuasiEnergyOperator op = build_quasienergy_operator(m, spec.k0, K);
    return spectral_distance(op.dense(), spec.energy);
  });

  const double rho = spec.density.sup_norm();
  const double M = spec.density.support_bound();
  std::vector<BoundComparison> out;
  for (double e : eps) {
    std::size_t hits = 0;
    for (double d : dist)
      if (d <= e) ++hits;
    if (infinite_column) {
      auto c = compare_to_bound("wegner_infinite", hits, dist.size(), wegner_bound_infinite(e, n_sites, M, spec.nu, rho),
                                BoundDirection::Upper, e);
      c.note = "truncated column K=" + std::to_string(K) + "; the C sqrt(eps) prefactor branch is not tested";
      out.push_back(std::move(c));
    } else {
      out.push_back(compare_to_bound("wegner_finite", hits, dist.size(), wegner_bound_finite(e, K, n_sites, rho),
                                     BoundDirection::Upper, e));
    }
  }
  return out;
}

namespace {

std::pair<int, int> full_resonance_window(double lambda, double M, double g, double nu) {
  const double sg = std::sqrt(g);
  return {static_cast<int>(std::floor((lambda - M - sg) / nu)) - 1,
          static_cast<int>(std::ceil((lambda + M + sg) / nu)) + 1};
}

}  // namespace

BoundComparison estimate_intersection_probability(const EnsembleSpec& spec, int N) {
  const double M = spec.density.support_bound();
  const auto [kmin, kmax] = full_resonance_window(spec.energy, M, spec.g, spec.nu);
  const auto hit = parallel_map<int>(spec.realizations, spec.jobs, [&](std::size_t i) {
    const ModelParams m = ensemble_model(spec, i);
    const ResonanceMap map = find_resonances(m.disorder.values, spec.energy, spec.g, spec.nu, kmin, kmax);
    return build_security_boxes(map, m.lattice, N).any_intersection() ? 1 : 0;
  });
  std::size_t k = 0;
  for (int h : hit) k += static_cast<std::size_t>(h);
  const std::size_t n_sites = region_sites(spec);
  auto c = compare_to_bound("security_box_intersection", k, hit.size(),
                            intersection_bound(n_sites, N, spec.g, spec.nu, spec.density.sup_norm()),
                            BoundDirection::Upper, N);
  c.note = std::sqrt(spec.g) >= spec.nu ? "branch nu <= sqrt(g)" : "branch nu > sqrt(g)";
  return c;
}

std::vector<BoundComparison> estimate_strong_resonance_probability(const EnsembleSpec& spec, Regime regime, int N) {
  const double M = spec.density.support_bound();
  const double rho = spec.density.sup_norm();
  std::vector<BoundComparison> out;
  if (regime == Regime::C1) {
    const auto [kmin, kmax] = full_resonance_window(spec.energy, M, spec.g, spec.nu);
    const double thr = strong_resonance_threshold(Regime::C1, spec.g, spec.nu, 0);
    const auto hit = parallel_map<int>(spec.realizations, spec.jobs, [&](std::size_t i) {
      const ModelParams m = ensemble_model(spec, i);
      const std::size_t c = m.lattice.center();
      const std::vector<double> v{m.disorder.values[c]};
      const ResonanceMap map = find_resonances(v, spec.energy, spec.g, spec.nu, kmin, kmax);
      if (map.segments.empty()) return 0;
      const ResonantSegment seg{c, map.segments[0].k_first, map.segments[0].k_last};
      SecurityBoxSet box;
      box.N = N;
      box.segments = {seg};
      box.sites = {m.lattice.coords(c)};
      const int k0 = (seg.k_first + seg.k_last) / 2;
      const int K = (seg.k_last - seg.k_first) / 2 + N + 1;
      const QuasiEnergyOperator op = build_quasienergy_operator(m, k0, K);
      std::vector<Eigen::Index> idx;
      for (Eigen::Index j = 0; j < op.dim(); ++j)
        if (box.contains(0, m.lattice.coords(op.site_of(j)), op.k_of(j))) idx.push_back(j);
      const CMatrix H = op.dense();
      CMatrix sub(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
      for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b) sub(a, b) = H(idx[a], idx[b]);
      return strong_resonance_test(sub, spec.energy, thr).flag ? 1 : 0;
    });
    std::size_t k = 0;
    for (int h : hit) k += static_cast<std::size_t>(h);
    out.push_back(compare_to_bound("strong_resonance_c1", k, hit.size(),
                                   strong_resonance_bound_c1(M, N, spec.dim, spec.g, spec.nu), BoundDirection::Upper, N));
    return out;
  }

  const int L = spec.side / 2;
  const double thr = strong_resonance_threshold(Regime::C2, spec.g, spec.nu, L);
  const int K = infinite_proxy_window(spec, thr);
  struct Hits {
    int strong = 0;
    int resonant = 0;
  };
  const auto hits = parallel_map<Hits>(spec.realizations, spec.jobs, [&](std::size_t i) {
    const ModelParams m = ensemble_model(spec, i);
    const QuasiEnergyOperator op = build_quasienergy_operator(m, spec.k0, K);
    Hits h;
    h.strong = spectral_distance(op.dense(), spec.energy) <= thr ? 1 : 0;
    h.resonant = find_resonances(m.disorder.values, spec.energy, spec.g, spec.nu, op.k_min(), op.k_max())
                         .segments.empty()
                     ? 0
                     : 1;
    return h;
  });
  std::size_t ks = 0, kr = 0;
  for (const Hits& h : hits) {
    ks += static_cast<std::size_t>(h.strong);
    kr += static_cast<std::size_t>(h.resonant);
  }
  const std::size_t n_sites = region_sites(spec);
  auto c1 = compare_to_bound("strong_resonance_c2", ks, hits.size(),
                             wegner_bound_infinite(thr, n_sites, M, spec.nu, rho), BoundDirection::Upper, thr);
  c1.note = "Wegner infinite-column bound at eps = exp(-sqrt(L))";
  out.push_back(std::move(c1));
  auto c2 = compare_to_bound("resonant_site_c2", kr, hits.size(), resonance_bound_c2(rho, M, spec.nu, L, spec.dim, spec.g),
                             BoundDirection::Upper, L);
  c2.note = "displayed bound carries sqrt(2g) where the single-site window has width 2 sqrt(g)";
  out.push_back(std::move(c2));
  return out;
}

BoundComparison estimate_good_region_probability(const EnsembleSpec& spec, Regime regime, double mu, double p,
                                                 double c63) {
  const double M = spec.density.support_bound();
  const int L = spec.side / 2;
  const auto good = parallel_map<int>(spec.realizations, spec.jobs, [&](std::size_t i) {
    const ModelParams m = ensemble_model(spec, i);
    if (regime == Regime::C1) {
      const int K = std::max(1, static_cast<int>(std::floor(M / spec.nu)));
      return is_good_box(build_quasienergy_operator(m, 0, K), spec.energy, mu).good ? 1 : 0;
    }
    return is_good_column(build_quasienergy_operator(m, 0, spec.K), spec.energy, mu, M, c63).good ? 1 : 0;
  });
  std::size_t k = 0;
  for (int v : good) k += static_cast<std::size_t>(v);
  return compare_to_bound(regime == Regime::C1 ? "good_box_c1" : "good_column_c2", k, good.size(),
                          good_region_target(L, p), BoundDirection::Lower, p);
}

}  // namespace drivenloc
