#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drivenloc/floquet.hpp"
#include "drivenloc/linalg.hpp"

namespace drivenloc {

enum class Regime { C1, C2 };

const char* to_string(Regime regime);

struct Resolvent {
  CMatrix X;
  /// max |(H - lambda) X - I|.
  double residual = 0.0;
  double nearest_eigenvalue = 0.0;
  double distance = 0.0;
};

/// Dense (H - lambda)^{-1} by partial-pivot LU. Throws SingularResolventError
/// when lambda lies within 1e-12 * max(1, ||H||_inf) of the spectrum.
Resolvent restricted_resolvent(const CMatrix& H, double lambda);
Resolvent restricted_resolvent(const QuasiEnergyOperator& op, double lambda);
/// Restriction to a subset of basis indices of `op`.
Resolvent restricted_resolvent(const QuasiEnergyOperator& op, const std::vector<Eigen::Index>& region,
                               double lambda);

double spectral_distance(const CMatrix& H, double lambda);

// ---------------------------------------------------------------------------
// Resonances and security boxes

/// K_x: consecutive k with |v_x + k nu - lambda| < sqrt(g).
struct ResonantSegment {
  std::size_t site = 0;
  int k_first = 0;
  int k_last = 0;

  int length() const { return k_last - k_first + 1; }
};

struct ResonanceMap {
  double lambda = 0.0;
  double threshold = 0.0;
  double nu = 1.0;
  int k_min = 0;
  int k_max = 0;
  std::vector<ResonantSegment> segments;

  bool resonant(std::size_t site, int k) const;
  std::size_t point_count() const;
};

ResonanceMap find_resonances(const std::vector<double>& values, double lambda, double g, double nu,
                             int k_min, int k_max);

/// Lambda_{K_x} = {z in Z^d x Z : d(z, K_x) < N} for the l1 graph distance.
struct SecurityBoxSet {
  int N = 1;
  std::vector<ResonantSegment> segments;
  std::vector<Site> sites;
  /// intersects[i][j] for i != j.
  std::vector<std::vector<bool>> intersects;

  std::size_t size() const { return segments.size(); }
  bool any_intersection() const;
  bool contains(std::size_t box, const Site& z, int k) const;
  /// Number of points of the unclipped box in Z^{d+1}.
  std::size_t cardinality(std::size_t box) const;
};

SecurityBoxSet build_security_boxes(const ResonanceMap& map, const Lattice& lattice, int N);

// ---------------------------------------------------------------------------
// Verdicts

/// alpha(g) = 1 if nu < sqrt(g), g otherwise.
double alpha_g(double g, double nu);
/// nu^2 alpha(g) for C1, exp(-sqrt(L)) for C2.
double strong_resonance_threshold(Regime regime, double g, double nu, int L);

struct StrongResonance {
  bool flag = false;
  double distance = 0.0;
  double threshold = 0.0;
};

StrongResonance strong_resonance_test(const CMatrix& H, double lambda, double threshold);
StrongResonance strong_resonance_test(const QuasiEnergyOperator& op, double lambda, Regime regime);

struct BoxReport {
  std::string kind;  // "box" or "column"
  std::size_t dim = 1;
  int half_width = 0;
  int k0 = 0;
  int K = 0;
  double lambda = 0.0;
  double mu = 0.0;
  bool good = false;
  bool strongly_resonant = false;
  bool intersecting_security_boxes = false;
  /// Worst-case -ln|X| / distance over the inner boundary (box), or
  /// -ln(sum e^{-d~_G}) / L (column). +inf when the off-diagonal vanishes.
  double measured_rate = 0.0;
  double threshold = 0.0;
  double spectral_distance = 0.0;
  std::size_t resonant_points = 0;
  /// Column reports: additive offset folded into d~_G.
  double offset = 0.0;
  /// Column reports: coupling_bound * |X row on the outer harmonics| / dist.
  double truncation_tail = 0.0;
  std::string reason;
  std::uint64_t seed = 0;
};

/// The operator is the block (x + [-L, L]^d) x [k0 - K, k0 + K] built on a
/// restricted model centred at x. Checks
/// |X((x, k0), (y, k))| <= exp(-mu (|k - k0| + |x - y|_1)) on the inner
/// boundary. With N given, security boxes of radius N are built as well.
BoxReport is_good_box(const QuasiEnergyOperator& op, double lambda, double mu,
                      std::optional<int> N = std::nullopt);

/// P(k) = 1/sqrt(g) if |k nu| <= M + sqrt(g), else 1/(nu(|k| - 1) - M).
double weight_P(int k, double g, double nu, double M);
/// weight_P where it is defined and 1/sqrt(g) where the outer denominator is
/// not positive. Still dominates 1/|v + k nu - lambda| at non-resonant points
/// for lambda in [0, nu].
double weight_P_extended(int k, double g, double nu, double M);

/// N^{d-1} (2N + sqrt(g)/nu) (2d+2)^{N+1} sqrt(g)^{(N-1)/2} / (nu^2 alpha(g)).
double security_radius_condition(int N, int dim, double g, double nu);
/// Smallest N >= 1 with security_radius_condition < 1; DomainError if none up to max_N.
int smallest_security_radius(int dim, double g, double nu, int max_N = 10000);

struct ChainRow {
  std::size_t site = 0;
  int k1 = 0;
  int k2 = 0;
  int distance = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ChainReport {
  int N = 1;
  bool hypotheses_hold = true;
  std::vector<std::string> failed;
  std::vector<ChainRow> rows;
  bool all_hold = true;
  /// min over rows of ln(rhs) - ln(lhs).
  double min_log_slack = 0.0;
};

/// Entries X((x, k1), (y, k2)) for y on the spatial inner boundary against
/// 2 (sqrt(g)^{N/2})^{n0} / (nu^2 alpha(g))^2 with n0 = floor(d / 2N).
ChainReport chain_bound_evaluate(const QuasiEnergyOperator& op, double lambda, int N);

}  // namespace drivenloc
