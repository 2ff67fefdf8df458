#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drivenloc/density.hpp"
#include "drivenloc/driving.hpp"
#include "drivenloc/model.hpp"
#include "drivenloc/resolvent.hpp"

namespace drivenloc {

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

constexpr double kZ95 = 1.959963984540054;

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = kZ95);

/// Upper: the bound caps the probability. Lower: the probability should reach it.
enum class BoundDirection { Upper, Lower };

const char* to_string(BoundDirection direction);

struct BoundComparison {
  std::string label;
  std::size_t successes = 0;
  std::size_t trials = 0;
  double frequency = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 1.0;
  double bound = 0.0;
  BoundDirection direction = BoundDirection::Upper;
  /// Upper: ci_lo > bound. Lower: ci_hi < bound.
  bool violated = false;
  /// Scenario parameter recorded with the row (epsilon, N, ...).
  double parameter = 0.0;
  std::string note;
};

BoundComparison compare_to_bound(std::string label, std::size_t successes, std::size_t trials, double bound,
                                 BoundDirection direction, double parameter = 0.0);

/// 2 pi eps (2K+1) |Lambda0| ||rho||_inf.
double wegner_bound_finite(double eps, int K, std::size_t sites, double rho_inf);
/// 2 pi sqrt(eps) |Lambda0| ||rho||_inf max(1, M/nu).
double wegner_bound_infinite(double eps, std::size_t sites, double M, double nu, double rho_inf);
/// 2 n (n-1) (N nu + sqrt g) ||rho|| if nu <= sqrt g, else 2 n (n-1) (N+1) sqrt g ||rho||,
/// with n the number of sites of the region.
double intersection_bound(std::size_t sites, int N, double g, double nu, double rho_inf);
/// 4 M N^d (2 sqrt(g)/nu + 2N) nu alpha(g).
double strong_resonance_bound_c1(double M, int N, int dim, double g, double nu);
/// ||rho|| (2M/nu) (2L+1)^d sqrt(2g).
double resonance_bound_c2(double rho_inf, double M, double nu, int L, int dim, double g);
/// 1 - L^{-2p}.
double good_region_target(int L, double p);
/// exp(-g^{-1/(4p + 8d)}).
double msa_frequency_threshold(double g, double p, int dim);

struct EnsembleSpec {
  std::size_t realizations = 2000;
  std::uint64_t base_seed = 1;
  int dim = 1;
  /// Side of the spatial region; symmetric regions use side = 2L + 1.
  int side = 8;
  Density density = Density::uniform(1.0);
  DrivingKind driving = DrivingKind::Smooth;
  double nu = 0.7;
  double g = 0.05;
  int k0 = 0;
  int K = 4;
  /// E for window events, lambda for resonance events.
  double energy = 0.35;
  unsigned jobs = 1;
};

/// Realization i draws its potential from derive_seed(base_seed, i) with the
/// canonical driving of the requested kind.
ModelParams ensemble_model(const EnsembleSpec& spec, std::size_t index);

/// Window [k0 - K, k0 + K] for the finite column; for the infinite-column
/// proxy, K is raised so that the energy window stays more than 2(M + g)
/// inside the truncation edges. One comparison per epsilon, all on the same
/// realizations.
std::vector<BoundComparison> estimate_window_probability(const EnsembleSpec& spec, const std::vector<double>& eps,
                                                         bool infinite_column);

/// "Some two security boxes intersect" on the region of side `side`.
BoundComparison estimate_intersection_probability(const EnsembleSpec& spec, int N);

/// C1: the security box around the centre site is strongly resonant, against
/// the C1 chain bound. C2: the column C_L (L = side / 2) is strongly
/// resonant, against the infinite-column Wegner bound at eps = e^{-sqrt L};
/// a second row compares "some resonant site in C_L" with the C2 resonance bound.
std::vector<BoundComparison> estimate_strong_resonance_probability(const EnsembleSpec& spec, Regime regime, int N);

/// Good-verdict frequency of the box B_L (C1, K = max(1, floor(M/nu))) or of
/// the column C_L (C2, window K) against 1 - L^{-2p}.
BoundComparison estimate_good_region_probability(const EnsembleSpec& spec, Regime regime, double mu, double p,
                                                 double c63 = 0.0);

}  // namespace drivenloc
