#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drivenloc/driving.hpp"
#include "drivenloc/model.hpp"

namespace drivenloc {

/// G(t) = [[v t / 2, g'], [g', -v t / 2]] on [-t_w, t_w].
struct TwoLevelSweep {
  double coupling = 0.1;
  double rate = 1.0;
  /// Half window; must satisfy rate * t_w >= 20 max(coupling, sqrt(rate)).
  double half_window = 200.0;
  int initial = 0;
  /// Local step h = step_phase / max(|E(t)|, sqrt(rate)).
  double step_phase = 0.02;
};

/// Probability of ending in the initial diabatic state. The state starts in
/// the adiabatic eigenvector matching the diabatic one at -t_w and is read
/// out in the adiabatic basis at +t_w, which removes the oscillating
/// finite-window terms of the diabatic read-out.
double lz_transition_probability(const TwoLevelSweep& sweep);

/// exp(-2 pi g'^2 / v).
double lz_closed_form(double coupling, double rate);

struct ThresholdParams {
  double g = 0.1;
  /// Disorder strength, identified with the support width 2M.
  double W = 2.0;
  double xi = 1.0;
  int dim = 1;
};

/// g exp(-(2/xi) (W/g)^{1/d}).
double lz_threshold_frequency(const ThresholdParams& params);
/// (W/g)^{1/d}; requires W/g >= 1.
double crossing_density_length(double g, double W, int dim);

/// Mean decay rate of the static eigenvectors of V + g <h>, fitted as
/// -slope of ln|psi| against the sup distance from each peak.
std::optional<double> static_decay_rate(const ModelParams& params);

struct PhaseScanSpec {
  std::vector<double> g_values;
  std::vector<double> nu_values;
  int dim = 1;
  int half_width = 8;
  double M = 1.0;
  DrivingKind driving = DrivingKind::Smooth;
  std::size_t realizations = 4;
  std::uint64_t base_seed = 1;
  int periods = 50;
  /// MSA exponent used for the threshold annotation.
  double p = 3.0;
  /// Overrides the measured localization length.
  std::optional<double> xi;
  unsigned jobs = 1;
};

struct PhasePoint {
  double g = 0.0;
  double nu = 0.0;
  double ipr_mean = 0.0;
  double ipr_sd = 0.0;
  /// Mean fitted decay rate of |H_eff(x, y)|; NaN when no fit is available.
  double decay_rate = 0.0;
  double moment_slope = 0.0;
  std::size_t n = 0;
  std::size_t failures = 0;
  double xi = 0.0;
  double msa_threshold = 0.0;
  double lz_threshold = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> errors;
};

/// Disorder-averaged diagnostics per grid point, sorted by (g, nu).
std::vector<PhasePoint> phase_scan(const PhaseScanSpec& spec);

}  // namespace drivenloc
