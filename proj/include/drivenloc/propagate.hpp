#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drivenloc/linalg.hpp"
#include "drivenloc/model.hpp"

namespace drivenloc {

enum class Method { CF4, Midpoint };

/// Smooth drivings are stepped with a commutator-free Magnus scheme (or the
/// exponential midpoint rule) on a uniform grid of `steps_per_period` steps;
/// with `adaptive` set, each step is checked by step doubling and halved until
/// the local error estimate is below `tolerance * h / T`. Piecewise-constant
/// drivings are integrated exactly, one exponential per segment.
struct Propagator {
  Method method = Method::CF4;
  int steps_per_period = 128;
  double tolerance = 1e-10;
  bool adaptive = false;
  int max_halvings = 12;
};

CVector evolve(const ModelParams& params, const CVector& psi0, double t0, double t1,
               const Propagator& prop = {});

/// phi at t0 + j * duration / n for j = 0..n.
std::vector<CVector> sample_trajectory(const ModelParams& params, const CVector& psi0, double t0,
                                       double duration, int n, const Propagator& prop = {});

/// U(t1, t0) as a dense matrix.
CMatrix propagator_matrix(const ModelParams& params, double t0, double t1, const Propagator& prop = {});

struct Monodromy {
  CMatrix U;
  double unitarity_defect = 0.0;
  /// Step-doubling estimate ||U_h - U_{h/2}|| / (2^p - 1); zero for exact schemes.
  double error_estimate = 0.0;
  int steps_per_period = 0;
};

/// U(T). Smooth drivings double the step count until the error estimate is
/// below `accuracy`; the result must be unitary within `unitarity_budget`.
Monodromy monodromy(const ModelParams& params, const Propagator& prop = {}, double accuracy = 1e-9,
                    double unitarity_budget = 1e-8);

struct FloquetSolution {
  CMatrix U;
  double nu = 1.0;
  double period = 0.0;
  /// In [0, nu); U psi = exp(-i lambda T) psi.
  RVector quasienergies;
  /// Orthonormal Floquet vectors psi(., 0) as columns.
  CMatrix vectors;
  std::vector<std::string> warnings;
};

FloquetSolution floquet_spectrum(const CMatrix& U, double nu, double validation_tolerance = 1e-6);

struct EffectiveHamiltonian {
  CMatrix H;
  std::vector<std::string> warnings;
};

/// sum_j lambda_j P_j over the Floquet basis; warns when a quasi-energy sits
/// within 1e-6 nu of the branch cut.
EffectiveHamiltonian effective_hamiltonian(const FloquetSolution& solution);

/// || exp(-i T H) - U || with exp evaluated by Pade scaling and squaring.
double reconstruction_defect(const CMatrix& H, const CMatrix& U, double period);

struct DecayBin {
  int distance = 0;
  double median = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

struct DecayProfile {
  std::vector<DecayBin> bins;
  /// -slope of log(median) against distance over bins with distance >= 1.
  std::optional<double> fit_rate;
};

/// Statistics of |H(x, y)| binned by the sup-norm distance |x - y|.
DecayProfile effective_decay_profile(const CMatrix& H, const Lattice& lattice);

// ---------------------------------------------------------------------------
// Dynamics

double spatial_moment(const Lattice& lattice, const CVector& phi, double q);
double boundary_mass(const Lattice& lattice, const CVector& phi);
CVector site_state(const Lattice& lattice, std::size_t site);

struct MomentTrace {
  double q = 0.0;
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> running_max;
  double slope = 0.0;
  double max_boundary_mass = 0.0;
  bool finite_size_warning = false;
};

constexpr double kBoundaryMassLimit = 1e-6;

/// Stroboscopic trace at t = j * sample_every * T, j = 0..periods / sample_every.
MomentTrace moment_trace_from_monodromy(const CMatrix& U, const Lattice& lattice, double period,
                                        const CVector& psi0, double q, int periods, int sample_every = 1);
MomentTrace dynamical_moment_trace(const ModelParams& params, const CVector& psi0, double q, int periods,
                                   int sample_every = 1, const Propagator& prop = {});

/// C = int_0^T max_{x != y} |H(t)(x, y)| dt. Diagonal terms only rotate
/// phases and do not enter the majorant.
double light_cone_constant(const ModelParams& params);
/// e^C sum_{k >= R} (2 d C)^k / k!.
double poisson_tail(double C, int dim, double R);

struct LeakageRow {
  int radius = 0;
  double t = 0.0;
  double inside_mass = 0.0;
  double bound = 0.0;
  bool holds = true;
};

/// Mass inside the sup-norm ball |z - x0| < R against
/// |psi(x0)|^2 (1 - tau) - tau, tau = poisson_tail(C, d, R), for psi(0) = delta_x0.
std::vector<LeakageRow> leakage_bound_check(const ModelParams& params, std::size_t x0,
                                            const std::vector<int>& radii, const std::vector<double>& times,
                                            const Propagator& prop = {});

struct MomentSeries {
  std::uint64_t run_id = 0;
  double order = 0.0;
  std::vector<double> times;
  std::vector<double> values;
};

/// Window moments sum_x |x|^p (1/T) int_t^{t+T} |phi(x,u)|^2 du (order p) and
/// point moments sum_x |x|^(p - eps) |phi(x,t)|^2 (order p - eps) from one run.
struct TransferTraces {
  MomentSeries window;
  MomentSeries pointwise;
};

TransferTraces transfer_traces(const ModelParams& params, const CVector& psi0, double p, double eps,
                               const std::vector<double>& times, std::uint64_t run_id,
                               int samples_per_period = 256, const Propagator& prop = {});

struct TransferConstants {
  double C = 0.0;
  double r_min = 0.0;
  double tau_max = 0.0;
  double c_eps = 0.0;
  double d_eps = 0.0;
};

/// Constants for R(x) = max(R_min, ln(|x|)^2), with R_min the smallest radius
/// where the light-cone tail drops below 1/2.
TransferConstants transfer_constants(const Lattice& lattice, double C, double p, double eps);

struct TransferRow {
  double t = 0.0;
  double window_moment = 0.0;
  double point_moment = 0.0;
  double lhs = 0.0;
  double slack = 0.0;
  bool holds = true;
};

struct TransferReport {
  TransferConstants constants;
  std::vector<TransferRow> rows;
  bool all_hold = true;
  double min_slack = 0.0;
};

/// Checks C_eps * window + D_eps >= pointwise at every sampled time.
TransferReport moment_transfer_check(const MomentSeries& window, const MomentSeries& pointwise, double p,
                                     double eps, const TransferConstants& constants);

}  // namespace drivenloc
