#pragma once

#include <string>
#include <vector>

#include "drivenloc/decay.hpp"
#include "drivenloc/model.hpp"
#include "drivenloc/resolvent.hpp"

namespace drivenloc {

/// Column operators are blocks on a restricted model centred at x with the
/// frequency window [-K, K] (k0 = 0).

/// G(a, b) = |H(a, b)| P(b) off the diagonal, i.e. g |Delta_hat(a, b)| P(b),
/// with P = weight_P_extended.
RMatrix column_kernel(const QuasiEnergyOperator& op, double M);

/// ln((2L+1)^{d/2} (2 + M) (1 + c63 sqrt(g)) / sqrt(g)): the prefactor that
/// turns d_G into d~_G = d_G - offset.
double column_offset(int L, int dim, double M, double g, double c63);

/// Good-column certificate. Good requires: not strongly resonant
/// (threshold e^{-sqrt L}), no resonant point in the column (so that P
/// dominates the diagonal), ||G|| < 1/2, the pointwise bound
/// |X(x0, y)| <= P(x0) exp(-d~_G(x0, y)) on the spatial inner boundary and
/// sum exp(-d~_G) < exp(-mu L).
BoxReport is_good_column(const QuasiEnergyOperator& op, double lambda, double mu, double M, double c63);

struct ColumnBoundReport {
  /// Smallest C for which the bound holds on every entry.
  double required_constant = 0.0;
  double constant = 0.0;
  /// min over entries of bound - |X|.
  double min_slack = 0.0;
  double sup_inverse_distance = 0.0;
  double truncation_tail = 0.0;
  bool holds = true;
};

/// |X(z, y)| <= (2L+1)^{d/2} (2+M) P(z) / (1 + |k_z - k_y|) (sup_i 1/|lambda - lambda_i| + C).
ColumnBoundReport column_resolvent_bound_check(const QuasiEnergyOperator& op, double lambda, double M,
                                               double constant);

/// Quantile (default 99th percentile) of required constants over a calibration ensemble.
double calibrate_column_constant(std::vector<double> required, double quantile = 0.99);

/// sup over (x, k_x, y) of sum_{k_y, z} |Delta_hat((y, k_y), z)| P(z) / (1 + |k_x - k_y|).
double uniform_l1_kernel_bound(const QuasiEnergyOperator& op, double M);

struct TwoScaleReport {
  int small_scale = 0;
  int large_scale = 0;
  double mu = 0.0;
  bool hypotheses_hold = true;
  std::vector<std::string> failed;
  std::vector<Site> bad_centers;
  double kernel_norm = 0.0;
  double mu_prime = 0.0;
  double target = 0.0;
  bool good = false;
  /// |X_big(x0, y)| summed over the inner boundary, against the Huygens
  /// majorant built from the coarse kernel.
  double huygens_lhs = 0.0;
  double huygens_rhs = 0.0;
  bool huygens_holds = true;
  /// -ln(sum |X_big(x0, y)| / P(x0)) / L_{k+1} from the dense inverse.
  double dense_rate = 0.0;
  double l1_kernel_bound = 0.0;
};

/// Two-scale step on the column C_{L_{k+1}}(0) of `params` (a model of
/// half-width >= large_scale centred at the origin). The coarse kernel G'
/// jumps from (a, k) to the exterior boundary of C_{L_k}(a) when that column
/// is good, or of C_{2 L_k}(a) otherwise, with weights built from the
/// measured sub-column resolvents. Vertices whose sub-column would reach the
/// inner boundary of the large column are absorbing.
TwoScaleReport two_scale_column_check(const ModelParams& params, int small_scale, int large_scale, int K,
                                      double lambda, double mu, double c63);

}  // namespace drivenloc
