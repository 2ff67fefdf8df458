#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "drivenloc/linalg.hpp"
#include "drivenloc/model.hpp"

namespace drivenloc {

/// Quasi-energy operator restricted to patch x [k0 - K, k0 + K].
/// Basis index = site * harmonics() + (k - k_min()). The entry
/// ((x, k), (y, k - k')) is g * hhat_xy(k') with hhat the Fourier coefficient
/// of the bond signal; the diagonal is v_x + k nu.
struct QuasiEnergyOperator {
  Lattice lattice;
  std::vector<double> potential;
  double nu = 1.0;
  double g = 0.0;
  int k0 = 0;
  int K = 1;
  int harmonic_cutoff = 1;
  /// g * max_x sum_y sum_{|k'| <= cutoff} |hhat_xy(k')|; bounds the coupling
  /// between the block and the discarded harmonics.
  double coupling_bound = 0.0;
  CSparse matrix;
  /// Couplings from the block to the harmonics just outside the window
  /// (up to the harmonic cutoff on each side); rows are site-major.
  CSparse exterior;

  int k_min() const { return k0 - K; }
  int k_max() const { return k0 + K; }
  int harmonics() const { return 2 * K + 1; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(lattice.size()) * harmonics(); }
  Eigen::Index index(std::size_t site, int k) const {
    return static_cast<Eigen::Index>(site) * harmonics() + (k - k_min());
  }
  std::size_t site_of(Eigen::Index i) const { return static_cast<std::size_t>(i / harmonics()); }
  int k_of(Eigen::Index i) const { return static_cast<int>(i % harmonics()) + k_min(); }
  CMatrix dense() const { return CMatrix(matrix); }
};

constexpr std::size_t kDefaultMaxBlockDim = 20000;

/// Harmonic cutoff defaults to 1 for smooth drivings and 2K otherwise.
QuasiEnergyOperator build_quasienergy_operator(const ModelParams& params, int k0, int K,
                                               std::optional<int> harmonic_cutoff = std::nullopt,
                                               std::size_t max_dim = kDefaultMaxBlockDim);

/// Eigendecomposition of a block with truncation diagnostics per eigenpair.
struct BlockSpectrum {
  RVector eigenvalues;
  CMatrix eigenvectors;
  /// Weight centre sum_k k |psi(., k)|^2 of each eigenvector.
  std::vector<double> centers;
  /// coupling_bound * ||psi on |k - k0| > K - margin|| + ||exterior psi||
  /// + ||(H - lambda) psi||.
  std::vector<double> tails;
  std::vector<bool> interior;
};

BlockSpectrum diagonalize_block(const QuasiEnergyOperator& op, int margin = 4);

double eigen_residual(const QuasiEnergyOperator& op, const CVector& psi, double lambda);

/// Frequency decay of a normalized eigenvector psi of the block with eigenvalue
/// lambda: the weighted sum of ((k nu - lambda) |psi(x,k)|)^2 against (g + M)^2,
/// and the largest ratio |psi(x,k)| (1 + |k nu - lambda|) / (1 + M + g).
struct FrequencyDecay {
  double energy_sum = 0.0;
  double energy_bound = 0.0;
  double max_pointwise_ratio = 0.0;
  bool holds() const { return energy_sum <= energy_bound && max_pointwise_ratio <= 1.0; }
};

FrequencyDecay frequency_decay(const QuasiEnergyOperator& op, const CVector& psi, double lambda, double M);

struct ShiftedState {
  CVector state;
  double lost_norm = 0.0;
  bool truncated = false;
};

/// psi(x, k) -> psi(x, k - n) inside the window. Mass pushed out of the
/// window is reported; `truncated` is set when it exceeds `tolerance`.
ShiftedState ladder_shift(const QuasiEnergyOperator& op, const CVector& psi, int n,
                          double tolerance = 1e-12);
std::vector<double> ladder_shift(std::vector<double> spectrum, int n, double nu);

/// phi_check(x, k, t) = (1/T) int_t^{t+T} phi(x, u) exp(-i nu k u) du.
struct WindowedTransform {
  double t = 0.0;
  double period = 0.0;
  int k_min = 0;
  int k_max = 0;
  /// rows: sites, columns: k - k_min.
  CMatrix coeffs;

  Complex at(std::size_t site, int k) const { return coeffs(static_cast<Eigen::Index>(site), k - k_min); }
  /// Stacked in QuasiEnergyOperator order for a window with the same k range.
  CVector stacked() const;
};

/// `samples` holds phi at t + j T / n for j = 0..n (n even); composite Simpson.
WindowedTransform windowed_transform(const std::vector<CVector>& samples, double t, double nu,
                                     int k_min, int k_max);

struct GeneratorResidual {
  double residual = 0.0;
  double reference_norm = 0.0;
};

/// || i d/dt phi_check - H phi_check || with a central difference in t. The
/// operator uses the window [-K, K]; the norm is taken over rows with
/// |k| <= eval_half_width (default: the whole window).
GeneratorResidual generator_consistency_residual(const ModelParams& params, const CVector& psi0,
                                                 double t, double dt, int K,
                                                 std::optional<int> eval_half_width = std::nullopt,
                                                 int samples_per_period = 512);

}  // namespace drivenloc
