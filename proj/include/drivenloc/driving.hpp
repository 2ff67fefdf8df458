#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "drivenloc/lattice.hpp"

namespace drivenloc {

enum class DrivingKind { Smooth, SquareWave, Sampled };

const char* to_string(DrivingKind kind);

/// Monochromatic bond signal h(t) = a + b cos(nu t) + b' sin(nu t).
struct SmoothCoefficients {
  double a = 0.0;
  double b = 0.0;
  double b_prime = 0.0;
};

/// Time-periodic hopping. Per bond the stored quantity is the signal
/// h_b(t) = -Delta(t)(x, y), so the Hamiltonian carries +g h_b(t) off the
/// diagonal. Square waves and sampled profiles are piecewise constant in time
/// and share their switch times across bonds.
class DrivingSpec {
 public:
  static DrivingSpec smooth(double nu, std::vector<SmoothCoefficients> bonds);
  static DrivingSpec square_wave(double nu, std::vector<double> amp_a, std::vector<double> amp_b,
                                 double duty);
  /// grid[j][bond] is the value on [jT/n, (j+1)T/n) (zero-order hold).
  static DrivingSpec sampled(double nu, std::vector<std::vector<double>> grid);

  DrivingKind kind() const { return kind_; }
  double nu() const { return nu_; }
  double period() const;
  std::size_t bond_count() const { return bond_count_; }
  bool piecewise_constant() const { return kind_ != DrivingKind::Smooth; }
  double duty() const { return duty_; }

  double signal(std::size_t bond, double t) const;
  /// (1/T) int_0^T h_b(t) exp(-i nu k t) dt.
  std::complex<double> fourier(std::size_t bond, int k) const;

  const std::vector<SmoothCoefficients>& smooth_coefficients() const { return smooth_; }
  /// Segment start times as fractions of T; the first entry is 0.
  const std::vector<double>& switch_fractions() const { return switches_; }
  std::size_t segment_count() const { return switches_.size(); }
  double segment_value(std::size_t bond, std::size_t segment) const {
    return segments_[segment][bond];
  }
  double segment_length(std::size_t segment) const;
  std::size_t segment_at(double t) const;

  /// Same time profile on the listed bonds only, in the given order.
  DrivingSpec select_bonds(const std::vector<std::size_t>& bonds) const;

  /// int_0^T max_b |h_b(t)| dt.
  double sup_signal_integral() const;

 private:
  DrivingKind kind_ = DrivingKind::Smooth;
  double nu_ = 1.0;
  double duty_ = 0.0;
  std::size_t bond_count_ = 0;
  std::vector<SmoothCoefficients> smooth_;
  std::vector<double> switches_;
  std::vector<std::vector<double>> segments_;
};

/// Per-bond L2 norm with the normalized (1/T) measure.
struct BondNorm {
  double mean_square;
  double norm;
  bool violates;
};

std::vector<BondNorm> driving_l2_norms(const DrivingSpec& driving);

/// Same signal on every bond. Per-bond amplitudes of 1/(4d) keep the
/// instantaneous hopping operator norm at most 1.
DrivingSpec canonical_smooth(const Lattice& lattice, double nu);
DrivingSpec uniform_smooth(const Lattice& lattice, double nu, SmoothCoefficients c);
/// 50% duty square wave alternating between the two dimerizations of the
/// lattice: bonds starting on an even coordinate are on in the first half.
DrivingSpec canonical_square_wave(const Lattice& lattice, double nu);
DrivingSpec uniform_square_wave(const Lattice& lattice, double nu, double amp_a, double amp_b,
                                double duty);

}  // namespace drivenloc
