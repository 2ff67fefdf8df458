#include "drivenloc/driving.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "drivenloc/errors.hpp"

namespace drivenloc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_nu(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("driving: nu must be positive");
}

// (1/T) int_{f0 T}^{f1 T} exp(-i nu k t) dt for fractions f0 < f1.
std::complex<double> segment_fourier(double f0, double f1, int k) {
  if (k == 0) return {f1 - f0, 0.0};
  const double w = kTwoPi * k;
  const std::complex<double> e0 = std::polar(1.0, -w * f0);
  const std::complex<double> e1 = std::polar(1.0, -w * f1);
  return (e0 - e1) / std::complex<double>(0.0, w);
}

}  // namespace

const char* to_string(DrivingKind kind) {
  switch (kind) {
    case DrivingKind::Smooth: return "smooth";
    case DrivingKind::SquareWave: return "square_wave";
    case DrivingKind::Sampled: return "sampled";
  }
  return "?";
}

DrivingSpec DrivingSpec::smooth(double nu, std::vector<SmoothCoefficients> bonds) {
  check_nu(nu);
  DrivingSpec d;
  d.kind_ = DrivingKind::Smooth;
  d.nu_ = nu;
  d.bond_count_ = bonds.size();
  d.smooth_ = std::move(bonds);
  return d;
}

DrivingSpec DrivingSpec::square_wave(double nu, std::vector<double> amp_a, std::vector<double> amp_b,
                                     double duty) {
  check_nu(nu);
  if (amp_a.size() != amp_b.size()) throw ConfigError("driving: square wave amplitude lists differ in length");
  if (!(duty > 0.0 && duty < 1.0)) throw ConfigError("driving: duty fraction must lie in (0, 1)");
  DrivingSpec d;
  d.kind_ = DrivingKind::SquareWave;
  d.nu_ = nu;
  d.duty_ = duty;
  d.bond_count_ = amp_a.size();
  d.switches_ = {0.0, duty};
  d.segments_ = {std::move(amp_a), std::move(amp_b)};
  return d;
}

DrivingSpec DrivingSpec::sampled(double nu, std::vector<std::vector<double>> grid) {
  check_nu(nu);
  if (grid.size() < 2) throw ConfigError("driving: sampled profile needs at least 2 grid points");
  for (const auto& row : grid)
    if (row.size() != grid.front().size()) throw ConfigError("driving: ragged sampled grid");
  DrivingSpec d;
  d.kind_ = DrivingKind::Sampled;
  d.nu_ = nu;
  d.bond_count_ = grid.front().size();
  const std::size_t n = grid.size();
  for (std::size_t j = 0; j < n; ++j) d.switches_.push_back(static_cast<double>(j) / n);
  d.segments_ = std::move(grid);
  return d;
}

double DrivingSpec::period() const { return kTwoPi / nu_; }

double DrivingSpec::segment_length(std::size_t segment) const {
  const double end = segment + 1 < switches_.size() ? switches_[segment + 1] : 1.0;
  return (end - switches_[segment]) * period();
}

std::size_t DrivingSpec::segment_at(double t) const {
  double f = t / period();
  f -= std::floor(f);
  auto it = std::upper_bound(switches_.begin(), switches_.end(), f);
  return static_cast<std::size_t>(it - switches_.begin()) - 1;
}

double DrivingSpec::signal(std::size_t bond, double t) const {
  if (kind_ == DrivingKind::Smooth) {
    const auto& c = smooth_[bond];
    return c.a + c.b * std::cos(nu_ * t) + c.b_prime * std::sin(nu_ * t);
  }
  return segments_[segment_at(t)][bond];
}

std::complex<double> DrivingSpec::fourier(std::size_t bond, int k) const {
  if (kind_ == DrivingKind::Smooth) {
    const auto& c = smooth_[bond];
    if (k == 0) return {c.a, 0.0};
    if (k == 1) return {0.5 * c.b, -0.5 * c.b_prime};
    if (k == -1) return {0.5 * c.b, 0.5 * c.b_prime};
    return {0.0, 0.0};
  }
  std::complex<double> sum = 0.0;
  for (std::size_t s = 0; s < switches_.size(); ++s) {
    const double v = segments_[s][bond];
    if (v == 0.0) continue;
    const double end = s + 1 < switches_.size() ? switches_[s + 1] : 1.0;
    sum += v * segment_fourier(switches_[s], end, k);
  }
  return sum;
}

double DrivingSpec::sup_signal_integral() const {
  if (bond_count_ == 0) return 0.0;
  if (piecewise_constant()) {
    double total = 0.0;
    for (std::size_t s = 0; s < switches_.size(); ++s) {
      double m = 0.0;
      for (double v : segments_[s]) m = std::max(m, std::abs(v));
      total += m * segment_length(s);
    }
    return total;
  }
  // Midpoint rule on a fine grid; the integrand is Lipschitz.
  const int n = 8192;
  const double h = period() / n;
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    const double t = (j + 0.5) * h;
    double m = 0.0;
    for (std::size_t b = 0; b < bond_count_; ++b) m = std::max(m, std::abs(signal(b, t)));
    total += m * h;
  }
  return total;
}

std::vector<BondNorm> driving_l2_norms(const DrivingSpec& driving) {
  std::vector<BondNorm> out(driving.bond_count());
  for (std::size_t b = 0; b < driving.bond_count(); ++b) {
    double ms = 0.0;
    if (driving.kind() == DrivingKind::Smooth) {
      const auto& c = driving.smooth_coefficients()[b];
      ms = c.a * c.a + 0.5 * (c.b * c.b + c.b_prime * c.b_prime);
    } else {
      for (std::size_t s = 0; s < driving.segment_count(); ++s) {
        const double v = driving.segment_value(b, s);
        ms += v * v * driving.segment_length(s) / driving.period();
      }
    }
    out[b] = {ms, std::sqrt(ms), ms > 1.0};
  }
  return out;
}

DrivingSpec uniform_smooth(const Lattice& lattice, double nu, SmoothCoefficients c) {
  return DrivingSpec::smooth(nu, std::vector<SmoothCoefficients>(lattice.bonds().size(), c));
}

DrivingSpec canonical_smooth(const Lattice& lattice, double nu) {
  const double amp = 1.0 / (4.0 * lattice.dim());
  return uniform_smooth(lattice, nu, {amp, amp, 0.0});
}

DrivingSpec uniform_square_wave(const Lattice& lattice, double nu, double amp_a, double amp_b,
                                double duty) {
  const std::size_t n = lattice.bonds().size();
  return DrivingSpec::square_wave(nu, std::vector<double>(n, amp_a), std::vector<double>(n, amp_b), duty);
}

DrivingSpec canonical_square_wave(const Lattice& lattice, double nu) {
  const double amp = 1.0 / (2.0 * lattice.dim());
  std::vector<double> first, second;
  for (const Bond& b : lattice.bonds()) {
    const int c = lattice.coords(b.from)[b.axis];
    const bool even = ((c % 2) + 2) % 2 == 0;
    first.push_back(even ? amp : 0.0);
    second.push_back(even ? 0.0 : amp);
  }
  return DrivingSpec::square_wave(nu, std::move(first), std::move(second), 0.5);
}

DrivingSpec DrivingSpec::select_bonds(const std::vector<std::size_t>& bonds) const {
  DrivingSpec d = *this;
  d.bond_count_ = bonds.size();
  if (kind_ == DrivingKind::Smooth) {
    d.smooth_.clear();
    for (std::size_t b : bonds) d.smooth_.push_back(smooth_.at(b));
  } else {
    for (std::size_t s = 0; s < segments_.size(); ++s) {
      d.segments_[s].clear();
      for (std::size_t b : bonds) d.segments_[s].push_back(segments_[s].at(b));
    }
  }
  return d;
}

}  // namespace drivenloc
