#include "drivenloc/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drivenloc/errors.hpp"
#include "drivenloc/propagate.hpp"

namespace drivenloc {

QuasiEnergyOperator build_quasienergy_operator(const ModelParams& params, int k0, int K,
                                               std::optional<int> harmonic_cutoff, std::size_t max_dim) {
  if (K < 1) throw ConfigError("quasi-energy operator: K must be >= 1");
  QuasiEnergyOperator op{params.lattice, params.disorder.values, params.nu(), params.g, k0, K, 1, 0.0, {}, {}};
  const auto& drv = params.driving;
  op.harmonic_cutoff = harmonic_cutoff.value_or(drv.piecewise_constant() ? 2 * K : 1);
  if (op.harmonic_cutoff < 0 || op.harmonic_cutoff > 2 * K)
    throw ConfigError("quasi-energy operator: harmonic cutoff must lie in [0, 2K]");
  const std::size_t dim = params.lattice.size() * static_cast<std::size_t>(op.harmonics());
  if (dim > max_dim)
    throw ResourceError("quasi-energy operator: dimension " + std::to_string(dim) +
                        " exceeds budget " + std::to_string(max_dim));

  const int kh = op.harmonic_cutoff;
  const auto& bonds = params.lattice.bonds();
  // hhat[b][k' + kh]
  std::vector<std::vector<Complex>> hhat(bonds.size(), std::vector<Complex>(2 * kh + 1));
  for (std::size_t b = 0; b < bonds.size(); ++b)
    for (int kp = -kh; kp <= kh; ++kp) hhat[b][kp + kh] = drv.fourier(b, kp);

  std::vector<double> row_l1(params.lattice.size(), 0.0);
  for (std::size_t b = 0; b < bonds.size(); ++b) {
    double s = 0.0;
    for (const Complex& c : hhat[b]) s += std::abs(c);
    row_l1[bonds[b].from] += s;
    row_l1[bonds[b].to] += s;
  }
  op.coupling_bound = params.g * (row_l1.empty() ? 0.0 : *std::max_element(row_l1.begin(), row_l1.end()));

  std::vector<Eigen::Triplet<Complex>> trips;
  for (std::size_t x = 0; x < params.lattice.size(); ++x)
    for (int k = op.k_min(); k <= op.k_max(); ++k)
      trips.emplace_back(op.index(x, k), op.index(x, k), Complex(op.potential[x] + k * op.nu, 0.0));
  if (params.g != 0.0) {
    for (std::size_t b = 0; b < bonds.size(); ++b) {
      const auto& bond = bonds[b];
      for (int k = op.k_min(); k <= op.k_max(); ++k) {
        for (int kp = -kh; kp <= kh; ++kp) {
          const int col = k - kp;
          if (col < op.k_min() || col > op.k_max()) continue;
          const Complex v = params.g * hhat[b][kp + kh];
          if (v == Complex(0.0, 0.0)) continue;
          trips.emplace_back(op.index(bond.from, k), op.index(bond.to, col), v);
          trips.emplace_back(op.index(bond.to, k), op.index(bond.from, col), v);
        }
      }
    }
  }
  op.matrix.resize(op.dim(), op.dim());
  op.matrix.setFromTriplets(trips.begin(), trips.end());

  // Exterior rows k in [k_min - kh, k_min) and (k_max, k_max + kh].
  std::vector<Eigen::Triplet<Complex>> ext;
  const Eigen::Index per_site = 2 * static_cast<Eigen::Index>(kh);
  auto ext_row = [&](std::size_t site, int k) {
    const Eigen::Index slot = k < op.k_min() ? k - (op.k_min() - kh) : kh + (k - op.k_max() - 1);
    return static_cast<Eigen::Index>(site) * per_site + slot;
  };
  if (params.g != 0.0 && kh > 0) {
    for (std::size_t b = 0; b < bonds.size(); ++b) {
      const auto& bond = bonds[b];
      for (int k = op.k_min() - kh; k <= op.k_max() + kh; ++k) {
        if (k >= op.k_min() && k <= op.k_max()) continue;
        for (int kp = -kh; kp <= kh; ++kp) {
          const int col = k - kp;
          if (col < op.k_min() || col > op.k_max()) continue;
          const Complex v = params.g * hhat[b][kp + kh];
          if (v == Complex(0.0, 0.0)) continue;
          ext.emplace_back(ext_row(bond.from, k), op.index(bond.to, col), v);
          ext.emplace_back(ext_row(bond.to, k), op.index(bond.from, col), v);
        }
      }
    }
  }
  op.exterior.resize(static_cast<Eigen::Index>(params.lattice.size()) * per_site, op.dim());
  op.exterior.setFromTriplets(ext.begin(), ext.end());
  return op;
}

double eigen_residual(const QuasiEnergyOperator& op, const CVector& psi, double lambda) {
  return (op.matrix * psi - lambda * psi).norm();
}

BlockSpectrum diagonalize_block(const QuasiEnergyOperator& op, int margin) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(op.dense());
  if (es.info() != Eigen::Success) throw AccuracyError("quasi-energy block: eigensolver failed");
  BlockSpectrum out;
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  const Eigen::Index n = op.dim();
  const int inner = op.K - margin;
  out.centers.resize(n);
  out.tails.resize(n);
  out.interior.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto v = out.eigenvectors.col(j);
    double center = 0.0, edge = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = std::norm(v[i]);
      const int k = op.k_of(i);
      center += k * w;
      if (std::abs(k - op.k0) > inner) edge += w;
    }
    out.centers[j] = center;
    const double leak = op.exterior.rows() > 0 ? (op.exterior * v).norm() : 0.0;
    out.tails[j] = op.coupling_bound * std::sqrt(edge) + leak + eigen_residual(op, v, out.eigenvalues[j]);
    out.interior[j] = std::abs(center - op.k0) <= inner;
  }
  return out;
}

FrequencyDecay frequency_decay(const QuasiEnergyOperator& op, const CVector& psi, double lambda, double M) {
  FrequencyDecay out;
  out.energy_bound = (op.g + M) * (op.g + M);
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double detune = std::abs(op.k_of(i) * op.nu - lambda);
    const double a = std::abs(psi[i]);
    out.energy_sum += detune * detune * a * a;
    out.max_pointwise_ratio = std::max(out.max_pointwise_ratio, a * (1.0 + detune) / (1.0 + M + op.g));
  }
  return out;
}

ShiftedState ladder_shift(const QuasiEnergyOperator& op, const CVector& psi, int n, double tolerance) {
  ShiftedState out;
  out.state = CVector::Zero(psi.size());
  double lost = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const int k = op.k_of(i) + n;
    if (k < op.k_min() || k > op.k_max()) {
      lost += std::norm(psi[i]);
      continue;
    }
    out.state[op.index(op.site_of(i), k)] = psi[i];
  }
  out.lost_norm = std::sqrt(lost);
  out.truncated = out.lost_norm > tolerance;
  return out;
}

std::vector<double> ladder_shift(std::vector<double> spectrum, int n, double nu) {
  for (double& v : spectrum) v += n * nu;
  return spectrum;
}

CVector WindowedTransform::stacked() const {
  const Eigen::Index nk = coeffs.cols();
  CVector out(coeffs.size());
  for (Eigen::Index x = 0; x < coeffs.rows(); ++x)
    for (Eigen::Index k = 0; k < nk; ++k) out[x * nk + k] = coeffs(x, k);
  return out;
}

WindowedTransform windowed_transform(const std::vector<CVector>& samples, double t, double nu,
                                     int k_min, int k_max) {
  if (samples.size() < 3) throw AccuracyError("windowed transform: need at least 3 samples");
  const std::size_t n = samples.size() - 1;
  if (n % 2 != 0) throw AccuracyError("windowed transform: Simpson needs an even interval count");
  const int kabs = std::max({std::abs(k_min), std::abs(k_max), 1});
  if (n < static_cast<std::size_t>(8 * kabs))
    throw AccuracyError("windowed transform: trajectory undersampled for harmonic " + std::to_string(kabs));

  const double T = 2.0 * M_PI / nu;
  const double h = T / static_cast<double>(n);
  WindowedTransform out;
  out.t = t;
  out.period = T;
  out.k_min = k_min;
  out.k_max = k_max;
  const Eigen::Index sites = samples.front().size();
  out.coeffs = CMatrix::Zero(sites, k_max - k_min + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const double w = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    const double u = t + static_cast<double>(j) * h;
    for (int k = k_min; k <= k_max; ++k) {
      const Complex phase = std::polar(w * h / (3.0 * T), -nu * k * u);
      out.coeffs.col(k - k_min) += phase * samples[j];
    }
  }
  return out;
}

GeneratorResidual generator_consistency_residual(const ModelParams& params, const CVector& psi0,
                                                 double t, double dt, int K,
                                                 std::optional<int> eval_half_width,
                                                 int samples_per_period) {
  if (!(dt > 0.0)) throw DomainError("generator residual: dt must be positive");
  const int n = std::max(samples_per_period + samples_per_period % 2, 8 * K);
  const double T = params.period();
  Propagator prop;
  prop.steps_per_period = std::max(n, 256);

  auto window = [&](double start) {
    const CVector s = evolve(params, psi0, 0.0, start, prop);
    return windowed_transform(sample_trajectory(params, s, start, T, n, prop), start, params.nu(), -K, K);
  };
  const WindowedTransform lo = window(t - dt);
  const WindowedTransform mid = window(t);
  const WindowedTransform hi = window(t + dt);

  const QuasiEnergyOperator op = build_quasienergy_operator(params, 0, K);
  const CVector c = mid.stacked();
  const CVector r = Complex(0.0, 1.0) * (hi.stacked() - lo.stacked()) / (2.0 * dt) - op.matrix * c;
  const int eval = eval_half_width.value_or(K);
  double res = 0.0, ref = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (std::abs(op.k_of(i)) > eval) continue;
    res += std::norm(r[i]);
    ref += std::norm(c[i]);
  }
  return {std::sqrt(res), std::sqrt(ref)};
}

}  // namespace drivenloc
