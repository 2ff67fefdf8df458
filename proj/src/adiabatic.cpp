#include "drivenloc/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include <Eigen/Dense>

#include "drivenloc/errors.hpp"
#include "drivenloc/parallel.hpp"
#include "drivenloc/probability.hpp"
#include "drivenloc/propagate.hpp"
#include "drivenloc/rng.hpp"

namespace drivenloc {

namespace {

using C2 = Eigen::Vector2cd;

// exp(-i tau (a sz + b sx)) applied to psi.
C2 apply_exp(double a, double b, double tau, const C2& psi) {
  const double r = std::hypot(a, b);
  const double c = std::cos(tau * r);
  const double s = r > 0.0 ? std::sin(tau * r) / r : tau;
  const Complex mi(0.0, -1.0);
  C2 out;
  out[0] = c * psi[0] + mi * s * (a * psi[0] + b * psi[1]);
  out[1] = c * psi[1] + mi * s * (b * psi[0] - a * psi[1]);
  return out;
}

Eigen::Matrix2d adiabatic_basis(double a, double b) {
  Eigen::Matrix2d H;
  H << a, b, b, -a;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H);
  return es.eigenvectors();
}

}  // namespace

double lz_closed_form(double coupling, double rate) {
  return std::exp(-2.0 * M_PI * coupling * coupling / rate);
}

double lz_transition_probability(const TwoLevelSweep& sw) {
  if (!(sw.rate > 0.0)) throw DomainError("landau-zener: sweep rate must be positive");
  if (sw.initial != 0 && sw.initial != 1) throw DomainError("landau-zener: initial state must be 0 or 1");
  if (!(sw.step_phase > 0.0)) throw DomainError("landau-zener: step phase must be positive");
  const double tw = sw.half_window;
  if (!(sw.rate * tw >= 20.0 * std::max(std::abs(sw.coupling), std::sqrt(sw.rate))))
    throw AccuracyError("landau-zener: window too narrow for the sweep");

  const double v = sw.rate, gp = sw.coupling;
  const double c1 = 0.5 - std::sqrt(3.0) / 6.0, c2 = 0.5 + std::sqrt(3.0) / 6.0;
  const double a1 = (3.0 - 2.0 * std::sqrt(3.0)) / 12.0, a2 = (3.0 + 2.0 * std::sqrt(3.0)) / 12.0;

  const Eigen::Matrix2d B0 = adiabatic_basis(-v * tw / 2.0, gp);
  const int start = std::abs(B0(sw.initial, 0)) >= std::abs(B0(sw.initial, 1)) ? 0 : 1;
  C2 psi = B0.col(start).cast<Complex>();

  double t = -tw;
  while (t < tw) {
    const double E = std::hypot(v * t / 2.0, gp);
    double h = sw.step_phase / std::max(E, std::sqrt(v));
    h = std::min(h, tw - t);
    const double x1 = v * (t + c1 * h) / 2.0, x2 = v * (t + c2 * h) / 2.0;
    psi = apply_exp(a2 * x1 + a1 * x2, 0.5 * gp, h, psi);
    psi = apply_exp(a1 * x1 + a2 * x2, 0.5 * gp, h, psi);
    t += h;
  }

  const Eigen::Matrix2d B1 = adiabatic_basis(v * tw / 2.0, gp);
  const int end = std::abs(B1(sw.initial, 0)) >= std::abs(B1(sw.initial, 1)) ? 0 : 1;
  return std::norm(B1.col(end).cast<Complex>().dot(psi));
}

double lz_threshold_frequency(const ThresholdParams& p) {
  if (!(p.g > 0.0 && p.W > 0.0 && p.xi > 0.0 && p.dim >= 1))
    throw DomainError("threshold: parameters must be positive");
  return p.g * std::exp(-(2.0 / p.xi) * std::pow(p.W / p.g, 1.0 / p.dim));
}

double crossing_density_length(double g, double W, int dim) {
  if (!(g > 0.0) || dim < 1 || !(W / g >= 1.0)) throw DomainError("crossing length: need W/g >= 1");
  return std::pow(W / g, 1.0 / dim);
}

std::optional<double> static_decay_rate(const ModelParams& params) {
  const Lattice& lat = params.lattice;
  const std::size_t n = lat.size();
  RMatrix H = RMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) H(i, i) = params.disorder.values[i];
  for (std::size_t b = 0; b < lat.bonds().size(); ++b) {
    const double h = params.g * params.driving.fourier(b, 0).real();
    H(lat.bonds()[b].from, lat.bonds()[b].to) = h;
    H(lat.bonds()[b].to, lat.bonds()[b].from) = h;
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(H);
  double total = 0.0;
  std::size_t count = 0;
  for (Eigen::Index j = 0; j < es.eigenvectors().cols(); ++j) {
    const auto psi = es.eigenvectors().col(j);
    Eigen::Index peak = 0;
    psi.cwiseAbs().maxCoeff(&peak);
    const Site xp = lat.coords(static_cast<std::size_t>(peak));
    double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = std::abs(psi[static_cast<Eigen::Index>(i)]);
      if (a < 1e-250) continue;
      const double x = sup_distance(xp, lat.coords(i)), y = std::log(a);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      m += 1.0;
    }
    const double den = m * sxx - sx * sx;
    if (m < 2.0 || den <= 0.0) continue;
    const double slope = (m * sxy - sx * sy) / den;
    if (slope < 0.0) {
      total += -slope;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return total / static_cast<double>(count);
}

namespace {

struct Sample {
  bool ok = false;
  double ipr = 0.0;
  double rate = std::numeric_limits<double>::quiet_NaN();
  double slope = 0.0;
  double static_rate = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::string error;
};

}  // namespace

std::vector<PhasePoint> phase_scan(const PhaseScanSpec& spec) {
  std::vector<std::pair<double, double>> grid;
  for (double g : spec.g_values)
    for (double nu : spec.nu_values) grid.emplace_back(g, nu);
  std::sort(grid.begin(), grid.end());
  const std::size_t R = spec.realizations;
  const Density density = Density::uniform(spec.M);

  const auto samples = parallel_map<Sample>(grid.size() * R, spec.jobs, [&](std::size_t task) {
    const auto [g, nu] = grid[task / R];
    Sample s;
    s.seed = derive_seed(spec.base_seed, task % R);
    try {
      Lattice lat(spec.dim, spec.half_width);
      DisorderRealization dis = sample_potential(density, lat, s.seed);
      DrivingSpec drv =
          spec.driving == DrivingKind::SquareWave ? canonical_square_wave(lat, nu) : canonical_smooth(lat, nu);
      const ModelParams m(lat, std::move(dis), std::move(drv), g);
      const Monodromy U = monodromy(m, {}, 1e-8);
      const FloquetSolution sol = floquet_spectrum(U.U, nu);
      s.ipr = sol.vectors.cwiseAbs2().cwiseAbs2().colwise().sum().mean();
      const EffectiveHamiltonian heff = effective_hamiltonian(sol);
      if (auto r = effective_decay_profile(heff.H, lat).fit_rate) s.rate = *r;
      const CVector psi0 = site_state(lat, lat.center());
      s.slope = moment_trace_from_monodromy(U.U, lat, m.period(), psi0, 2.0, spec.periods).slope;
      if (auto r = static_decay_rate(m)) s.static_rate = *r;
      s.ok = true;
    } catch (const std::exception& e) {
      s.error = e.what();
    }
    return s;
  });

  std::vector<PhasePoint> out;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    PhasePoint pt;
    std::tie(pt.g, pt.nu) = grid[p];
    double sum = 0, sq = 0, rate = 0, slope = 0, srate = 0;
    std::size_t nrate = 0, nsrate = 0;
    for (std::size_t i = 0; i < R; ++i) {
      const Sample& s = samples[p * R + i];
      pt.seeds.push_back(s.seed);
      if (!s.ok) {
        ++pt.failures;
        pt.errors.push_back(s.error);
        continue;
      }
      ++pt.n;
      sum += s.ipr;
      sq += s.ipr * s.ipr;
      slope += s.slope;
      if (std::isfinite(s.rate)) {
        rate += s.rate;
        ++nrate;
      }
      if (std::isfinite(s.static_rate)) {
        srate += s.static_rate;
        ++nsrate;
      }
    }
    const double n = static_cast<double>(pt.n);
    pt.ipr_mean = pt.n ? sum / n : std::numeric_limits<double>::quiet_NaN();
    pt.ipr_sd = pt.n > 1 ? std::sqrt(std::max(0.0, (sq - sum * sum / n) / (n - 1.0))) : 0.0;
    pt.decay_rate = nrate ? rate / static_cast<double>(nrate) : std::numeric_limits<double>::quiet_NaN();
    pt.moment_slope = pt.n ? slope / n : std::numeric_limits<double>::quiet_NaN();

    if (spec.xi) pt.xi = *spec.xi;
    else pt.xi = nsrate ? static_cast<double>(nsrate) / srate : 0.0;
    const double W = 2.0 * spec.M;
    pt.lz_threshold = pt.g > 0.0 && pt.xi > 0.0 ? lz_threshold_frequency({pt.g, W, pt.xi, spec.dim}) : 0.0;
    try {
      pt.msa_threshold = msa_frequency_threshold(pt.g, spec.p, spec.dim);
    } catch (const DomainError&) {
      pt.msa_threshold = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace drivenloc
