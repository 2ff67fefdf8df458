#include "drivenloc/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

#include "drivenloc/errors.hpp"

namespace drivenloc {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
// Gauss nodes and commutator-free weights of the fourth-order scheme.
constexpr double kC1 = 0.5 - kSqrt3 / 6.0;
constexpr double kC2 = 0.5 + kSqrt3 / 6.0;
constexpr double kA1 = (3.0 - 2.0 * kSqrt3) / 12.0;
constexpr double kA2 = (3.0 + 2.0 * kSqrt3) / 12.0;

int method_order(Method m) { return m == Method::CF4 ? 4 : 2; }

class Stepper {
 public:
  explicit Stepper(const ModelParams& params) : params_(params), parts_(hamiltonian_parts(params)) {
    if (params.driving.piecewise_constant()) {
      for (const auto& hop : parts_.hopping) {
        RMatrix H = hop;
        H.diagonal() += parts_.potential;
        Eigen::SelfAdjointEigenSolver<RMatrix> es(H);
        segment_vectors_.push_back(es.eigenvectors().cast<Complex>());
        segment_values_.push_back(es.eigenvalues());
      }
    }
  }

  RMatrix hamiltonian(double t) const {
    const double w = params_.nu() * t;
    RMatrix H = parts_.hopping[0] + std::cos(w) * parts_.hopping[1] + std::sin(w) * parts_.hopping[2];
    H.diagonal() += parts_.potential;
    return H;
  }

  void advance(CMatrix& X, double t0, double t1, const Propagator& prop) const {
    if (t1 < t0) throw DomainError("evolve: t1 must not precede t0");
    if (t1 == t0) return;
    if (params_.driving.piecewise_constant())
      advance_piecewise(X, t0, t1);
    else if (prop.adaptive)
      advance_adaptive(X, t0, t1, prop);
    else
      advance_uniform(X, t0, t1, prop.steps_per_period, prop.method);
  }

  void advance_uniform(CMatrix& X, double t0, double t1, int steps_per_period, Method method) const {
    const double T = params_.period();
    const double hmax = T / steps_per_period;
    const long n = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / hmax - 1e-9)));
    const double h = (t1 - t0) / static_cast<double>(n);
    for (long j = 0; j < n; ++j) apply_step(X, t0 + static_cast<double>(j) * h, h, method);
  }

  void apply_step(CMatrix& X, double t, double h, Method method) const {
    if (method == Method::Midpoint) {
      X = expm_hermitian(hamiltonian(t + 0.5 * h), h) * X;
      return;
    }
    const RMatrix H1 = hamiltonian(t + kC1 * h);
    const RMatrix H2 = hamiltonian(t + kC2 * h);
    X = expm_hermitian(RMatrix(kA2 * H1 + kA1 * H2), h) * X;
    X = expm_hermitian(RMatrix(kA1 * H1 + kA2 * H2), h) * X;
  }

 private:
  void advance_adaptive(CMatrix& X, double t0, double t1, const Propagator& prop) const {
    const double T = params_.period();
    const double hmax = T / prop.steps_per_period;
    const double hmin = hmax * std::ldexp(1.0, -prop.max_halvings);
    const double denom = std::ldexp(1.0, method_order(prop.method)) - 1.0;
    double t = t0;
    double h = hmax;
    while (t < t1) {
      h = std::min(h, t1 - t);
      CMatrix full = X;
      apply_step(full, t, h, prop.method);
      CMatrix half = X;
      apply_step(half, t, 0.5 * h, prop.method);
      apply_step(half, t + 0.5 * h, 0.5 * h, prop.method);
      const double err = (full - half).norm() / denom;
      if (err <= prop.tolerance * h / T) {
        X = std::move(half);
        t += h;
        h = std::min(2.0 * h, hmax);
      } else {
        h *= 0.5;
        if (h < hmin)
          throw AccuracyError("evolve: step rejected, local error " + std::to_string(err) +
                              " above tolerance at minimum step");
      }
    }
  }

  void advance_piecewise(CMatrix& X, double t0, double t1) const {
    const auto& drv = params_.driving;
    const double T = drv.period();
    const auto& sw = drv.switch_fractions();
    const std::size_t ns = sw.size();
    double per = std::floor(t0 / T);
    std::size_t s = drv.segment_at(t0);
    double t = t0;
    while (t < t1) {
      const double end_frac = s + 1 < ns ? sw[s + 1] : 1.0;
      const double seg_end = (per + end_frac) * T;
      const double stop = std::min(seg_end, t1);
      const double dt = stop - t;
      if (dt > 0.0) {
        const CVector phase = (segment_values_[s].array() * (-dt)).unaryExpr([](double a) {
          return std::polar(1.0, a);
        });
        X = segment_vectors_[s] * (phase.asDiagonal() * (segment_vectors_[s].transpose() * X));
      }
      t = stop;
      if (++s == ns) {
        s = 0;
        per += 1.0;
      }
    }
  }

  const ModelParams& params_;
  HamiltonianParts parts_;
  std::vector<CMatrix> segment_vectors_;
  std::vector<RVector> segment_values_;
};

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lo);
  }
  return m;
}

}  // namespace

CVector evolve(const ModelParams& params, const CVector& psi0, double t0, double t1, const Propagator& prop) {
  Stepper stepper(params);
  CMatrix X = psi0;
  stepper.advance(X, t0, t1, prop);
  return X.col(0);
}

std::vector<CVector> sample_trajectory(const ModelParams& params, const CVector& psi0, double t0,
                                       double duration, int n, const Propagator& prop) {
  if (n < 1) throw DomainError("trajectory: need at least one interval");
  Stepper stepper(params);
  std::vector<CVector> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  CMatrix X = psi0;
  out.push_back(psi0);
  double t = t0;
  for (int j = 1; j <= n; ++j) {
    const double next = t0 + duration * j / n;
    stepper.advance(X, t, next, prop);
    t = next;
    out.push_back(X.col(0));
  }
  return out;
}

CMatrix propagator_matrix(const ModelParams& params, double t0, double t1, const Propagator& prop) {
  Stepper stepper(params);
  CMatrix X = CMatrix::Identity(static_cast<Eigen::Index>(params.lattice.size()),
                                static_cast<Eigen::Index>(params.lattice.size()));
  stepper.advance(X, t0, t1, prop);
  return X;
}

Monodromy monodromy(const ModelParams& params, const Propagator& prop, double accuracy, double unitarity_budget) {
  Stepper stepper(params);
  const Eigen::Index n = static_cast<Eigen::Index>(params.lattice.size());
  const double T = params.period();
  Monodromy out;
  if (params.driving.piecewise_constant()) {
    out.U = CMatrix::Identity(n, n);
    stepper.advance(out.U, 0.0, T, prop);
    out.steps_per_period = static_cast<int>(params.driving.segment_count());
  } else {
    const double denom = std::ldexp(1.0, method_order(prop.method)) - 1.0;
    int steps = prop.steps_per_period;
    CMatrix coarse = CMatrix::Identity(n, n);
    stepper.advance_uniform(coarse, 0.0, T, steps, prop.method);
    for (int level = 0;; ++level) {
      CMatrix fine = CMatrix::Identity(n, n);
      stepper.advance_uniform(fine, 0.0, T, 2 * steps, prop.method);
      out.error_estimate = (coarse - fine).norm() / denom;
      steps *= 2;
      out.U = std::move(fine);
      if (out.error_estimate <= accuracy) break;
      if (level >= prop.max_halvings)
        throw AccuracyError("monodromy: error estimate " + std::to_string(out.error_estimate) +
                            " above target after refinement");
      coarse = out.U;
    }
    out.steps_per_period = steps;
  }
  out.unitarity_defect = unitarity_defect(out.U);
  if (out.unitarity_defect > unitarity_budget)
    throw AccuracyError("monodromy: unitarity defect " + std::to_string(out.unitarity_defect) +
                        " exceeds budget");
  return out;
}

FloquetSolution floquet_spectrum(const CMatrix& U, double nu, double validation_tolerance) {
  if (U.rows() != U.cols()) throw ValidationError("floquet spectrum: matrix is not square");
  const double defect = unitarity_defect(U);
  if (defect > validation_tolerance)
    throw ValidationError("floquet spectrum: input not unitary (defect " + std::to_string(defect) + ")");
  FloquetSolution sol;
  sol.U = U;
  sol.nu = nu;
  sol.period = 2.0 * M_PI / nu;
  Eigen::ComplexSchur<CMatrix> schur(U);
  sol.vectors = schur.matrixU();
  const CMatrix& Tm = schur.matrixT();
  sol.quasienergies.resize(U.rows());
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    double lam = -std::arg(Tm(i, i)) / sol.period;
    if (lam < 0.0) lam += nu;
    if (lam >= nu) lam = 0.0;
    sol.quasienergies[i] = lam;
    if (lam < 1e-6 * nu || lam > nu * (1.0 - 1e-6))
      sol.warnings.push_back("branch-cut: quasi-energy " + std::to_string(lam) + " within 1e-6 nu of {0, nu}");
  }
  return sol;
}

EffectiveHamiltonian effective_hamiltonian(const FloquetSolution& solution) {
  EffectiveHamiltonian out;
  const CMatrix& Q = solution.vectors;
  CMatrix H = Q * solution.quasienergies.cast<Complex>().asDiagonal() * Q.adjoint();
  out.H = 0.5 * (H + H.adjoint());
  out.warnings = solution.warnings;
  return out;
}

double reconstruction_defect(const CMatrix& H, const CMatrix& U, double period) {
  const CMatrix E = (Complex(0.0, -period) * H).exp();
  return operator_norm(E - U);
}

DecayProfile effective_decay_profile(const CMatrix& H, const Lattice& lattice) {
  std::map<int, std::vector<double>> bins;
  const std::size_t n = lattice.size();
  std::vector<Site> coords(n);
  for (std::size_t i = 0; i < n; ++i) coords[i] = lattice.coords(i);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      bins[sup_distance(coords[i], coords[j])].push_back(
          std::abs(H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));

  DecayProfile out;
  std::vector<double> xs, ys;
  for (auto& [dist, vals] : bins) {
    DecayBin b;
    b.distance = dist;
    b.count = vals.size();
    b.max = *std::max_element(vals.begin(), vals.end());
    b.median = median_of(std::move(vals));
    out.bins.push_back(b);
    if (dist >= 1 && b.median > 0.0) {
      xs.push_back(dist);
      ys.push_back(std::log(b.median));
    }
  }
  if (xs.size() >= 2) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    if (slope < 0.0) out.fit_rate = -slope;
  }
  return out;
}

}  // namespace drivenloc
