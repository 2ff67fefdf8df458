#include "drivenloc/columns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "drivenloc/errors.hpp"

namespace drivenloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double column_prefactor(int L, int dim, double M) {
  return std::pow(2.0 * L + 1.0, 0.5 * dim) * (2.0 + M);
}

// Norm of the centre row on the harmonics that couple outside the window,
// scaled by the coupling to the discarded harmonics and the resolvent norm.
double row_truncation_tail(const QuasiEnergyOperator& op, const CMatrix& X, Eigen::Index row, double dist) {
  double edge = 0.0;
  for (Eigen::Index j = 0; j < op.dim(); ++j)
    if (std::abs(op.k_of(j) - op.k0) > op.K - op.harmonic_cutoff) edge += std::norm(X(row, j));
  return op.coupling_bound * std::sqrt(edge) / dist;
}

}  // namespace

RMatrix column_kernel(const QuasiEnergyOperator& op, double M) {
  const Eigen::Index n = op.dim();
  RMatrix G = RMatrix::Zero(n, n);
  for (Eigen::Index col = 0; col < op.matrix.outerSize(); ++col) {
    for (CSparse::InnerIterator it(op.matrix, col); it; ++it) {
      const Eigen::Index a = it.row(), b = it.col();
      if (a == b || it.value() == Complex(0.0, 0.0)) continue;
      G(a, b) = std::abs(it.value()) * weight_P_extended(op.k_of(b), op.g, op.nu, M);
    }
  }
  return G;
}

double column_offset(int L, int dim, double M, double g, double c63) {
  const double sg = std::sqrt(g);
  return std::log(column_prefactor(L, dim, M) * (1.0 + c63 * sg) / sg);
}

BoxReport is_good_column(const QuasiEnergyOperator& op, double lambda, double mu, double M, double c63) {
  BoxReport rep;
  rep.kind = "column";
  rep.dim = static_cast<std::size_t>(op.lattice.dim());
  rep.half_width = op.lattice.half_width();
  rep.k0 = op.k0;
  rep.K = op.K;
  rep.lambda = lambda;
  rep.mu = mu;
  const int L = rep.half_width;
  rep.threshold = strong_resonance_threshold(Regime::C2, op.g, op.nu, L);

  Resolvent R;
  try {
    R = restricted_resolvent(op, lambda);
  } catch (const SingularResolventError& e) {
    rep.strongly_resonant = true;
    rep.spectral_distance = std::abs(e.nearest_eigenvalue - lambda);
    rep.reason = "singular resolvent";
    return rep;
  }
  rep.spectral_distance = R.distance;
  rep.strongly_resonant = R.distance <= rep.threshold;
  const Eigen::Index x0 = op.index(op.lattice.center(), 0);
  rep.truncation_tail = row_truncation_tail(op, R.X, x0, R.distance);
  if (rep.strongly_resonant) {
    rep.reason = "strongly resonant";
    return rep;
  }
  if (op.g == 0.0) {
    rep.measured_rate = kInf;
    rep.good = true;
    return rep;
  }

  rep.resonant_points = find_resonances(op.potential, lambda, op.g, op.nu, op.k_min(), op.k_max()).point_count();
  if (rep.resonant_points > 0) {
    rep.reason = "resonant point in column";
    return rep;
  }
  RMatrix G = column_kernel(op, M);
  if (!(l1max_norm(G) < 0.5)) {
    rep.reason = "kernel norm not below 1/2";
    return rep;
  }
  const DecayFunction D(std::move(G));
  rep.offset = column_offset(L, op.lattice.dim(), M, op.g, c63);
  const double P0 = weight_P_extended(0, op.g, op.nu, M);
  const double scale = std::exp(rep.offset);

  bool pointwise = true;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < op.dim(); ++j) {
    if (!op.lattice.on_outer_shell(op.site_of(j))) continue;
    const double e = scale * D.path_sum(x0, j);
    sum += e;
    if (std::abs(R.X(x0, j)) > P0 * e * (1.0 + 1e-9)) pointwise = false;
  }
  rep.measured_rate = sum > 0.0 ? -std::log(sum) / L : kInf;
  rep.good = pointwise && sum < std::exp(-mu * L);
  if (!pointwise) rep.reason = "pointwise boundary bound fails";
  else if (!rep.good) rep.reason = "boundary sum above exp(-mu L)";
  return rep;
}

ColumnBoundReport column_resolvent_bound_check(const QuasiEnergyOperator& op, double lambda, double M,
                                               double constant) {
  ColumnBoundReport rep;
  rep.constant = constant;
  const Resolvent R = restricted_resolvent(op, lambda);
  rep.sup_inverse_distance = 1.0 / R.distance;
  rep.truncation_tail = row_truncation_tail(op, R.X, op.index(op.lattice.center(), 0), R.distance);
  rep.min_slack = kInf;
  const double pref = column_prefactor(op.lattice.half_width(), op.lattice.dim(), M);
  for (Eigen::Index z = 0; z < op.dim(); ++z) {
    const double P = weight_P_extended(op.k_of(z), op.g, op.nu, M);
    if (!std::isfinite(P)) continue;
    for (Eigen::Index y = 0; y < op.dim(); ++y) {
      const double w = pref * P / (1.0 + std::abs(op.k_of(z) - op.k_of(y)));
      const double a = std::abs(R.X(z, y));
      rep.required_constant = std::max(rep.required_constant, a / w - rep.sup_inverse_distance);
      rep.min_slack = std::min(rep.min_slack, w * (rep.sup_inverse_distance + constant) - a);
    }
  }
  rep.holds = rep.min_slack >= 0.0;
  return rep;
}

double calibrate_column_constant(std::vector<double> required, double quantile) {
  if (required.empty()) throw ConfigError("calibration: empty ensemble");
  std::sort(required.begin(), required.end());
  const double pos = std::clamp(quantile, 0.0, 1.0) * static_cast<double>(required.size() - 1);
  const std::size_t i = static_cast<std::size_t>(std::ceil(pos));
  return std::max(0.0, required[i]);
}

double uniform_l1_kernel_bound(const QuasiEnergyOperator& op, double M) {
  if (op.g == 0.0) return 0.0;
  const Eigen::Index n = op.dim();
  RVector row(n);
  row.setZero();
  for (Eigen::Index col = 0; col < op.matrix.outerSize(); ++col) {
    for (CSparse::InnerIterator it(op.matrix, col); it; ++it) {
      if (it.row() == it.col()) continue;
      row[it.row()] += std::abs(it.value()) / op.g * weight_P_extended(op.k_of(it.col()), op.g, op.nu, M);
    }
  }
  double sup = 0.0;
  for (std::size_t y = 0; y < op.lattice.size(); ++y) {
    for (int kx = op.k_min(); kx <= op.k_max(); ++kx) {
      double s = 0.0;
      for (int ky = op.k_min(); ky <= op.k_max(); ++ky) s += row[op.index(y, ky)] / (1.0 + std::abs(kx - ky));
      sup = std::max(sup, s);
    }
  }
  return sup;
}

namespace {

struct SubColumn {
  ModelParams model;
  QuasiEnergyOperator op;
  Resolvent R;
};

SubColumn make_sub_column(const ModelParams& big, const Site& a, int L, int K, double lambda) {
  ModelParams m = restrict_model(big, a, L);
  QuasiEnergyOperator op = build_quasienergy_operator(m, 0, K);
  Resolvent R = restricted_resolvent(op, lambda);
  return {std::move(m), std::move(op), std::move(R)};
}

}  // namespace

TwoScaleReport two_scale_column_check(const ModelParams& params, int small_scale, int large_scale, int K,
                                      double lambda, double mu, double c63) {
  if (small_scale < 1 || large_scale <= 2 * small_scale)
    throw ConfigError("two-scale check: need 1 <= L_k and L_{k+1} > 2 L_k");
  TwoScaleReport rep;
  rep.small_scale = small_scale;
  rep.large_scale = large_scale;
  rep.mu = mu;
  const int Lk = small_scale, Lk1 = large_scale;
  const int d = params.lattice.dim();
  const Site origin(static_cast<std::size_t>(d), 0);
  const ModelParams big = restrict_model(params, origin, Lk1);
  const QuasiEnergyOperator opB = build_quasienergy_operator(big, 0, K);
  const double M = big.support_bound();
  const Lattice& lat = big.lattice;

  Resolvent XB;
  try {
    XB = restricted_resolvent(opB, lambda);
  } catch (const SingularResolventError&) {
    rep.hypotheses_hold = false;
    rep.failed.push_back("large column singular");
    return rep;
  }
  if (XB.distance <= strong_resonance_threshold(Regime::C2, big.g, big.nu(), Lk1))
    rep.failed.push_back("large column strongly resonant");

  // Classify sub-columns and keep their resolvents.
  const std::size_t n_sites = lat.size();
  std::vector<std::optional<SubColumn>> region(n_sites);
  std::vector<bool> bad(n_sites, false);
  for (std::size_t a = 0; a < n_sites; ++a) {
    if (lat.sup_norm(a) >= Lk1 - Lk) continue;
    const Site xa = lat.coords(a);
    try {
      SubColumn s = make_sub_column(big, xa, Lk, K, lambda);
      if (is_good_column(s.op, lambda, mu, M, c63).good) {
        region[a] = std::move(s);
        continue;
      }
    } catch (const SingularResolventError&) {
    }
    bad[a] = true;
    rep.bad_centers.push_back(xa);
  }
  for (std::size_t i = 0; i < rep.bad_centers.size(); ++i)
    for (std::size_t j = i + 1; j < rep.bad_centers.size(); ++j)
      if (sup_distance(rep.bad_centers[i], rep.bad_centers[j]) > 2 * Lk) {
        rep.failed.push_back("two disjoint bad sub-columns");
        i = rep.bad_centers.size();
        break;
      }

  const double thr2 = strong_resonance_threshold(Regime::C2, big.g, big.nu(), 2 * Lk);
  for (std::size_t a = 0; a < n_sites; ++a) {
    if (lat.sup_norm(a) > Lk1 - 2 * Lk) continue;
    const QuasiEnergyOperator op2 = build_quasienergy_operator(restrict_model(big, lat.coords(a), 2 * Lk), 0, K);
    if (strong_resonance_test(op2.dense(), lambda, thr2).flag) {
      rep.failed.push_back("strongly resonant column at scale 2 L_k");
      break;
    }
  }
  for (std::size_t a = 0; a < n_sites; ++a) {
    if (!bad[a] || lat.sup_norm(a) >= Lk1 - 2 * Lk) continue;
    try {
      region[a] = make_sub_column(big, lat.coords(a), 2 * Lk, K, lambda);
    } catch (const SingularResolventError&) {
      rep.failed.push_back("singular sub-column at scale 2 L_k");
    }
  }

  // Coarse kernel: one jump out of the sub-column around each vertex.
  const Eigen::Index n = opB.dim();
  RMatrix G = RMatrix::Zero(n, n);
  for (std::size_t a = 0; a < n_sites; ++a) {
    if (!region[a]) continue;
    const SubColumn& s = *region[a];
    const Site xa = lat.coords(a);
    const int radius = s.model.lattice.half_width();
    const std::size_t c = s.op.lattice.center();
    for (Eigen::Index u = 0; u < s.op.dim(); ++u) {
      const std::size_t us = s.op.site_of(u);
      if (!s.op.lattice.on_outer_shell(us)) continue;
      Site xu = s.op.lattice.coords(us);
      for (std::size_t i = 0; i < xu.size(); ++i) xu[i] += xa[i];
      const Eigen::Index ub = opB.index(lat.index(xu), s.op.k_of(u));
      for (CSparse::InnerIterator it(opB.matrix, ub); it; ++it) {
        const Eigen::Index b = it.row();
        if (sup_distance(lat.coords(opB.site_of(b)), xa) <= radius) continue;
        const double hop = std::abs(it.value());
        for (int k = opB.k_min(); k <= opB.k_max(); ++k)
          G(opB.index(a, k), b) += std::abs(s.R.X(s.op.index(c, k), u)) * hop;
      }
    }
  }
  rep.kernel_norm = l1max_norm(G);
  rep.l1_kernel_bound = uniform_l1_kernel_bound(opB, M);
  if (!(rep.kernel_norm < 0.5)) {
    rep.failed.push_back("coarse kernel norm not below 1/2");
    rep.hypotheses_hold = false;
    return rep;
  }
  rep.hypotheses_hold = rep.failed.empty();

  const DecayFunction D(G);
  const Eigen::Index x0 = opB.index(lat.center(), 0);
  std::vector<Eigen::Index> absorbing;
  for (Eigen::Index b = 0; b < n; ++b)
    if (!region[opB.site_of(b)]) absorbing.push_back(b);

  double coarse = 0.0;
  for (Eigen::Index b : absorbing) coarse += D.path_sum(x0, b);
  rep.mu_prime = coarse > 0.0 ? -std::log(coarse) / Lk1 : kInf;
  rep.target = mu - 3.0 * Lk / Lk1 + std::log(1.0 - rep.kernel_norm) / Lk1;
  rep.good = rep.mu_prime >= rep.target;

  for (Eigen::Index y = 0; y < n; ++y) {
    if (!lat.on_outer_shell(opB.site_of(y))) continue;
    rep.huygens_lhs += std::abs(XB.X(x0, y));
    for (Eigen::Index b : absorbing) rep.huygens_rhs += D.path_sum(x0, b) * std::abs(XB.X(b, y));
  }
  rep.huygens_holds = rep.huygens_lhs <= rep.huygens_rhs * (1.0 + 1e-9) + 1e-300;
  const double P0 = weight_P_extended(0, big.g, big.nu(), M);
  rep.dense_rate = rep.huygens_lhs > 0.0 ? -std::log(rep.huygens_lhs / P0) / Lk1 : kInf;
  return rep;
}

}  // namespace drivenloc
