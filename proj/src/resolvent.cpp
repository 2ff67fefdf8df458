#include "drivenloc/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "drivenloc/errors.hpp"

namespace drivenloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Nearest {
  double eigenvalue = 0.0;
  double distance = kInf;
};

Nearest nearest_eigenvalue(const CMatrix& H, double lambda) {
  Nearest out;
  if (H.size() == 0) return out;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw AccuracyError("resolvent: eigensolver failed");
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double d = std::abs(es.eigenvalues()[i] - lambda);
    if (d < out.distance) out = {es.eigenvalues()[i], d};
  }
  return out;
}

double row_sum_norm(const CMatrix& H) {
  return H.size() == 0 ? 0.0 : H.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

const char* to_string(Regime regime) { return regime == Regime::C1 ? "C1" : "C2"; }

double spectral_distance(const CMatrix& H, double lambda) { return nearest_eigenvalue(H, lambda).distance; }

Resolvent restricted_resolvent(const CMatrix& H, double lambda) {
  const Eigen::Index n = H.rows();
  const Nearest near = nearest_eigenvalue(H, lambda);
  const double scale = std::max(1.0, row_sum_norm(H));
  if (near.distance <= 1e-12 * scale)
    throw SingularResolventError("resolvent: lambda within tolerance of the spectrum", near.eigenvalue);
  CMatrix A = H;
  A.diagonal().array() -= lambda;
  Resolvent out;
  out.X = A.partialPivLu().inverse();
  out.residual = n == 0 ? 0.0 : (A * out.X - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  out.nearest_eigenvalue = near.eigenvalue;
  out.distance = near.distance;
  const double xmax = n == 0 ? 0.0 : out.X.cwiseAbs().maxCoeff();
  if (out.residual > 1e-10 * std::max(1.0, xmax))
    throw AccuracyError("resolvent: LU residual " + std::to_string(out.residual) + " above tolerance");
  return out;
}

Resolvent restricted_resolvent(const QuasiEnergyOperator& op, double lambda) {
  return restricted_resolvent(op.dense(), lambda);
}

Resolvent restricted_resolvent(const QuasiEnergyOperator& op, const std::vector<Eigen::Index>& region,
                               double lambda) {
  const CMatrix full = op.dense();
  const Eigen::Index n = static_cast<Eigen::Index>(region.size());
  CMatrix H(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) H(i, j) = full(region[i], region[j]);
  return restricted_resolvent(H, lambda);
}

// ---------------------------------------------------------------------------

bool ResonanceMap::resonant(std::size_t site, int k) const {
  for (const auto& s : segments)
    if (s.site == site && k >= s.k_first && k <= s.k_last) return true;
  return false;
}

std::size_t ResonanceMap::point_count() const {
  std::size_t n = 0;
  for (const auto& s : segments) n += static_cast<std::size_t>(s.length());
  return n;
}

ResonanceMap find_resonances(const std::vector<double>& values, double lambda, double g, double nu,
                             int k_min, int k_max) {
  if (!(nu > 0.0)) throw DomainError("resonances: nu must be positive");
  ResonanceMap map;
  map.lambda = lambda;
  map.threshold = std::sqrt(std::max(g, 0.0));
  map.nu = nu;
  map.k_min = k_min;
  map.k_max = k_max;
  const double th = map.threshold;
  for (std::size_t x = 0; x < values.size(); ++x) {
    // Candidates around the real solution, then the strict test decides.
    const double lo = std::floor((lambda - th - values[x]) / nu) - 1.0;
    const double hi = std::ceil((lambda + th - values[x]) / nu) + 1.0;
    if (hi < k_min || lo > k_max) continue;
    const int a = static_cast<int>(std::max<double>(lo, k_min));
    const int b = static_cast<int>(std::min<double>(hi, k_max));
    std::optional<ResonantSegment> seg;
    for (int k = a; k <= b; ++k) {
      if (std::abs(values[x] + k * nu - lambda) < th) {
        if (!seg) seg = ResonantSegment{x, k, k};
        else seg->k_last = k;
      }
    }
    if (seg) map.segments.push_back(*seg);
  }
  return map;
}

// ---------------------------------------------------------------------------

namespace {

int interval_gap(const ResonantSegment& a, const ResonantSegment& b) {
  return std::max({0, b.k_first - a.k_last, a.k_first - b.k_last});
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Points of Z^d at l1 distance exactly r from the origin.
double sphere_count(int d, int r) {
  if (r == 0) return 1.0;
  double c = 0.0;
  for (int i = 1; i <= std::min(d, r); ++i) c += std::ldexp(binomial(d, i) * binomial(r - 1, i - 1), i);
  return c;
}

}  // namespace

bool SecurityBoxSet::any_intersection() const {
  for (std::size_t i = 0; i < intersects.size(); ++i)
    for (std::size_t j = i + 1; j < intersects.size(); ++j)
      if (intersects[i][j]) return true;
  return false;
}

bool SecurityBoxSet::contains(std::size_t box, const Site& z, int k) const {
  const auto& s = segments[box];
  const int gap = std::max({0, s.k_first - k, k - s.k_last});
  return l1_distance(z, sites[box]) + gap < N;
}

std::size_t SecurityBoxSet::cardinality(std::size_t box) const {
  const int d = static_cast<int>(sites[box].size());
  double total = 0.0;
  for (int r = 0; r < N; ++r) total += sphere_count(d, r) * (segments[box].length() + 2.0 * (N - 1 - r));
  return static_cast<std::size_t>(std::llround(total));
}

SecurityBoxSet build_security_boxes(const ResonanceMap& map, const Lattice& lattice, int N) {
  if (N < 1) throw ConfigError("security boxes: N must be >= 1");
  SecurityBoxSet set;
  set.N = N;
  set.segments = map.segments;
  for (const auto& s : map.segments) set.sites.push_back(lattice.coords(s.site));
  const std::size_t n = set.segments.size();
  set.intersects.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // Two l1 balls of radius N-1 around the segments meet iff the segments
      // are at graph distance <= 2N - 2.
      const int dist = l1_distance(set.sites[i], set.sites[j]) + interval_gap(set.segments[i], set.segments[j]);
      const bool hit = dist <= 2 * N - 2;
      set.intersects[i][j] = set.intersects[j][i] = hit;
    }
  }
  return set;
}

// ---------------------------------------------------------------------------

double alpha_g(double g, double nu) { return nu < std::sqrt(g) ? 1.0 : g; }

double strong_resonance_threshold(Regime regime, double g, double nu, int L) {
  if (regime == Regime::C1) return nu * nu * alpha_g(g, nu);
  return std::exp(-std::sqrt(static_cast<double>(L)));
}

StrongResonance strong_resonance_test(const CMatrix& H, double lambda, double threshold) {
  StrongResonance r;
  r.distance = spectral_distance(H, lambda);
  r.threshold = threshold;
  r.flag = r.distance <= threshold;
  return r;
}

StrongResonance strong_resonance_test(const QuasiEnergyOperator& op, double lambda, Regime regime) {
  return strong_resonance_test(op.dense(), lambda,
                               strong_resonance_threshold(regime, op.g, op.nu, op.lattice.half_width()));
}

BoxReport is_good_box(const QuasiEnergyOperator& op, double lambda, double mu, std::optional<int> N) {
  BoxReport rep;
  rep.kind = "box";
  rep.dim = static_cast<std::size_t>(op.lattice.dim());
  rep.half_width = op.lattice.half_width();
  rep.k0 = op.k0;
  rep.K = op.K;
  rep.lambda = lambda;
  rep.mu = mu;
  rep.threshold = strong_resonance_threshold(Regime::C1, op.g, op.nu, rep.half_width);

  const ResonanceMap map = find_resonances(op.potential, lambda, op.g, op.nu, op.k_min(), op.k_max());
  rep.resonant_points = map.point_count();
  if (N) rep.intersecting_security_boxes = build_security_boxes(map, op.lattice, *N).any_intersection();

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

  const std::size_t c = op.lattice.center();
  const Site xc = op.lattice.coords(c);
  const Eigen::Index row = op.index(c, op.k0);
  double rate = kInf;
  for (Eigen::Index j = 0; j < op.dim(); ++j) {
    const std::size_t y = op.site_of(j);
    const int k = op.k_of(j);
    if (!op.lattice.on_outer_shell(y) && k != op.k_min() && k != op.k_max()) continue;
    const int dist = std::abs(k - op.k0) + l1_distance(xc, op.lattice.coords(y));
    if (dist == 0) continue;
    const double a = std::abs(R.X(row, j));
    if (a == 0.0) continue;
    rate = std::min(rate, -std::log(a) / dist);
  }
  rep.measured_rate = rate;
  rep.good = rate >= mu;
  if (!rep.good) rep.reason = "boundary decay below mu";
  return rep;
}

double weight_P(int k, double g, double nu, double M) {
  const double sg = std::sqrt(g);
  if (std::abs(k * nu) <= M + sg) return sg > 0.0 ? 1.0 / sg : kInf;
  const double den = nu * (std::abs(k) - 1) - M;
  if (!(den > 0.0)) throw DomainError("weight P: nu(|k| - 1) - M must be positive outside the window");
  return 1.0 / den;
}

double weight_P_extended(int k, double g, double nu, double M) {
  const double sg = std::sqrt(g);
  if (std::abs(k * nu) > M + sg) {
    const double den = nu * (std::abs(k) - 1) - M;
    if (den > 0.0) return 1.0 / den;
  }
  return sg > 0.0 ? 1.0 / sg : kInf;
}

double security_radius_condition(int N, int dim, double g, double nu) {
  const double sg = std::sqrt(g);
  const double log_val = (dim - 1) * std::log(static_cast<double>(N)) + std::log(2.0 * N + sg / nu) +
                         (N + 1) * std::log(2.0 * dim + 2.0) + 0.5 * (N - 1) * std::log(sg) -
                         std::log(nu * nu * alpha_g(g, nu));
  return std::exp(log_val);
}

int smallest_security_radius(int dim, double g, double nu, int max_N) {
  if (!(g > 0.0 && g < 1.0)) throw DomainError("security radius: g must lie in (0, 1)");
  for (int N = 1; N <= max_N; ++N)
    if (security_radius_condition(N, dim, g, nu) < 1.0) return N;
  throw DomainError("security radius: no N <= " + std::to_string(max_N) + " satisfies the condition");
}

ChainReport chain_bound_evaluate(const QuasiEnergyOperator& op, double lambda, int N) {
  ChainReport rep;
  rep.N = N;
  const double thr = strong_resonance_threshold(Regime::C1, op.g, op.nu, op.lattice.half_width());
  const ResonanceMap map = find_resonances(op.potential, lambda, op.g, op.nu, op.k_min(), op.k_max());
  const SecurityBoxSet boxes = build_security_boxes(map, op.lattice, N);
  if (boxes.any_intersection()) rep.failed.push_back("intersecting security boxes");

  const CMatrix H = op.dense();
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < op.dim(); ++i)
      if (boxes.contains(b, op.lattice.coords(op.site_of(i)), op.k_of(i))) idx.push_back(i);
    CMatrix sub(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) sub(i, j) = H(idx[i], idx[j]);
    if (strong_resonance_test(sub, lambda, thr).flag) {
      rep.failed.push_back("strongly resonant security box at site " + std::to_string(boxes.segments[b].site));
      break;
    }
  }
  if (strong_resonance_test(H, lambda, thr).flag) rep.failed.push_back("box strongly resonant");
  rep.hypotheses_hold = rep.failed.empty();

  Resolvent R;
  try {
    R = restricted_resolvent(H, lambda);
  } catch (const SingularResolventError&) {
    rep.hypotheses_hold = false;
    rep.failed.push_back("singular resolvent");
    rep.all_hold = false;
    return rep;
  }

  const double sg = std::sqrt(op.g);
  const double base = 2.0 / std::pow(op.nu * op.nu * alpha_g(op.g, op.nu), 2);
  const std::size_t c = op.lattice.center();
  const Site xc = op.lattice.coords(c);
  rep.min_log_slack = kInf;
  for (std::size_t y = 0; y < op.lattice.size(); ++y) {
    if (!op.lattice.on_outer_shell(y)) continue;
    const int dx = l1_distance(xc, op.lattice.coords(y));
    for (int k1 = op.k_min(); k1 <= op.k_max(); ++k1) {
      for (int k2 = op.k_min(); k2 <= op.k_max(); ++k2) {
        ChainRow row;
        row.site = y;
        row.k1 = k1;
        row.k2 = k2;
        row.distance = dx + std::abs(k1 - k2);
        row.lhs = std::abs(R.X(op.index(c, k1), op.index(y, k2)));
        const int n0 = row.distance / (2 * N);
        row.rhs = base * std::pow(sg, 0.5 * N * n0);
        const double slack = std::log(row.rhs) - std::log(row.lhs);
        rep.min_log_slack = std::min(rep.min_log_slack, slack);
        if (row.lhs > row.rhs) rep.all_hold = false;
        rep.rows.push_back(row);
      }
    }
  }
  return rep;
}

}  // namespace drivenloc
