#include "drivenloc/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "drivenloc/errors.hpp"

namespace drivenloc {

namespace {

double weight(int norm, double q) {
  if (q == 0.0) return 1.0;
  return norm == 0 ? 0.0 : std::pow(static_cast<double>(norm), q);
}

double linear_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

// Simpson average over one window of |phi(x, .)|^2 per site.
RVector window_average(const std::vector<CVector>& samples) {
  const std::size_t n = samples.size() - 1;
  RVector avg = RVector::Zero(samples.front().size());
  for (std::size_t j = 0; j <= n; ++j) {
    const double w = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    avg += w * samples[j].cwiseAbs2();
  }
  return avg / (3.0 * static_cast<double>(n));
}

}  // namespace

double spatial_moment(const Lattice& lattice, const CVector& phi, double q) {
  double s = 0.0;
  for (std::size_t i = 0; i < lattice.size(); ++i)
    s += weight(lattice.sup_norm(i), q) * std::norm(phi[static_cast<Eigen::Index>(i)]);
  return s;
}

double boundary_mass(const Lattice& lattice, const CVector& phi) {
  double s = 0.0;
  for (std::size_t i = 0; i < lattice.size(); ++i)
    if (lattice.on_outer_shell(i)) s += std::norm(phi[static_cast<Eigen::Index>(i)]);
  return s;
}

CVector site_state(const Lattice& lattice, std::size_t site) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(lattice.size()));
  v[static_cast<Eigen::Index>(site)] = 1.0;
  return v;
}

MomentTrace moment_trace_from_monodromy(const CMatrix& U, const Lattice& lattice, double period,
                                        const CVector& psi0, double q, int periods, int sample_every) {
  if (periods < 0 || sample_every < 1) throw DomainError("moment trace: invalid horizon or sampling");
  MomentTrace tr;
  tr.q = q;
  CVector phi = psi0;
  double run = 0.0;
  auto record = [&](int j) {
    const double v = spatial_moment(lattice, phi, q);
    run = std::max(run, v);
    tr.times.push_back(j * period);
    tr.values.push_back(v);
    tr.running_max.push_back(run);
    tr.max_boundary_mass = std::max(tr.max_boundary_mass, boundary_mass(lattice, phi));
  };
  record(0);
  for (int j = 1; j <= periods; ++j) {
    phi = U * phi;
    if (j % sample_every == 0) record(j);
  }
  tr.slope = linear_slope(tr.times, tr.values);
  tr.finite_size_warning = tr.max_boundary_mass > kBoundaryMassLimit;
  return tr;
}

MomentTrace dynamical_moment_trace(const ModelParams& params, const CVector& psi0, double q, int periods,
                                   int sample_every, const Propagator& prop) {
  const Monodromy m = monodromy(params, prop);
  return moment_trace_from_monodromy(m.U, params.lattice, params.period(), psi0, q, periods, sample_every);
}

double light_cone_constant(const ModelParams& params) {
  return params.g * params.driving.sup_signal_integral();
}

double poisson_tail(double C, int dim, double R) {
  const double lambda = 2.0 * dim * C;
  const long k0 = std::max(0L, static_cast<long>(std::ceil(R)));
  if (lambda == 0.0) return k0 == 0 ? std::exp(C) : 0.0;
  double term = std::exp(k0 * std::log(lambda) - std::lgamma(k0 + 1.0));
  double sum = 0.0;
  for (long k = k0; k < k0 + 100000; ++k) {
    sum += term;
    if (k > lambda && term < 1e-18 * sum) break;
    term *= lambda / static_cast<double>(k + 1);
  }
  return std::exp(C) * sum;
}

std::vector<LeakageRow> leakage_bound_check(const ModelParams& params, std::size_t x0,
                                            const std::vector<int>& radii, const std::vector<double>& times,
                                            const Propagator& prop) {
  const auto& lat = params.lattice;
  for (int R : radii)
    if (R < 0 || R > lat.half_width()) throw DomainError("leakage: radius outside [0, L]");
  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  if (!sorted.empty() && (sorted.front() < 0.0 || sorted.back() > params.period() * (1.0 + 1e-12)))
    throw DomainError("leakage: sample times must lie in [0, T]");

  const double C = light_cone_constant(params);
  const Site origin = lat.coords(x0);
  std::vector<int> dist(lat.size());
  for (std::size_t z = 0; z < lat.size(); ++z) dist[z] = sup_distance(lat.coords(z), origin);

  std::vector<LeakageRow> rows;
  CVector psi = site_state(lat, x0);
  double t = 0.0;
  for (double ts : sorted) {
    psi = evolve(params, psi, t, ts, prop);
    t = ts;
    for (int R : radii) {
      double inside = 0.0;
      for (std::size_t z = 0; z < lat.size(); ++z)
        if (dist[z] < R) inside += std::norm(psi[static_cast<Eigen::Index>(z)]);
      const double tau = poisson_tail(C, lat.dim(), R);
      LeakageRow row{R, ts, inside, (1.0 - tau) - tau, true};
      row.holds = row.inside_mass >= row.bound;
      rows.push_back(row);
    }
  }
  return rows;
}

TransferTraces transfer_traces(const ModelParams& params, const CVector& psi0, double p, double eps,
                               const std::vector<double>& times, std::uint64_t run_id, int samples_per_period,
                               const Propagator& prop) {
  if (!(eps >= 0.0 && eps <= p)) throw DomainError("transfer: need 0 <= eps <= p");
  const int n = samples_per_period + samples_per_period % 2;
  TransferTraces out;
  out.window = {run_id, p, {}, {}};
  out.pointwise = {run_id, p - eps, {}, {}};
  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  const auto& lat = params.lattice;
  CVector psi = psi0;
  double t = 0.0;
  for (double ts : sorted) {
    psi = evolve(params, psi, t, ts, prop);
    t = ts;
    const auto samples = sample_trajectory(params, psi, ts, params.period(), n, prop);
    const RVector avg = window_average(samples);
    double win = 0.0;
    for (std::size_t x = 0; x < lat.size(); ++x) win += weight(lat.sup_norm(x), p) * avg[static_cast<Eigen::Index>(x)];
    out.window.times.push_back(ts);
    out.window.values.push_back(win);
    out.pointwise.times.push_back(ts);
    out.pointwise.values.push_back(spatial_moment(lat, psi, p - eps));
  }
  return out;
}

TransferConstants transfer_constants(const Lattice& lattice, double C, double p, double eps) {
  if (!(eps >= 0.0 && eps <= p)) throw DomainError("transfer: need 0 <= eps <= p");
  const int d = lattice.dim();
  TransferConstants k;
  k.C = C;
  int rmin = 1;
  while (poisson_tail(C, d, rmin) >= 0.5) {
    if (++rmin > 100000) throw DomainError("transfer: light-cone tail never drops below 1/2");
  }
  k.r_min = rmin;

  const std::size_t n = lattice.size();
  std::vector<Site> coords(n);
  std::vector<double> radius(n), w(n), tau(n);
  double weighted_tail = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    coords[i] = lattice.coords(i);
    const int norm = lattice.sup_norm(i);
    const double lg = norm > 1 ? std::log(static_cast<double>(norm)) : 0.0;
    radius[i] = std::max<double>(rmin, lg * lg);
    w[i] = weight(norm, p - eps);
    tau[i] = poisson_tail(C, d, radius[i]);
    k.tau_max = std::max(k.tau_max, tau[i]);
    weighted_tail += w[i] * tau[i];
  }
  double c_s = 0.0, s_origin = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    double s = 0.0;
    for (std::size_t x0 = 0; x0 < n; ++x0)
      if (sup_distance(coords[x], coords[x0]) < radius[x0]) s += w[x0];
    const int norm = lattice.sup_norm(x);
    if (norm == 0)
      s_origin = s;
    else
      c_s = std::max(c_s, s / weight(norm, p));
  }
  const double denom = 1.0 - k.tau_max * k.tau_max;
  k.c_eps = c_s / denom;
  k.d_eps = (s_origin + 2.0 * weighted_tail) / denom;
  return k;
}

TransferReport moment_transfer_check(const MomentSeries& window, const MomentSeries& pointwise, double p,
                                     double eps, const TransferConstants& constants) {
  if (window.run_id != pointwise.run_id) throw ValidationError("transfer: traces come from different runs");
  if (window.times != pointwise.times) throw ValidationError("transfer: traces sampled at different times");
  if (window.order != p || pointwise.order != p - eps)
    throw ValidationError("transfer: trace orders do not match (p, p - eps)");
  TransferReport rep;
  rep.constants = constants;
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < window.times.size(); ++i) {
    TransferRow row;
    row.t = window.times[i];
    row.window_moment = window.values[i];
    row.point_moment = pointwise.values[i];
    row.lhs = constants.c_eps * row.window_moment + constants.d_eps;
    row.slack = row.lhs - row.point_moment;
    row.holds = row.slack >= 0.0;
    rep.all_hold = rep.all_hold && row.holds;
    rep.min_slack = std::min(rep.min_slack, row.slack);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace drivenloc
