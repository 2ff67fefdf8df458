// Acceptance run: one PASS/FAIL line per criterion, followed by the measured
// quantities. Exit status 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drivenloc/adiabatic.hpp"
#include "drivenloc/decay.hpp"
#include "drivenloc/experiment.hpp"
#include "drivenloc/floquet.hpp"
#include "drivenloc/parallel.hpp"
#include "drivenloc/probability.hpp"
#include "drivenloc/propagate.hpp"
#include "drivenloc/resolvent.hpp"
#include "drivenloc/rng.hpp"

namespace fs = std::filesystem;
using namespace drivenloc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

ModelParams chain_model(int L, double M, double g, double nu, bool square, std::uint64_t seed) {
  Lattice lat(1, L);
  DisorderRealization dis = sample_potential(Density::uniform(M), lat, seed);
  DrivingSpec drv = square ? canonical_square_wave(lat, nu) : canonical_smooth(lat, nu);
  return ModelParams(lat, std::move(dis), std::move(drv), g);
}

// Independent unitarity measure: largest singular value of U^dagger U - I.
double unitarity_defect(const CMatrix& U) {
  const CMatrix D = U.adjoint() * U - CMatrix::Identity(U.rows(), U.cols());
  return Eigen::JacobiSVD<CMatrix>(D).singularValues()(0);
}

double circular_distance(double a, double b, double nu) {
  double d = std::fmod(a - b, nu);
  if (d < 0) d += nu;
  return std::min(d, nu - d);
}

Verdict crit1(unsigned) {
  Verdict v{true, ""};
  for (bool square : {false, true}) {
    const auto t0 = Clock::now();
    const Monodromy U = monodromy(chain_model(32, 1.0, 0.1, 1.0, square, 101));
    const double t = seconds_since(t0);
    const double defect = unitarity_defect(U.U);
    const bool ok = defect <= 1e-8 && t < 60.0;
    v.pass = v.pass && ok;
    v.detail += std::string(square ? " square" : " smooth") + ": defect " + fmt(defect) + ", " + fmt(t, 3) + " s;";
  }
  return v;
}

struct MatchCount {
  int matched = 0;
  int total = 0;
  double worst_ratio = 0.0;
  int shifts = 0;
  double worst_tail = 0.0;
};

// Criteria 2 and 3 share the block diagonalization.
MatchCount spectral_and_ladder(std::uint64_t seed) {
  const ModelParams m = chain_model(8, 1.0, 0.1, 1.0, false, seed);
  const FloquetSolution sol = floquet_spectrum(monodromy(m).U, m.nu());
  const QuasiEnergyOperator op = build_quasienergy_operator(m, 0, 16);
  const BlockSpectrum bs = diagonalize_block(op);
  MatchCount c;
  for (Eigen::Index j = 0; j < sol.quasienergies.size(); ++j) {
    double best = INFINITY, tail = 0.0;
    for (Eigen::Index i = 0; i < bs.eigenvalues.size(); ++i) {
      if (!bs.interior[i]) continue;
      const double d = circular_distance(bs.eigenvalues[i], sol.quasienergies[j], m.nu());
      if (d < best) {
        best = d;
        tail = bs.tails[i];
      }
    }
    ++c.total;
    if (best <= std::max(1e-6, tail)) ++c.matched;
  }
  for (Eigen::Index i = 0; i < bs.eigenvalues.size(); ++i) {
    if (!bs.interior[i]) continue;
    for (int n : {-1, 1}) {
      const ShiftedState s = ladder_shift(op, bs.eigenvectors.col(i), n);
      const double r = eigen_residual(op, s.state, bs.eigenvalues[i] + n * m.nu());
      c.worst_ratio = std::max(c.worst_ratio, r / bs.tails[i]);
      c.worst_tail = std::max(c.worst_tail, bs.tails[i]);
      ++c.shifts;
    }
  }
  return c;
}

std::vector<MatchCount> spectral_runs(unsigned jobs) {
  static std::vector<MatchCount> cache;
  if (cache.empty())
    cache = parallel_map<MatchCount>(20, jobs, [](std::size_t i) { return spectral_and_ladder(derive_seed(202, i)); });
  return cache;
}

Verdict crit2(unsigned jobs) {
  int matched = 0, total = 0;
  for (const auto& c : spectral_runs(jobs)) {
    matched += c.matched;
    total += c.total;
  }
  const double frac = static_cast<double>(matched) / total;
  return {frac >= 0.95, " matched " + std::to_string(matched) + "/" + std::to_string(total) + " levels (" +
                            fmt(100.0 * frac) + "%), need >= 95%"};
}

Verdict crit3(unsigned jobs) {
  double worst = 0.0, tail = 0.0;
  int shifts = 0;
  for (const auto& c : spectral_runs(jobs)) {
    worst = std::max(worst, c.worst_ratio);
    tail = std::max(tail, c.worst_tail);
    shifts += c.shifts;
  }
  return {worst <= 10.0, " " + std::to_string(shifts) + " shifted eigenpairs, worst residual/tail " + fmt(worst) +
                             " (<= 10), largest tail " + fmt(tail)};
}

EnsembleSpec wegner_spec(unsigned jobs) {
  EnsembleSpec s;
  s.realizations = 2000;
  s.base_seed = 404;
  s.dim = 1;
  s.side = 8;
  s.nu = 0.7;
  s.g = 0.05;
  s.K = 4;
  s.energy = 0.35;
  s.jobs = jobs;
  return s;
}

Verdict wegner(unsigned jobs, bool infinite) {
  const auto t0 = Clock::now();
  const std::vector<double> eps = infinite ? std::vector<double>{1e-6, 1e-4} : std::vector<double>{1e-4, 1e-3};
  const auto rows = estimate_window_probability(wegner_spec(jobs), eps, infinite);
  const double t = seconds_since(t0);
  Verdict v{t < 600.0, ""};
  for (const auto& r : rows) {
    v.pass = v.pass && !r.violated;
    v.detail += " eps " + fmt(r.parameter) + ": " + std::to_string(r.successes) + "/" + std::to_string(r.trials) +
                ", CI [" + fmt(r.ci_lo) + ", " + fmt(r.ci_hi) + "] vs bound " + fmt(r.bound) + ";";
  }
  v.detail += " " + fmt(t, 3) + " s";
  return v;
}

Verdict crit6(unsigned jobs) {
  struct Row {
    int vectors = 0;
    int violations = 0;
    double worst_energy = 0.0;
    double worst_ratio = 0.0;
  };
  const double M = 1.0;
  const auto rows = parallel_map<Row>(100, jobs, [&](std::size_t i) {
    const ModelParams m = chain_model(4, M, 0.1, 1.0, false, derive_seed(606, i));
    const QuasiEnergyOperator op = build_quasienergy_operator(m, 0, 12);
    const BlockSpectrum bs = diagonalize_block(op);
    Row r;
    for (Eigen::Index j = 0; j < bs.eigenvalues.size(); ++j) {
      if (!bs.interior[j]) continue;
      const FrequencyDecay f = frequency_decay(op, bs.eigenvectors.col(j), bs.eigenvalues[j], M);
      ++r.vectors;
      if (!f.holds()) ++r.violations;
      r.worst_energy = std::max(r.worst_energy, f.energy_sum);
      r.worst_ratio = std::max(r.worst_ratio, f.max_pointwise_ratio);
    }
    return r;
  });
  Row total;
  for (const auto& r : rows) {
    total.vectors += r.vectors;
    total.violations += r.violations;
    total.worst_energy = std::max(total.worst_energy, r.worst_energy);
    total.worst_ratio = std::max(total.worst_ratio, r.worst_ratio);
  }
  return {total.violations == 0 && total.vectors > 0,
          " " + std::to_string(total.vectors) + " interior vectors, " + std::to_string(total.violations) +
              " violations; max energy sum " + fmt(total.worst_energy) + " (<= 1.21), max pointwise ratio " +
              fmt(total.worst_ratio) + " (<= 1)"};
}

// All paths of length 1..depth from x, accumulated by endpoint.
void enumerate_paths(const RMatrix& G, Eigen::Index x, double weight, int depth, RVector& acc) {
  if (depth == 0) return;
  for (Eigen::Index y = 0; y < G.cols(); ++y) {
    if (G(x, y) == 0.0) continue;
    const double w = weight * G(x, y);
    acc[y] += w;
    enumerate_paths(G, y, w, depth - 1, acc);
  }
}

Verdict crit7(unsigned) {
  constexpr int kDepth = 6;
  int instances = 0, mismatches = 0, triangle_failures = 0, loop_bound_failures = 0, triples = 0;
  double worst_excess = 0.0, worst_gap = 0.0;
  SplitMix rng(707);
  while (instances < 100) {
    const int n = 2 + static_cast<int>(rng.uniform() * 7.0);
    RMatrix G = RMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (rng.uniform() < 0.6) G(i, j) = rng.uniform();
    const double norm = l1max_norm(G);
    if (norm == 0.0) continue;
    G *= rng.uniform(0.05, 0.49) / norm;
    const DecayFunction d(G);
    ++instances;
    const double q = d.norm();
    const double tail = std::pow(q, kDepth + 1) / (1.0 - q);
    for (Eigen::Index x = 0; x < n; ++x) {
      RVector acc = RVector::Zero(n);
      enumerate_paths(G, x, 1.0, kDepth, acc);
      for (Eigen::Index y = 0; y < n; ++y) {
        const double excess = d.path_sum(x, y) - acc[y];
        worst_excess = std::max(worst_excess, excess);
        if (excess < -1e-14 || excess > tail + 1e-14) ++mismatches;
      }
    }
    for (Eigen::Index x = 0; x < n; ++x)
      for (Eigen::Index y = 0; y < n; ++y)
        for (Eigen::Index z = 0; z < n; ++z) {
          ++triples;
          const double gap = d(x, z) - d(x, y) - d(y, z);
          if (gap <= 1e-12) continue;
          ++triangle_failures;
          worst_gap = std::max(worst_gap, gap);
          // Splitting an x -> z path at each of its visits to y bounds the
          // overcount by the loop sum at y.
          if (gap > std::log1p(d.path_sum(y, y)) + 1e-12) ++loop_bound_failures;
        }
  }
  return {mismatches == 0 && triangle_failures == 0,
          " " + std::to_string(instances) + " kernels, " + std::to_string(mismatches) + " path-sum mismatches (max excess " +
              fmt(worst_excess) + " within geometric tail), " + std::to_string(triangle_failures) + "/" +
              std::to_string(triples) + " triples violate the triangle inequality (max excess " + fmt(worst_gap) +
              ", " + std::to_string(loop_bound_failures) + " beyond ln(1 + loop sum at the middle vertex))"};
}

Verdict crit8(unsigned jobs) {
  const double g = 0.01, nu = 0.9, M = 1.0, lambda = 0.45;
  const int K = 3, k0 = 5, L = 4, d = 1;
  const double target = -std::log(2.0 * (d + 1) * g) - 0.1;
  const bool offset_ok = k0 > (M + std::sqrt(g)) / nu + K;
  const auto reports = parallel_map<BoxReport>(100, jobs, [&](std::size_t i) {
    const ModelParams m = chain_model(L, M, g, nu, false, derive_seed(808, i));
    return is_good_box(build_quasienergy_operator(m, k0, K), lambda, target);
  });
  int good = 0;
  double min_rate = INFINITY;
  for (const auto& r : reports) {
    if (r.good && r.measured_rate >= target) ++good;
    min_rate = std::min(min_rate, r.measured_rate);
  }
  return {offset_ok && good == 100, " " + std::to_string(good) + "/100 good, min rate " + fmt(min_rate) +
                                        " vs target " + fmt(target)};
}

Verdict crit9(unsigned) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double delta = 0.01 * std::pow(200.0, i / 19.0);
    TwoLevelSweep sw;
    sw.rate = 1.0;
    sw.coupling = std::sqrt(delta);
    const double exact = lz_closed_form(sw.coupling, sw.rate);
    worst = std::max(worst, std::abs(lz_transition_probability(sw) - exact) / exact);
  }
  const double t = seconds_since(t0);
  return {worst <= 0.02 && t < 60.0, " worst relative error " + fmt(worst) + " over 20 points, " + fmt(t, 3) + " s"};
}

Verdict crit10(unsigned jobs) {
  struct Run {
    double running_max = 0.0;
    bool warned = false;
  };
  auto ensemble = [&](double g, double M, std::uint64_t base) {
    return parallel_map<Run>(20, jobs, [&](std::size_t i) {
      const ModelParams m = chain_model(64, M, g, 1.0, false, derive_seed(base, i));
      const Monodromy U = monodromy(m);
      const MomentTrace tr =
          moment_trace_from_monodromy(U.U, m.lattice, m.period(), site_state(m.lattice, m.lattice.center()), 2.0, 10000);
      return Run{tr.running_max.back(), tr.finite_size_warning};
    });
  };
  auto mean = [](const std::vector<Run>& runs, int& warned) {
    double s = 0.0;
    for (const auto& r : runs) {
      s += r.running_max;
      warned += r.warned;
    }
    return s / static_cast<double>(runs.size());
  };
  int warn_loc = 0, warn_weak = 0;
  const double loc = mean(ensemble(0.05, 1.0, 1001), warn_loc);
  const double weak = mean(ensemble(1.0, 0.1, 1002), warn_weak);
  return {10.0 * loc <= weak, " mean running max localized " + fmt(loc) + " (" + std::to_string(warn_loc) +
                                  " finite-size flags), weak disorder " + fmt(weak) + " (" + std::to_string(warn_weak) +
                                  " flags), ratio " + fmt(weak / loc)};
}

Verdict crit11(unsigned jobs) {
  struct Run {
    double defect = 0.0;
    std::map<int, double> medians;
  };
  const std::vector<int> bins = {1, 2, 4, 8};
  const auto runs = parallel_map<Run>(50, jobs, [&](std::size_t i) {
    const ModelParams m = chain_model(32, 1.0, 0.05, 0.5, false, derive_seed(1101, i));
    const Monodromy U = monodromy(m);
    const EffectiveHamiltonian H = effective_hamiltonian(floquet_spectrum(U.U, m.nu()));
    Run r;
    r.defect = reconstruction_defect(H.H, U.U, m.period());
    for (const auto& b : effective_decay_profile(H.H, m.lattice).bins)
      if (std::find(bins.begin(), bins.end(), b.distance) != bins.end()) r.medians[b.distance] = b.median;
    return r;
  });
  double defect = 0.0;
  std::map<int, double> avg;
  for (const auto& r : runs) {
    defect = std::max(defect, r.defect);
    for (int b : bins) avg[b] += r.medians.at(b) / static_cast<double>(runs.size());
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < bins.size(); ++i) decreasing = decreasing && avg[bins[i]] < avg[bins[i - 1]];
  const double ratio = avg[8] / avg[1];
  std::string detail = " max reconstruction " + fmt(defect) + "; medians";
  for (int b : bins) detail += " d" + std::to_string(b) + "=" + fmt(avg[b]);
  detail += "; ratio d8/d1 " + fmt(ratio) + " (<= 1e-3)";
  return {defect <= 1e-8 && decreasing && ratio <= 1e-3, detail};
}

Verdict crit12(unsigned jobs) {
  std::vector<int> radii;
  for (int r = 1; r <= 12; ++r) radii.push_back(r);
  const ModelParams probe = chain_model(16, 1.0, 0.2, 1.0, false, 0);
  std::vector<double> times;
  for (int i = 0; i <= 8; ++i) times.push_back(probe.period() * i / 8.0);
  struct Run {
    int rows = 0;
    int violations = 0;
    double min_slack = INFINITY;
  };
  const auto runs = parallel_map<Run>(50, jobs, [&](std::size_t i) {
    const ModelParams m = chain_model(16, 1.0, 0.2, 1.0, false, derive_seed(1201, i));
    Run r;
    for (const auto& row : leakage_bound_check(m, m.lattice.center(), radii, times)) {
      ++r.rows;
      if (!row.holds) ++r.violations;
      r.min_slack = std::min(r.min_slack, row.inside_mass - row.bound);
    }
    return r;
  });
  Run total;
  for (const auto& r : runs) {
    total.rows += r.rows;
    total.violations += r.violations;
    total.min_slack = std::min(total.min_slack, r.min_slack);
  }
  return {total.violations == 0, " " + std::to_string(total.rows) + " (R, t) samples, " +
                                     std::to_string(total.violations) + " violations, min slack " + fmt(total.min_slack)};
}

Json small_config(const std::string& scenario) {
  Json c = {{"schema_version", 1}, {"scenario", scenario}, {"seed", 1313}};
  c["model"] = {{"dim", 1}, {"L", 4}, {"M", 1.0}, {"g", 0.1}, {"nu", 1.0}};
  if (scenario == "floquet") c["params"] = {{"K", 6}};
  if (scenario == "evolve") c["params"] = {{"periods", 20}};
  if (scenario == "wegner") c["realizations"] = 60;
  if (scenario == "goodbox" || scenario == "goodcolumn") c["realizations"] = 6;
  if (scenario == "goodcolumn") c["params"] = {{"K", 3}};
  if (scenario == "scan") c["params"] = {{"g", {0.05, 0.2}}, {"nu", {1.0}}, {"periods", 10}};
  if (scenario == "scan") c["realizations"] = 3;
  if (scenario == "lz") c["params"] = {{"points", 4}};
  if (scenario == "leakage") c["realizations"] = 3;
  return c;
}

Verdict crit13(unsigned) {
  const fs::path root = fs::temp_directory_path() / "drivenloc_acceptance_replay";
  fs::remove_all(root);
  int identical = 0, differing = 0;
  std::string bad;
  for (const auto& scenario : scenario_names()) {
    const fs::path dir = root / scenario;
    run_experiment(scenario, small_config(scenario), dir, {std::nullopt, 1});
    for (unsigned jobs : {1u, 4u}) {
      const ReplayReport rep = replay_manifest(dir / "manifest.json", dir / ("replay" + std::to_string(jobs)), jobs);
      identical += static_cast<int>(rep.identical.size());
      differing += static_cast<int>(rep.differing.size());
      for (const auto& f : rep.differing) bad += " " + scenario + "/" + f;
    }
  }
  fs::remove_all(root);
  return {differing == 0 && identical > 0, " " + std::to_string(identical) + " files identical across replays at 1 and 4 workers, " +
                                               std::to_string(differing) + " differing" + bad};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  unsigned jobs = 1;
  std::vector<int> only;
  app.add_option("--jobs", jobs, "worker threads, 0 for all cores");
  app.add_option("--only", only, "criteria to run (default all)")->check(CLI::Range(1, 13));
  CLI11_PARSE(app, argc, argv);
  jobs = resolve_jobs(jobs);

  const std::vector<std::pair<std::string, std::function<Verdict(unsigned)>>> criteria = {
      {"unitarity of the monodromy", crit1},
      {"quasi-energies vs truncated quasi-energy operator", crit2},
      {"ladder symmetry of interior eigenpairs", crit3},
      {"finite-column window probability", [](unsigned j) { return wegner(j, false); }},
      {"infinite-column window probability", [](unsigned j) { return wegner(j, true); }},
      {"eigenfunction frequency decay", crit6},
      {"decay function vs path enumeration", crit7},
      {"high-offset boxes are good", crit8},
      {"Landau-Zener transition probability", crit9},
      {"dynamical localization contrast", crit10},
      {"effective Hamiltonian locality", crit11},
      {"light-cone leakage bound", crit12},
      {"deterministic replay", crit13},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second(jobs);
    } catch (const std::exception& e) {
      v = {false, std::string(" exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("CRIT %2d %s: %s;%s [%.1f s]\n", id, v.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
