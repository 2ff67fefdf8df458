#include "drivenloc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <set>

#include "drivenloc/adiabatic.hpp"
#include "drivenloc/errors.hpp"
#include "drivenloc/floquet.hpp"
#include "drivenloc/parallel.hpp"
#include "drivenloc/propagate.hpp"
#include "drivenloc/rng.hpp"

namespace drivenloc {

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"sample", "floquet", "evolve",  "wegner", "goodbox",
                                              "goodcolumn", "scan", "lz", "leakage"};
  return names;
}

namespace {

// Reads one JSON object, records the resolved value of every key it hands
// out and rejects keys nobody asked for.
class Section {
 public:
  Section(const Json& j, std::string path) : path_(std::move(path)) {
    if (j.is_null()) return;
    if (!j.is_object()) throw ConfigError(where("") + "must be an object");
    raw_ = j;
  }

  double number(const std::string& key, std::optional<double> def = std::nullopt) {
    const Json* v = get(key);
    double x;
    if (!v) {
      if (!def) throw ConfigError(where(key) + "required field is missing");
      x = *def;
    } else {
      if (!v->is_number()) throw ConfigError(where(key) + "must be a number");
      x = v->get<double>();
    }
    resolved_[key] = x;
    return x;
  }

  long long integer(const std::string& key, std::optional<long long> def = std::nullopt) {
    const Json* v = get(key);
    long long x;
    if (!v) {
      if (!def) throw ConfigError(where(key) + "required field is missing");
      x = *def;
    } else {
      if (!v->is_number_integer()) throw ConfigError(where(key) + "must be an integer");
      x = v->get<long long>();
    }
    resolved_[key] = x;
    return x;
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t def) {
    const Json* v = get(key);
    std::uint64_t x = def;
    if (v) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
        throw ConfigError(where(key) + "must be a non-negative integer");
      x = v->get<std::uint64_t>();
    }
    resolved_[key] = x;
    return x;
  }

  std::string text(const std::string& key, const std::string& def, const std::vector<std::string>& allowed) {
    const Json* v = get(key);
    std::string x = def;
    if (v) {
      if (!v->is_string()) throw ConfigError(where(key) + "must be a string");
      x = v->get<std::string>();
    }
    if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), x) == allowed.end())
      throw ConfigError(where(key) + "unsupported value '" + x + "'");
    resolved_[key] = x;
    return x;
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& def) {
    const Json* v = get(key);
    std::vector<double> x = def;
    if (v) {
      if (!v->is_array()) throw ConfigError(where(key) + "must be an array of numbers");
      x.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) throw ConfigError(where(key) + "must be an array of numbers");
        x.push_back(e.get<double>());
      }
    }
    resolved_[key] = x;
    return x;
  }

  std::optional<double> optional_number(const std::string& key) {
    const Json* v = get(key);
    if (!v || v->is_null()) {
      resolved_[key] = nullptr;
      return std::nullopt;
    }
    if (!v->is_number()) throw ConfigError(where(key) + "must be a number or null");
    resolved_[key] = v->get<double>();
    return v->get<double>();
  }

  std::optional<std::vector<std::vector<double>>> table(const std::string& key) {
    const Json* v = get(key);
    if (!v || v->is_null()) {
      resolved_[key] = nullptr;
      return std::nullopt;
    }
    std::vector<std::vector<double>> t;
    if (!v->is_array()) throw ConfigError(where(key) + "must be an array of [x, rho] pairs");
    for (const auto& e : *v) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ConfigError(where(key) + "must be an array of [x, rho] pairs");
      t.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    resolved_[key] = t;
    return t;
  }

  Section child(const std::string& key) {
    const Json* v = get(key);
    return Section(v ? *v : Json(), path_.empty() ? key : path_ + "." + key);
  }

  void adopt(const std::string& key, Section& child) {
    child.finish();
    resolved_[key] = child.resolved();
  }

  void finish() const {
    for (auto it = raw_.begin(); it != raw_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(where(it.key()) + "unknown key");
  }

  Json resolved() const { return resolved_.is_null() ? Json::object() : resolved_; }

 private:
  const Json* get(const std::string& key) {
    used_.insert(key);
    auto it = raw_.find(key);
    return it == raw_.end() ? nullptr : &*it;
  }
  std::string where(const std::string& key) const {
    const std::string p = key.empty() ? path_ : (path_.empty() ? key : path_ + "." + key);
    return (p.empty() ? std::string("config") : p) + ": ";
  }

  Json raw_ = Json::object();
  Json resolved_ = Json::object();
  std::string path_;
  std::set<std::string> used_;
};

struct ModelConfig {
  int dim = 1;
  int L = 8;
  int side = 0;
  double M = 1.0;
  std::optional<std::vector<std::vector<double>>> density;
  double g = 0.0;
  double nu = 1.0;
  std::string driving = "smooth";

  Lattice lattice() const { return side > 0 ? Lattice::box(dim, side) : Lattice(dim, L); }
  Density make_density() const {
    if (!density) return Density::uniform(M);
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : *density) pts.emplace_back(p[0], p[1]);
    return Density::table(std::move(pts));
  }
  DrivingKind kind() const { return driving == "square" ? DrivingKind::SquareWave : DrivingKind::Smooth; }
  ModelParams model(std::uint64_t seed) const {
    Lattice lat = lattice();
    DisorderRealization dis = sample_potential(make_density(), lat, seed);
    DrivingSpec drv = kind() == DrivingKind::SquareWave ? canonical_square_wave(lat, nu) : canonical_smooth(lat, nu);
    return ModelParams(std::move(lat), std::move(dis), std::move(drv), g);
  }
  EnsembleSpec ensemble(std::size_t n, std::uint64_t seed, unsigned jobs) const {
    EnsembleSpec e;
    e.realizations = n;
    e.base_seed = seed;
    e.dim = dim;
    e.side = side > 0 ? side : 2 * L + 1;
    e.density = make_density();
    e.driving = kind();
    e.nu = nu;
    e.g = g;
    e.jobs = jobs;
    return e;
  }
};

ModelConfig read_model(Section& s) {
  ModelConfig m;
  m.dim = static_cast<int>(s.integer("dim", 1));
  m.L = static_cast<int>(s.integer("L", 8));
  m.side = static_cast<int>(s.integer("side", 0));
  m.M = s.number("M", 1.0);
  m.density = s.table("density");
  m.g = s.number("g");
  m.nu = s.number("nu");
  m.driving = s.text("driving", "smooth", {"smooth", "square"});
  if (m.dim < 1) throw ConfigError("model.dim: must be >= 1");
  if (m.L < 1) throw ConfigError("model.L: must be >= 1");
  if (m.side < 0) throw ConfigError("model.side: must be >= 0");
  if (!(m.M > 0.0)) throw ConfigError("model.M: must be positive");
  if (!(m.g >= 0.0)) throw ConfigError("model.g: must be non-negative");
  if (!(m.nu > 0.0)) throw ConfigError("model.nu: must be positive");
  return m;
}

std::string fmt(double x) { return format_double(x); }
std::string fmt(std::uint64_t x) { return std::to_string(x); }
std::string fmti(long long x) { return std::to_string(x); }

// Each scenario reads its own parameter block; the shared pieces are the
// model, the seed and the realization count.
struct Common {
  ModelConfig model;
  std::uint64_t seed = 1;
  std::size_t realizations = 1;
};

Common read_common(Section& root, Section& model, const RunOptions& opt, std::size_t default_n) {
  Common c;
  c.model = read_model(model);
  c.seed = root.unsigned_integer("seed", 1);
  if (opt.seed) c.seed = *opt.seed;
  c.realizations = static_cast<std::size_t>(root.integer("realizations", static_cast<long long>(default_n)));
  if (c.realizations < 1) throw ConfigError("realizations: must be >= 1");
  return c;
}

std::size_t default_realizations(const std::string& scenario) {
  if (scenario == "wegner") return 2000;
  if (scenario == "goodbox" || scenario == "goodcolumn") return 100;
  if (scenario == "scan") return 4;
  if (scenario == "leakage") return 10;
  return 1;
}

void read_params(const std::string& scenario, Section& p, const ModelConfig& m) {
  if (scenario == "sample") return;
  if (scenario == "floquet") {
    p.integer("K", 16);
    p.number("accuracy", 1e-9);
    p.integer("steps_per_period", 128);
  } else if (scenario == "evolve") {
    p.integer("periods", 100);
    p.integer("sample_every", 1);
    p.number("q", 2.0);
  } else if (scenario == "wegner") {
    p.integer("K", 4);
    p.number("energy", m.nu / 2.0);
    p.numbers("eps_finite", {1e-4, 1e-3});
    p.numbers("eps_infinite", {1e-6, 1e-4});
  } else if (scenario == "goodbox") {
    p.number("mu", 0.5);
    p.number("lambda", m.nu / 2.0);
    p.integer("k0", 0);
    p.integer("K", std::max(1, static_cast<int>(std::floor(m.M / m.nu))));
    p.integer("N", 0);
  } else if (scenario == "goodcolumn") {
    p.number("mu", 0.5);
    p.number("lambda", m.nu / 2.0);
    p.integer("K", 6);
    p.number("c63", 0.0);
  } else if (scenario == "scan") {
    p.numbers("g", {0.02, 0.1, 0.5});
    p.numbers("nu", {0.5, 1.0});
    p.integer("periods", 50);
    p.number("p", 3.0);
    p.optional_number("xi");
  } else if (scenario == "lz") {
    p.number("rate", 1.0);
    p.integer("points", 20);
    p.number("min_adiabaticity", 0.01);
    p.number("max_adiabaticity", 2.0);
    p.number("half_window", 200.0);
    p.number("tolerance", 0.02);
  } else if (scenario == "leakage") {
    std::vector<double> radii;
    for (int r = 1; r <= std::min(m.L, 8); ++r) radii.push_back(r);
    p.numbers("radii", radii);
    p.numbers("time_fractions", {0.0, 0.25, 0.5, 0.75, 1.0});
  }
}

}  // namespace

Json resolve_config(const std::string& scenario, const Json& config, const RunOptions& options) {
  if (std::find(scenario_names().begin(), scenario_names().end(), scenario) == scenario_names().end())
    throw ConfigError("unknown scenario '" + scenario + "'");
  Section root(config, "");
  const long long version = root.integer("schema_version", kSchemaVersion);
  if (version != kSchemaVersion) throw ConfigError("schema_version: expected " + std::to_string(kSchemaVersion));
  const std::string sc = root.text("scenario", scenario, {});
  if (sc != scenario) throw ConfigError("scenario: config is for '" + sc + "', not '" + scenario + "'");
  Section model = root.child("model");
  Common c = read_common(root, model, options, default_realizations(scenario));
  Section params = root.child("params");
  read_params(scenario, params, c.model);
  root.adopt("model", model);
  root.adopt("params", params);
  root.finish();
  Json out = root.resolved();
  out["seed"] = c.seed;
  return out;
}

namespace {

ScenarioOutput run_sample(const Common& c, const Json&, unsigned) {
  ScenarioOutput out;
  const Lattice lat = c.model.lattice();
  std::vector<std::string> header{"realization", "seed", "site"};
  for (int a = 0; a < lat.dim(); ++a) header.push_back("x" + std::to_string(a));
  header.push_back("value");
  CsvTable t(header);
  for (std::size_t r = 0; r < c.realizations; ++r) {
    const std::uint64_t seed = derive_seed(c.seed, r);
    const DisorderRealization d = sample_potential(c.model.make_density(), lat, seed);
    for (std::size_t i = 0; i < lat.size(); ++i) {
      std::vector<std::string> row{fmti(static_cast<long long>(r)), fmt(seed), fmti(static_cast<long long>(i))};
      for (int x : lat.coords(i)) row.push_back(fmti(x));
      row.push_back(fmt(d.values[i]));
      t.add(row);
      if (std::abs(d.values[i]) > d.density.support_bound())
        out.failures.push_back("sample outside the density support");
    }
  }
  out.files["potential.csv"] = t.str();
  return out;
}

ScenarioOutput run_floquet(const Common& c, const Json& p, unsigned) {
  ScenarioOutput out;
  const std::uint64_t seed = derive_seed(c.seed, 0);
  const ModelParams m = c.model.model(seed);
  Propagator prop;
  prop.steps_per_period = p["steps_per_period"].get<int>();
  const Monodromy U = monodromy(m, prop, p["accuracy"].get<double>());
  const FloquetSolution sol = floquet_spectrum(U.U, m.nu());
  out.warnings.insert(out.warnings.end(), sol.warnings.begin(), sol.warnings.end());

  CsvTable q({"seed", "index", "quasienergy"});
  for (Eigen::Index i = 0; i < sol.quasienergies.size(); ++i)
    q.add({fmt(seed), fmti(i), fmt(sol.quasienergies[i])});
  out.files["quasienergies.csv"] = q.str();

  const QuasiEnergyOperator op = build_quasienergy_operator(m, 0, p["K"].get<int>());
  const BlockSpectrum bs = diagonalize_block(op);
  CsvTable b({"seed", "index", "eigenvalue", "center", "tail", "interior"});
  for (Eigen::Index i = 0; i < bs.eigenvalues.size(); ++i)
    b.add({fmt(seed), fmti(i), fmt(bs.eigenvalues[i]), fmt(bs.centers[i]), fmt(bs.tails[i]),
           bs.interior[i] ? "1" : "0"});
  out.files["block_spectrum.csv"] = b.str();

  const EffectiveHamiltonian heff = effective_hamiltonian(sol);
  out.warnings.insert(out.warnings.end(), heff.warnings.begin(), heff.warnings.end());
  const double rec = reconstruction_defect(heff.H, U.U, m.period());
  const DecayProfile prof = effective_decay_profile(heff.H, m.lattice);
  CsvTable d({"seed", "distance", "median", "max", "count"});
  for (const auto& bin : prof.bins)
    d.add({fmt(seed), fmti(bin.distance), fmt(bin.median), fmt(bin.max), fmti(static_cast<long long>(bin.count))});
  out.files["heff_decay.csv"] = d.str();

  Json s;
  s["seed"] = seed;
  s["unitarity_defect"] = json_number(U.unitarity_defect);
  s["error_estimate"] = json_number(U.error_estimate);
  s["steps_per_period"] = U.steps_per_period;
  s["reconstruction_defect"] = json_number(rec);
  s["decay_fit_rate"] = prof.fit_rate ? json_number(*prof.fit_rate) : Json(nullptr);
  out.files["summary.json"] = s.dump(2) + "\n";
  if (rec > 1e-8) out.failures.push_back("H_eff reconstruction defect above 1e-8");
  return out;
}

ScenarioOutput run_evolve(const Common& c, const Json& p, unsigned jobs) {
  ScenarioOutput out;
  const int periods = p["periods"].get<int>();
  const int every = p["sample_every"].get<int>();
  const double q = p["q"].get<double>();
  const auto traces = parallel_map<MomentTrace>(c.realizations, jobs, [&](std::size_t r) {
    const ModelParams m = c.model.model(derive_seed(c.seed, r));
    const Monodromy U = monodromy(m);
    return moment_trace_from_monodromy(U.U, m.lattice, m.period(), site_state(m.lattice, m.lattice.center()), q,
                                       periods, every);
  });
  CsvTable t({"realization", "seed", "t", "moment", "running_max"});
  for (std::size_t r = 0; r < traces.size(); ++r) {
    const auto& tr = traces[r];
    for (std::size_t i = 0; i < tr.times.size(); ++i)
      t.add({fmti(static_cast<long long>(r)), fmt(derive_seed(c.seed, r)), fmt(tr.times[i]), fmt(tr.values[i]),
             fmt(tr.running_max[i])});
    if (tr.finite_size_warning)
      out.warnings.push_back("realization " + std::to_string(r) + ": boundary mass " + fmt(tr.max_boundary_mass));
  }
  out.files["moments.csv"] = t.str();
  return out;
}

CsvTable comparison_table() {
  return CsvTable({"label", "parameter", "base_seed", "successes", "trials", "frequency", "ci_lo", "ci_hi", "bound",
                   "direction", "verdict"});
}

void add_comparison(CsvTable& t, const BoundComparison& b, std::uint64_t seed) {
  t.add({b.label, fmt(b.parameter), fmt(seed), fmti(static_cast<long long>(b.successes)),
         fmti(static_cast<long long>(b.trials)), fmt(b.frequency), fmt(b.ci_lo), fmt(b.ci_hi), fmt(b.bound),
         to_string(b.direction), b.violated ? "violated" : "consistent"});
}

ScenarioOutput run_wegner(const Common& c, const Json& p, unsigned jobs) {
  ScenarioOutput out;
  EnsembleSpec e = c.model.ensemble(c.realizations, c.seed, jobs);
  e.K = p["K"].get<int>();
  e.energy = p["energy"].get<double>();
  std::vector<BoundComparison> rows = estimate_window_probability(e, p["eps_finite"].get<std::vector<double>>(), false);
  for (auto& b : estimate_window_probability(e, p["eps_infinite"].get<std::vector<double>>(), true)) rows.push_back(b);
  CsvTable t = comparison_table();
  Json notes = Json::array();
  for (const auto& b : rows) {
    add_comparison(t, b, c.seed);
    if (b.violated) out.failures.push_back(b.label + " violated at parameter " + fmt(b.parameter));
    if (!b.note.empty()) notes.push_back(b.label + ": " + b.note);
  }
  out.files["comparisons.csv"] = t.str();
  if (!notes.empty()) out.files["notes.json"] = notes.dump(2) + "\n";
  return out;
}

ScenarioOutput run_goodbox(const Common& c, const Json& p, unsigned jobs) {
  ScenarioOutput out;
  const double mu = p["mu"].get<double>(), lambda = p["lambda"].get<double>();
  const int k0 = p["k0"].get<int>(), K = p["K"].get<int>(), N = p["N"].get<int>();
  const auto reports = parallel_map<BoxReport>(c.realizations, jobs, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(c.seed, r);
    const ModelParams m = c.model.model(seed);
    BoxReport rep = is_good_box(build_quasienergy_operator(m, k0, K), lambda, mu,
                                N > 0 ? std::optional<int>(N) : std::nullopt);
    rep.seed = seed;
    return rep;
  });
  Json arr = Json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  out.files["box_reports.json"] = arr.dump(2) + "\n";
  return out;
}

ScenarioOutput run_goodcolumn(const Common& c, const Json& p, unsigned jobs) {
  ScenarioOutput out;
  const double mu = p["mu"].get<double>(), lambda = p["lambda"].get<double>(), c63 = p["c63"].get<double>();
  const int K = p["K"].get<int>();
  const auto reports = parallel_map<BoxReport>(c.realizations, jobs, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(c.seed, r);
    const ModelParams m = c.model.model(seed);
    BoxReport rep = is_good_column(build_quasienergy_operator(m, 0, K), lambda, mu, m.support_bound(), c63);
    rep.seed = seed;
    return rep;
  });
  Json arr = Json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  out.files["column_reports.json"] = arr.dump(2) + "\n";
  return out;
}

ScenarioOutput run_scan(const Common& c, const Json& p, unsigned jobs) {
  ScenarioOutput out;
  PhaseScanSpec s;
  s.g_values = p["g"].get<std::vector<double>>();
  s.nu_values = p["nu"].get<std::vector<double>>();
  s.dim = c.model.dim;
  s.half_width = c.model.L;
  s.M = c.model.M;
  s.driving = c.model.kind();
  s.realizations = c.realizations;
  s.base_seed = c.seed;
  s.periods = p["periods"].get<int>();
  s.p = p["p"].get<double>();
  if (!p["xi"].is_null()) s.xi = p["xi"].get<double>();
  s.jobs = jobs;
  const auto points = phase_scan(s);
  CsvTable t({"g", "nu", "ipr_mean", "ipr_sd", "decay_rate", "moment_slope", "n", "failures", "base_seed"});
  CsvTable th({"g", "nu", "xi", "msa_threshold", "lz_threshold"});
  for (const auto& pt : points) {
    t.add({fmt(pt.g), fmt(pt.nu), fmt(pt.ipr_mean), fmt(pt.ipr_sd), fmt(pt.decay_rate), fmt(pt.moment_slope),
           fmti(static_cast<long long>(pt.n)), fmti(static_cast<long long>(pt.failures)), fmt(c.seed)});
    th.add({fmt(pt.g), fmt(pt.nu), fmt(pt.xi), fmt(pt.msa_threshold), fmt(pt.lz_threshold)});
    for (const auto& e : pt.errors) out.warnings.push_back("g=" + fmt(pt.g) + " nu=" + fmt(pt.nu) + ": " + e);
  }
  out.files["phase.csv"] = t.str();
  out.files["thresholds.csv"] = th.str();
  return out;
}

ScenarioOutput run_lz(const Common&, const Json& p, unsigned) {
  ScenarioOutput out;
  const double v = p["rate"].get<double>();
  const int n = p["points"].get<int>();
  const double lo = p["min_adiabaticity"].get<double>(), hi = p["max_adiabaticity"].get<double>();
  const double tol = p["tolerance"].get<double>();
  if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw ConfigError("params: need points >= 2 and 0 < min < max");
  CsvTable t({"adiabaticity", "coupling", "rate", "numeric", "closed_form", "relative_error"});
  for (int i = 0; i < n; ++i) {
    const double delta = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    TwoLevelSweep sw;
    sw.rate = v;
    sw.coupling = std::sqrt(delta * v);
    sw.half_window = p["half_window"].get<double>();
    const double num = lz_transition_probability(sw);
    const double exact = lz_closed_form(sw.coupling, v);
    const double rel = std::abs(num - exact) / exact;
    t.add({fmt(delta), fmt(sw.coupling), fmt(v), fmt(num), fmt(exact), fmt(rel)});
    if (rel > tol) out.failures.push_back("LZ relative error " + fmt(rel) + " at g'^2/v = " + fmt(delta));
  }
  out.files["lz.csv"] = t.str();
  return out;
}

ScenarioOutput run_leakage(const Common& c, const Json& p, unsigned jobs) {
  ScenarioOutput out;
  std::vector<int> radii;
  for (double r : p["radii"].get<std::vector<double>>()) radii.push_back(static_cast<int>(r));
  const auto fractions = p["time_fractions"].get<std::vector<double>>();
  const auto rows = parallel_map<std::vector<LeakageRow>>(c.realizations, jobs, [&](std::size_t r) {
    const ModelParams m = c.model.model(derive_seed(c.seed, r));
    std::vector<double> times;
    for (double f : fractions) times.push_back(f * m.period());
    return leakage_bound_check(m, m.lattice.center(), radii, times);
  });
  CsvTable t({"realization", "seed", "radius", "t", "inside_mass", "bound", "holds"});
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& row : rows[r]) {
      t.add({fmti(static_cast<long long>(r)), fmt(derive_seed(c.seed, r)), fmti(row.radius), fmt(row.t),
             fmt(row.inside_mass), fmt(row.bound), row.holds ? "1" : "0"});
      if (!row.holds) out.failures.push_back("light-cone bound violated at R=" + std::to_string(row.radius));
    }
  out.files["leakage.csv"] = t.str();
  return out;
}

}  // namespace

ScenarioOutput execute_scenario(const std::string& scenario, const Json& resolved, unsigned jobs) {
  Section root(resolved, "");
  Section model = root.child("model");
  Common c;
  c.model = read_model(model);
  c.seed = resolved.at("seed").get<std::uint64_t>();
  c.realizations = resolved.at("realizations").get<std::size_t>();
  const Json& p = resolved.at("params");
  if (scenario == "sample") return run_sample(c, p, jobs);
  if (scenario == "floquet") return run_floquet(c, p, jobs);
  if (scenario == "evolve") return run_evolve(c, p, jobs);
  if (scenario == "wegner") return run_wegner(c, p, jobs);
  if (scenario == "goodbox") return run_goodbox(c, p, jobs);
  if (scenario == "goodcolumn") return run_goodcolumn(c, p, jobs);
  if (scenario == "scan") return run_scan(c, p, jobs);
  if (scenario == "lz") return run_lz(c, p, jobs);
  if (scenario == "leakage") return run_leakage(c, p, jobs);
  throw ConfigError("unknown scenario '" + scenario + "'");
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunManifest run_experiment(const std::string& scenario, const Json& config, const std::filesystem::path& out_dir,
                           const RunOptions& options) {
  const Json resolved = resolve_config(scenario, config, options);
  const std::string started = utc_timestamp();
  const ScenarioOutput res = execute_scenario(scenario, resolved, options.jobs);

  RunManifest man;
  Json& j = man.json;
  j["schema_version"] = kSchemaVersion;
  j["code_version"] = kCodeVersion;
  j["scenario"] = scenario;
  j["config"] = resolved;
  j["config_hash"] = sha256_hex(resolved.dump());
  j["base_seed"] = resolved.at("seed");
  j["jobs"] = options.jobs;
  j["started"] = started;
  Json outputs = Json::array();
  for (const auto& [name, content] : res.files) {
    write_file(out_dir / name, content);
    outputs.push_back({{"file", name}, {"sha256", sha256_hex(content)}});
  }
  j["outputs"] = outputs;
  j["warnings"] = res.warnings;
  j["failures"] = res.failures;
  j["finished"] = utc_timestamp();
  write_file(out_dir / "manifest.json", j.dump(2) + "\n");
  man.failures = res.failures;
  man.failed = !res.failures.empty();
  return man;
}

ReplayReport replay_manifest(const std::filesystem::path& manifest, const std::filesystem::path& out_dir,
                             unsigned jobs) {
  Json m;
  try {
    m = Json::parse(read_file(manifest));
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  if (!m.contains("scenario") || !m.contains("config") || !m.contains("outputs"))
    throw ConfigError("manifest: missing scenario, config or outputs");
  const std::string scenario = m["scenario"].get<std::string>();
  const Json resolved = resolve_config(scenario, m["config"]);
  const ScenarioOutput res = execute_scenario(scenario, resolved, jobs);
  ReplayReport rep;
  for (const auto& o : m["outputs"]) {
    const std::string name = o.at("file").get<std::string>();
    auto it = res.files.find(name);
    const bool same = it != res.files.end() && sha256_hex(it->second) == o.at("sha256").get<std::string>();
    (same ? rep.identical : rep.differing).push_back(name);
    if (it != res.files.end()) write_file(out_dir / name, it->second);
  }
  for (const auto& [name, content] : res.files) {
    bool listed = false;
    for (const auto& o : m["outputs"]) listed |= o.at("file").get<std::string>() == name;
    if (!listed) rep.differing.push_back(name);
  }
  return rep;
}

}  // namespace drivenloc
