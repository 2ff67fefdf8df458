#include "drivenloc/model.hpp"

#include <cmath>

#include "drivenloc/errors.hpp"
#include "drivenloc/rng.hpp"

namespace drivenloc {

DisorderRealization sample_potential(const Density& density, const Lattice& lattice,
                                     std::uint64_t seed) {
  DisorderRealization r;
  r.seed = seed;
  r.density = density;
  r.values.resize(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i)
    r.values[i] = density.quantile(unit_interval(derive_seed(seed, i)));
  return r;
}

DisorderRealization fixed_potential(std::vector<double> values, const Density& density) {
  DisorderRealization r;
  r.values = std::move(values);
  r.density = density;
  return r;
}

ModelParams::ModelParams(Lattice lattice_, DisorderRealization disorder_, DrivingSpec driving_, double g_)
    : lattice(std::move(lattice_)), disorder(std::move(disorder_)), driving(std::move(driving_)), g(g_) {
  if (!(g >= 0.0) || !std::isfinite(g)) throw ConfigError("model: g must be finite and non-negative");
  if (disorder.values.size() != lattice.size())
    throw ConfigError("model: disorder size does not match the lattice");
  if (driving.bond_count() != lattice.bonds().size())
    throw ConfigError("model: driving bond count does not match the lattice");
}

ModelParams restrict_model(const ModelParams& params, const Site& center, int half_width) {
  const Lattice& parent = params.lattice;
  Lattice sub(parent.dim(), half_width);
  std::vector<std::size_t> to_parent(sub.size());
  std::vector<double> values(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) {
    Site x = sub.coords(i);
    for (std::size_t a = 0; a < x.size(); ++a) x[a] += center.at(a);
    auto j = parent.find(x);
    if (!j) throw DomainError("restrict_model: sub-patch leaves the parent patch");
    to_parent[i] = *j;
    values[i] = params.disorder.values[*j];
  }
  std::vector<std::size_t> bond_ids;
  bond_ids.reserve(sub.bonds().size());
  for (const Bond& b : sub.bonds()) {
    const std::size_t from = to_parent[b.from], to = to_parent[b.to];
    for (std::size_t id : parent.incident_bonds(from)) {
      if (parent.bonds()[id].from == from && parent.bonds()[id].to == to) {
        bond_ids.push_back(id);
        break;
      }
    }
  }
  DisorderRealization dis = params.disorder;
  dis.values = std::move(values);
  return ModelParams(std::move(sub), std::move(dis), params.driving.select_bonds(bond_ids), params.g);
}

Eigen::SparseMatrix<double> assemble_hamiltonian(const ModelParams& params, double t) {
  const auto& lat = params.lattice;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(lat.size() + 2 * lat.bonds().size());
  for (std::size_t i = 0; i < lat.size(); ++i)
    trips.emplace_back(static_cast<int>(i), static_cast<int>(i), params.disorder.values[i]);
  if (params.g != 0.0) {
    for (std::size_t b = 0; b < lat.bonds().size(); ++b) {
      const double h = params.g * params.driving.signal(b, t);
      if (h == 0.0) continue;
      const auto& bond = lat.bonds()[b];
      trips.emplace_back(static_cast<int>(bond.from), static_cast<int>(bond.to), h);
      trips.emplace_back(static_cast<int>(bond.to), static_cast<int>(bond.from), h);
    }
  }
  const int n = static_cast<int>(lat.size());
  Eigen::SparseMatrix<double> H(n, n);
  H.setFromTriplets(trips.begin(), trips.end());
  return H;
}

Eigen::MatrixXd assemble_dense_hamiltonian(const ModelParams& params, double t) {
  return Eigen::MatrixXd(assemble_hamiltonian(params, t));
}

HamiltonianParts hamiltonian_parts(const ModelParams& params) {
  const auto& lat = params.lattice;
  const auto& drv = params.driving;
  const Eigen::Index n = static_cast<Eigen::Index>(lat.size());
  HamiltonianParts parts;
  parts.potential = Eigen::Map<const Eigen::VectorXd>(params.disorder.values.data(), n);

  const std::size_t count = drv.piecewise_constant() ? drv.segment_count() : 3;
  parts.hopping.assign(count, Eigen::MatrixXd::Zero(n, n));
  for (std::size_t b = 0; b < lat.bonds().size(); ++b) {
    const auto& bond = lat.bonds()[b];
    for (std::size_t s = 0; s < count; ++s) {
      double v;
      if (drv.piecewise_constant()) {
        v = drv.segment_value(b, s);
      } else {
        const auto& c = drv.smooth_coefficients()[b];
        v = s == 0 ? c.a : (s == 1 ? c.b : c.b_prime);
      }
      v *= params.g;
      parts.hopping[s](bond.from, bond.to) = v;
      parts.hopping[s](bond.to, bond.from) = v;
    }
  }
  return parts;
}

}  // namespace drivenloc
