#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "drivenloc/density.hpp"
#include "drivenloc/driving.hpp"
#include "drivenloc/lattice.hpp"

namespace drivenloc {

struct DisorderRealization {
  std::vector<double> values;
  std::uint64_t seed = 0;
  Density density = Density::uniform(1.0);
};

/// i.i.d. inverse-CDF sampling; site i draws from derive_seed(seed, i).
DisorderRealization sample_potential(const Density& density, const Lattice& lattice,
                                     std::uint64_t seed);

/// Realization with prescribed values (fixtures, reloaded files).
DisorderRealization fixed_potential(std::vector<double> values, const Density& density);

struct ModelParams {
  ModelParams(Lattice lattice, DisorderRealization disorder, DrivingSpec driving, double g);

  Lattice lattice;
  DisorderRealization disorder;
  DrivingSpec driving;
  double g;

  double nu() const { return driving.nu(); }
  double period() const { return driving.period(); }
  double support_bound() const { return disorder.density.support_bound(); }
};

/// The model on the sub-patch center + [-L, L]^d, re-centred at the origin.
/// Potential values and bond signals are copied from the parent.
ModelParams restrict_model(const ModelParams& params, const Site& center, int half_width);

/// H(t) = V + g h(t) on the patch, as a real symmetric sparse matrix.
Eigen::SparseMatrix<double> assemble_hamiltonian(const ModelParams& params, double t);
Eigen::MatrixXd assemble_dense_hamiltonian(const ModelParams& params, double t);

/// Time-independent pieces of H(t), with g already folded into the hopping
/// matrices. Smooth drivings give H(t) = diag(V) + A0 + cos(nu t) A1 +
/// sin(nu t) A2; piecewise drivings give one hopping matrix per segment.
struct HamiltonianParts {
  Eigen::VectorXd potential;
  std::vector<Eigen::MatrixXd> hopping;
};

HamiltonianParts hamiltonian_parts(const ModelParams& params);

}  // namespace drivenloc
