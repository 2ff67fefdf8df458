#pragma once

#include <vector>

#include "drivenloc/lattice.hpp"
#include "drivenloc/linalg.hpp"

namespace drivenloc {

/// sup_x sum_y |G(x, y)|.
double l1max_norm(const RMatrix& G);

/// d_G(x, y) = -ln sum over paths x -> y of prod G, with d_G(x, x) = 0. The
/// path sum is ((I - G)^{-1} - I)(x, y), obtained from one LU solve.
class DecayFunction {
 public:
  /// G must be entrywise non-negative with ||G||_{l1max} < 1/2.
  explicit DecayFunction(RMatrix G);

  Eigen::Index size() const { return G_.rows(); }
  const RMatrix& kernel() const { return G_; }
  double norm() const { return norm_; }
  double path_sum(Eigen::Index x, Eigen::Index y) const { return S_(x, y); }
  /// +inf when no path connects x to y.
  double operator()(Eigen::Index x, Eigen::Index y) const;

 private:
  RMatrix G_;
  RMatrix S_;
  double norm_;
};

struct BoundarySum {
  double sum = 0.0;
  double bound = 0.0;
  bool holds = true;
};

/// sum of exp(-d_G(source, z)) over vertices with sup-distance exactly L from
/// the source, against ||G||^L / (1 - ||G||). Valid when G only links
/// vertices at sup-distance <= 1.
BoundarySum boundary_decay_sum(const DecayFunction& decay, const std::vector<Site>& coords,
                               Eigen::Index source, int L);

}  // namespace drivenloc
