#include "drivenloc/decay.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "drivenloc/errors.hpp"

namespace drivenloc {

double l1max_norm(const RMatrix& G) {
  return G.size() == 0 ? 0.0 : G.cwiseAbs().rowwise().sum().maxCoeff();
}

DecayFunction::DecayFunction(RMatrix G) : G_(std::move(G)) {
  if (G_.rows() != G_.cols()) throw DomainError("decay function: kernel must be square");
  if (G_.size() > 0 && G_.minCoeff() < 0.0) throw DomainError("decay function: kernel must be non-negative");
  norm_ = l1max_norm(G_);
  if (!(norm_ < 0.5))
    throw DomainError("decay function: ||G||_l1max = " + std::to_string(norm_) + " is not below 1/2");
  const Eigen::Index n = G_.rows();
  const RMatrix I = RMatrix::Identity(n, n);
  S_ = (I - G_).partialPivLu().solve(I) - I;
  // Round-off can leave tiny negative entries where the true sum is zero.
  S_ = S_.cwiseMax(0.0);
}

double DecayFunction::operator()(Eigen::Index x, Eigen::Index y) const {
  if (x == y) return 0.0;
  const double s = S_(x, y);
  return s > 0.0 ? -std::log(s) : std::numeric_limits<double>::infinity();
}

BoundarySum boundary_decay_sum(const DecayFunction& decay, const std::vector<Site>& coords,
                               Eigen::Index source, int L) {
  BoundarySum out;
  const Site& x = coords.at(static_cast<std::size_t>(source));
  for (Eigen::Index z = 0; z < decay.size(); ++z)
    if (sup_distance(x, coords[static_cast<std::size_t>(z)]) == L) out.sum += decay.path_sum(source, z);
  const double n = decay.norm();
  out.bound = std::pow(n, L) / (1.0 - n);
  out.holds = out.sum <= out.bound * (1.0 + 1e-12) + 1e-300;
  return out;
}

}  // namespace drivenloc
