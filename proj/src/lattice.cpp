#include "drivenloc/lattice.hpp"

#include <cstdlib>
#include <string>

#include "drivenloc/errors.hpp"

namespace drivenloc {

Lattice::Lattice(int dim, int half_width, std::size_t max_sites)
    : Lattice(dim, 2 * half_width + 1, -half_width, max_sites) {
  if (half_width < 1) throw ConfigError("lattice: half-width L must be >= 1");
}

Lattice Lattice::box(int dim, int side, std::size_t max_sites) {
  if (side < 1) throw ConfigError("lattice: side must be >= 1");
  return Lattice(dim, side, -(side / 2), max_sites);
}

Lattice::Lattice(int dim, int side_len, int lo, std::size_t max_sites)
    : dim_(dim), side_(side_len), lo_(lo), size_(1) {
  if (dim < 1) throw ConfigError("lattice: dimension must be >= 1");
  const std::size_t side = static_cast<std::size_t>(side_len);
  for (int i = 0; i < dim; ++i) {
    if (size_ > max_sites / side)
      throw ResourceError("lattice: (2L+1)^d exceeds the site budget of " +
                          std::to_string(max_sites));
    size_ *= side;
  }

  incident_.resize(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    Site x = coords(i);
    for (int axis = 0; axis < dim_; ++axis) {
      if (x[axis] == highest()) continue;
      ++x[axis];
      const std::size_t j = index(x);
      --x[axis];
      incident_[i].push_back(bonds_.size());
      incident_[j].push_back(bonds_.size());
      bonds_.push_back({i, j, axis});
    }
  }
}

Site Lattice::coords(std::size_t index) const {
  Site x(dim_);
  const std::size_t s = static_cast<std::size_t>(side());
  for (int axis = dim_ - 1; axis >= 0; --axis) {
    x[axis] = static_cast<int>(index % s) + lo_;
    index /= s;
  }
  return x;
}

std::optional<std::size_t> Lattice::find(const Site& site) const {
  if (static_cast<int>(site.size()) != dim_) return std::nullopt;
  std::size_t idx = 0;
  for (int axis = 0; axis < dim_; ++axis) {
    if (site[axis] < lo_ || site[axis] > highest()) return std::nullopt;
    idx = idx * static_cast<std::size_t>(side_) + static_cast<std::size_t>(site[axis] - lo_);
  }
  return idx;
}

std::size_t Lattice::index(const Site& site) const {
  auto idx = find(site);
  if (!idx) throw DomainError("lattice: site outside the patch");
  return *idx;
}

int Lattice::sup_norm(std::size_t index) const {
  int m = 0;
  for (int c : coords(index)) m = std::max(m, std::abs(c));
  return m;
}

bool Lattice::on_outer_shell(std::size_t index) const {
  for (int c : coords(index))
    if (c == lo_ || c == highest()) return true;
  return false;
}

int sup_distance(const Site& a, const Site& b) {
  int m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

int l1_distance(const Site& a, const Site& b) {
  int s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

}  // namespace drivenloc
