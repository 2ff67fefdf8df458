#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace drivenloc {

using Site = std::vector<int>;

/// Nearest-neighbour bond from `from` to `to = from + e_axis`.
struct Bond {
  std::size_t from;
  std::size_t to;
  int axis;
};

/// Finite patch of Z^d with open boundaries: [-L, L]^d by default, or a box
/// of arbitrary side s with coordinates in [-(s/2), s - 1 - s/2]. Sites are
/// numbered lexicographically with the last axis running fastest.
class Lattice {
 public:
  static constexpr std::size_t kDefaultMaxSites = std::size_t{1} << 20;

  Lattice(int dim, int half_width, std::size_t max_sites = kDefaultMaxSites);
  static Lattice box(int dim, int side, std::size_t max_sites = kDefaultMaxSites);

  int dim() const { return dim_; }
  /// side / 2; equals L for the symmetric patch.
  int half_width() const { return side_ / 2; }
  int side() const { return side_; }
  int lowest() const { return lo_; }
  int highest() const { return lo_ + side_ - 1; }
  std::size_t size() const { return size_; }
  /// Index of the origin.
  std::size_t center() const { return index(Site(static_cast<std::size_t>(dim_), 0)); }

  Site coords(std::size_t index) const;
  std::optional<std::size_t> find(const Site& site) const;
  std::size_t index(const Site& site) const;

  /// |x| = max_i |x_i| measured from the origin.
  int sup_norm(std::size_t index) const;
  /// Some coordinate sits on a face of the patch.
  bool on_outer_shell(std::size_t index) const;

  const std::vector<Bond>& bonds() const { return bonds_; }
  /// Bond ids touching a site.
  const std::vector<std::size_t>& incident_bonds(std::size_t site) const { return incident_[site]; }

  bool operator==(const Lattice& other) const {
    return dim_ == other.dim_ && side_ == other.side_;
  }

 private:
  Lattice(int dim, int side, int lo, std::size_t max_sites);

  int dim_;
  int side_;
  int lo_;
  std::size_t size_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<std::size_t>> incident_;
};

int sup_distance(const Site& a, const Site& b);
int l1_distance(const Site& a, const Site& b);

}  // namespace drivenloc
