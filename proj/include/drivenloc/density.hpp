#pragma once

#include <utility>
#include <vector>

namespace drivenloc {

/// Single-site disorder density: either uniform on [-M, M] or a
/// piecewise-linear table of breakpoints (x, rho(x)). Tables are normalized on
/// construction; the sup norms are taken from the normalized table.
class Density {
 public:
  enum class Kind { Uniform, Table };

  static Density uniform(double half_width);
  static Density table(std::vector<std::pair<double, double>> points);

  Kind kind() const { return kind_; }
  /// Support bound M: the support lies in [-M, M].
  double support_bound() const { return support_bound_; }
  double sup_norm() const { return sup_norm_; }
  double derivative_sup_norm() const { return derivative_sup_norm_; }
  const std::vector<std::pair<double, double>>& points() const { return points_; }

  double pdf(double x) const;
  double cdf(double x) const;
  /// Inverse CDF on [0, 1].
  double quantile(double u) const;

 private:
  Density() = default;
  void finalize();

  Kind kind_ = Kind::Uniform;
  std::vector<std::pair<double, double>> points_;
  std::vector<double> cumulative_;
  double support_bound_ = 0.0;
  double sup_norm_ = 0.0;
  double derivative_sup_norm_ = 0.0;
};

}  // namespace drivenloc
