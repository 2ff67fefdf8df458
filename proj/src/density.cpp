#include "drivenloc/density.hpp"

#include <algorithm>
#include <cmath>

#include "drivenloc/errors.hpp"

namespace drivenloc {

Density Density::uniform(double half_width) {
  if (!(half_width > 0.0)) throw ConfigError("density: uniform half-width must be positive");
  Density d;
  d.kind_ = Kind::Uniform;
  const double h = 0.5 / half_width;
  d.points_ = {{-half_width, h}, {half_width, h}};
  d.finalize();
  return d;
}

Density Density::table(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw ConfigError("density: table needs at least two breakpoints");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].first) || !std::isfinite(points[i].second))
      throw ConfigError("density: non-finite table entry");
    if (points[i].second < 0.0) throw ConfigError("density: negative density value");
    if (i > 0 && !(points[i].first > points[i - 1].first))
      throw ConfigError("density: breakpoints must be strictly increasing");
  }
  double mass = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    mass += 0.5 * (points[i].second + points[i - 1].second) * (points[i].first - points[i - 1].first);
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ConfigError("density: table is not normalizable");
  for (auto& p : points) p.second /= mass;

  Density d;
  d.kind_ = Kind::Table;
  d.points_ = std::move(points);
  d.finalize();
  return d;
}

void Density::finalize() {
  cumulative_.assign(points_.size(), 0.0);
  sup_norm_ = 0.0;
  derivative_sup_norm_ = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    sup_norm_ = std::max(sup_norm_, points_[i].second);
    if (i == 0) continue;
    const double dx = points_[i].first - points_[i - 1].first;
    cumulative_[i] = cumulative_[i - 1] + 0.5 * (points_[i].second + points_[i - 1].second) * dx;
    derivative_sup_norm_ =
        std::max(derivative_sup_norm_, std::abs(points_[i].second - points_[i - 1].second) / dx);
  }
  support_bound_ = std::max(std::abs(points_.front().first), std::abs(points_.back().first));
}

double Density::pdf(double x) const {
  if (x < points_.front().first || x > points_.back().first) return 0.0;
  auto it = std::upper_bound(points_.begin(), points_.end(), x,
                             [](double v, const auto& p) { return v < p.first; });
  if (it == points_.end()) return points_.back().second;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double s = (x - lo.first) / (hi.first - lo.first);
  return lo.second + s * (hi.second - lo.second);
}

double Density::cdf(double x) const {
  if (x <= points_.front().first) return 0.0;
  if (x >= points_.back().first) return 1.0;
  auto it = std::upper_bound(points_.begin(), points_.end(), x,
                             [](double v, const auto& p) { return v < p.first; });
  const std::size_t i = static_cast<std::size_t>(it - points_.begin()) - 1;
  const double dx = x - points_[i].first;
  return cumulative_[i] + 0.5 * (points_[i].second + pdf(x)) * dx;
}

double Density::quantile(double u) const {
  if (u <= 0.0) return points_.front().first;
  if (u >= 1.0) return points_.back().first;
  const double target = u * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
  if (i == 0) i = 1;
  if (i >= points_.size()) i = points_.size() - 1;
  const auto& lo = points_[i - 1];
  const auto& hi = points_[i];
  const double width = hi.first - lo.first;
  const double slope = (hi.second - lo.second) / width;
  const double r = target - cumulative_[i - 1];
  // Solve lo.second * s + slope/2 * s^2 = r for s in [0, width].
  double s;
  if (r <= 0.0) {
    s = 0.0;
  } else if (std::abs(slope) * width < 1e-14 * std::max(lo.second, 1e-300)) {
    s = lo.second > 0.0 ? r / lo.second : 0.0;
  } else {
    const double disc = std::max(0.0, lo.second * lo.second + 2.0 * slope * r);
    s = 2.0 * r / (lo.second + std::sqrt(disc));
  }
  return lo.first + std::clamp(s, 0.0, width);
}

}  // namespace drivenloc
