#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "magnitude/error.hpp"
#include "magnitude/shape_spec.hpp"

namespace magnitude {

/// Voronoi-cell metadata of the lattice a cloud was cut from. Uniform lattices
/// carry one covolume; polar and toroidal grids carry one volume per point.
struct LatticeCells {
  int lattice_dim = 0;
  std::variant<double, std::vector<double>> volume = 0.0;

  bool uniform() const { return std::holds_alternative<double>(volume); }

  double volume_at(std::size_t i) const {
    if (const auto* v = std::get_if<double>(&volume)) return *v;
    return std::get<std::vector<double>>(volume)[i];
  }
};

/// A finite set of points in R^dim, stored row-major (point i occupies
/// coords[i*dim, (i+1)*dim)).
class PointCloud {
 public:
  PointCloud(int dim, std::vector<double> coords,
             std::optional<LatticeCells> cells = std::nullopt,
             ShapeSpec provenance = ShapeSpec::custom())
      : dim_(dim),
        coords_(std::move(coords)),
        cells_(std::move(cells)),
        provenance_(provenance) {
    detail::require(dim_ >= 1 && dim_ <= 3, "point cloud dimension must be 1, 2 or 3");
    detail::require(!coords_.empty() && coords_.size() % static_cast<std::size_t>(dim_) == 0,
                    "point cloud needs at least one point and dim-aligned coordinates");
    for (double c : coords_) {
      detail::require(std::isfinite(c), "point coordinates must be finite");
    }
    if (cells_) {
      detail::require(cells_->lattice_dim >= 1 && cells_->lattice_dim <= 3,
                      "lattice_dim must be 1, 2 or 3");
      if (const auto* per_point = std::get_if<std::vector<double>>(&cells_->volume)) {
        detail::require(per_point->size() == size(), "one cell volume per point required");
        for (double v : *per_point) detail::require(v > 0.0, "cell volumes must be positive");
      } else {
        detail::require(std::get<double>(cells_->volume) > 0.0, "cell volume must be positive");
      }
    }
  }

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return coords_.size() / static_cast<std::size_t>(dim_); }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::span<const double> coords() const noexcept { return coords_; }

  const std::optional<LatticeCells>& cells() const noexcept { return cells_; }
  const ShapeSpec& provenance() const noexcept { return provenance_; }

  double distance(std::size_t i, std::size_t j) const {
    const double* a = coords_.data() + i * static_cast<std::size_t>(dim_);
    const double* b = coords_.data() + j * static_cast<std::size_t>(dim_);
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) {
      const double d = a[k] - b[k];
      s += d * d;
    }
    return std::sqrt(s);
  }

 private:
  int dim_;
  std::vector<double> coords_;
  std::optional<LatticeCells> cells_;
  ShapeSpec provenance_;
};

/// Largest nearest-neighbour distance over the cloud (the coarsest local
/// spacing). Zero for a single point. O(N^2).
inline double nearest_neighbor_spacing(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  if (n < 2) return 0.0;
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = cloud.distance(i, j);
      nearest[i] = std::min(nearest[i], d);
      nearest[j] = std::min(nearest[j], d);
    }
  }
  return *std::max_element(nearest.begin(), nearest.end());
}

/// Smallest pairwise distance. Infinity for a single point.
inline double min_pairwise_distance(const PointCloud& cloud) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t j = i + 1; j < cloud.size(); ++j) {
      best = std::min(best, cloud.distance(i, j));
    }
  }
  return best;
}

}  // namespace magnitude
