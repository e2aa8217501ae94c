#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Core>

#include "magnitude/error.hpp"
#include "magnitude/point_cloud.hpp"

namespace magnitude {

/// Dense symmetric matrix of exponentiated negative distances,
/// Z_ij = exp(-scale * |P_i - P_j|). Both triangles are stored.
class KernelMatrix {
 public:
  KernelMatrix(Eigen::MatrixXd entries, double scale)
      : entries_(std::move(entries)), scale_(scale) {}

  std::size_t size() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  double scale() const noexcept { return scale_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& matrix() const noexcept { return entries_; }

 private:
  Eigen::MatrixXd entries_;
  double scale_;
};

/// Builds Z for `cloud` scaled by `scale`. Scaling the distances here is the
/// same as materializing the scaled cloud tX.
///
/// Throws ErrorCode::duplicate_points naming the first colliding pair.
inline KernelMatrix build_kernel(const PointCloud& cloud, double scale) {
  detail::require(scale > 0.0 && std::isfinite(scale), "scale must be positive and finite");
  const auto n = static_cast<Eigen::Index>(cloud.size());
  Eigen::MatrixXd z(n, n);

  // Rows are independent; a collision is recorded and reported after the loop.
  Eigen::Index bad_i = -1, bad_j = -1;
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic, 16)
#endif
  for (Eigen::Index j = 0; j < n; ++j) {
    z(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double d = cloud.distance(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (d == 0.0) {
#if defined(_OPENMP)
#pragma omp critical(magnitude_duplicate)
#endif
        if (bad_j < 0 || j < bad_j || (j == bad_j && i < bad_i)) {
          bad_i = i;
          bad_j = j;
        }
      }
      z(i, j) = std::exp(-scale * d);
    }
  }
  if (bad_j >= 0) {
    throw Error(ErrorCode::duplicate_points,
                "duplicate points at indices " + std::to_string(bad_j) + " and " +
                    std::to_string(bad_i));
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) z(j, i) = z(i, j);
  }
  return KernelMatrix(std::move(z), scale);
}

}  // namespace magnitude
