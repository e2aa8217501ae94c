#pragma once

#include <vector>

#include "magnitude/point_cloud.hpp"

namespace test_support {

inline std::vector<std::vector<double>> points_of(const magnitude::PointCloud& cloud) {
  std::vector<std::vector<double>> out;
  out.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    out.emplace_back(p.begin(), p.end());
  }
  return out;
}

inline magnitude::PointCloud cloud_of(const std::vector<std::vector<double>>& pts) {
  std::vector<double> coords;
  for (const auto& p : pts) coords.insert(coords.end(), p.begin(), p.end());
  return magnitude::PointCloud(static_cast<int>(pts.front().size()), std::move(coords));
}

}  // namespace test_support
