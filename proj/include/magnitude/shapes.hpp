#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "magnitude/error.hpp"
#include "magnitude/point_cloud.hpp"
#include "magnitude/shape_spec.hpp"
#include "magnitude/weighting.hpp"

namespace magnitude {

/// Upper bound on generated cloud sizes. Generation itself is cheap; this only
/// stops a typo in a recursion level from exhausting memory.
inline constexpr std::size_t max_generated_points = std::size_t{1} << 22;

namespace detail {

/// A generated cloud together with an orbit label per point (same order).
struct LabeledCloud {
  PointCloud cloud;
  std::vector<std::int64_t> labels;
};

inline void require_cap(std::size_t n, const std::string& what) {
  require(n <= max_generated_points,
          what + " would produce " + std::to_string(n) + " points, above the cap of " +
              std::to_string(max_generated_points));
}

inline std::int64_t fold(std::int64_t i, std::int64_t m) { return std::min(i, m - 1 - i); }

inline LabeledCloud point_cloud_single() {
  return {PointCloud(1, {0.0}, std::nullopt, ShapeSpec::point()), {0}};
}

inline LabeledCloud segment(int m) {
  validate(ShapeSpec::segment(m));
  const double h = 1.0 / (m - 1);
  std::vector<double> coords(static_cast<std::size_t>(m));
  std::vector<std::int64_t> labels(coords.size());
  for (int i = 0; i < m; ++i) {
    coords[static_cast<std::size_t>(i)] = (i == m - 1) ? 1.0 : i * h;
    labels[static_cast<std::size_t>(i)] = fold(i, m);
  }
  return {PointCloud(1, std::move(coords), LatticeCells{1, h}, ShapeSpec::segment(m)),
          std::move(labels)};
}

inline LabeledCloud circle(int m) {
  validate(ShapeSpec::circle(m));
  const double step = 2.0 * std::numbers::pi / m;
  std::vector<double> coords;
  coords.reserve(2 * static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    coords.push_back(std::cos(j * step));
    coords.push_back(std::sin(j * step));
  }
  return {PointCloud(2, std::move(coords), LatticeCells{1, step}, ShapeSpec::circle(m)),
          std::vector<std::int64_t>(static_cast<std::size_t>(m), 0)};
}

inline LabeledCloud bent_line(int m, double angle) {
  const auto spec = ShapeSpec::bent_line(m, angle);
  validate(spec);
  const double h = 1.0 / (m - 1);
  // shared endpoint at the origin; arm one runs along -x, arm two at `angle` to it
  const double ux = -1.0, uy = 0.0;
  const double vx = -std::cos(angle), vy = std::sin(angle);
  std::vector<double> coords;
  std::vector<std::int64_t> labels;
  for (int k = m - 1; k >= 1; --k) {
    coords.insert(coords.end(), {k * h * ux, k * h * uy});
    labels.push_back(k);
  }
  coords.insert(coords.end(), {0.0, 0.0});
  labels.push_back(0);
  for (int k = 1; k < m; ++k) {
    coords.insert(coords.end(), {k * h * vx, k * h * vy});
    labels.push_back(k);
  }
  return {PointCloud(2, std::move(coords), LatticeCells{1, h}, spec), std::move(labels)};
}

inline LabeledCloud square_grid(int m) {
  validate(ShapeSpec::square(m));
  const double h = 1.0 / (m - 1);
  const auto n = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
  require_cap(n, "square grid");
  std::vector<double> coords;
  coords.reserve(2 * n);
  std::vector<std::int64_t> labels;
  labels.reserve(n);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      coords.push_back(c * h);
      coords.push_back(r * h);
      auto a = fold(c, m), b = fold(r, m);
      if (a > b) std::swap(a, b);
      labels.push_back(a * m + b);
    }
  }
  return {PointCloud(2, std::move(coords), LatticeCells{2, h * h}, ShapeSpec::square(m)),
          std::move(labels)};
}

inline LabeledCloud cube_grid(int m) {
  validate(ShapeSpec::cube(m));
  const double h = 1.0 / (m - 1);
  const auto n = static_cast<std::size_t>(m) * static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
  require_cap(n, "cube grid");
  std::vector<double> coords;
  coords.reserve(3 * n);
  std::vector<std::int64_t> labels;
  labels.reserve(n);
  for (int z = 0; z < m; ++z) {
    for (int y = 0; y < m; ++y) {
      for (int x = 0; x < m; ++x) {
        coords.insert(coords.end(), {x * h, y * h, z * h});
        std::int64_t f[3] = {fold(x, m), fold(y, m), fold(z, m)};
        std::sort(f, f + 3);
        labels.push_back((f[0] * m + f[1]) * m + f[2]);
      }
    }
  }
  return {PointCloud(3, std::move(coords), LatticeCells{3, h * h * h}, ShapeSpec::cube(m)),
          std::move(labels)};
}

inline std::int64_t isqrt(std::int64_t v) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

/// Number of integer points (i, j) with i^2 + j^2 <= s.
inline std::int64_t lattice_points_in_disc(std::int64_t s) {
  const std::int64_t jmax = isqrt(s);
  std::int64_t count = 0;
  for (std::int64_t j = -jmax; j <= jmax; ++j) count += 2 * isqrt(s - j * j) + 1;
  return count;
}

inline LabeledCloud disc_grid(int target_n) {
  const auto spec = ShapeSpec::disc(target_n);
  validate(spec);
  require_cap(static_cast<std::size_t>(target_n), "disc grid");
  // The grid spacing is h = 1/sqrt(s) for the smallest integer s whose disc
  // holds at least target_n lattice points; membership is then exact integer
  // arithmetic, i^2 + j^2 <= s.
  std::int64_t lo = 1, hi = 1;
  while (lattice_points_in_disc(hi) < target_n) hi *= 2;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (lattice_points_in_disc(mid) >= target_n) hi = mid; else lo = mid + 1;
  }
  const std::int64_t s = lo;
  const double h = 1.0 / std::sqrt(static_cast<double>(s));
  const std::int64_t jmax = isqrt(s);
  std::vector<double> coords;
  std::vector<std::int64_t> labels;
  for (std::int64_t j = -jmax; j <= jmax; ++j) {
    const std::int64_t imax = isqrt(s - j * j);
    for (std::int64_t i = -imax; i <= imax; ++i) {
      coords.push_back(static_cast<double>(i) * h);
      coords.push_back(static_cast<double>(j) * h);
      auto a = std::abs(i), b = std::abs(j);
      if (a > b) std::swap(a, b);
      labels.push_back(a * (jmax + 1) + b);
    }
  }
  return {PointCloud(2, std::move(coords), LatticeCells{2, h * h}, spec), std::move(labels)};
}

inline LabeledCloud annulus_polar(int n_r, int n_theta, double r_in, double r_out) {
  const auto spec = ShapeSpec::annulus(n_r, n_theta, r_in, r_out);
  validate(spec);
  const auto n = static_cast<std::size_t>(n_r) * static_cast<std::size_t>(n_theta);
  require_cap(n, "annulus grid");
  const double dr = (r_out - r_in) / (n_r - 1);
  const double dtheta = 2.0 * std::numbers::pi / n_theta;
  std::vector<double> coords;
  coords.reserve(2 * n);
  std::vector<double> volumes;
  volumes.reserve(n);
  std::vector<std::int64_t> labels;
  labels.reserve(n);
  for (int i = 0; i < n_r; ++i) {
    const double r = (i == n_r - 1) ? r_out : r_in + i * dr;
    // the two boundary rings own half a radial step
    const double radial = (i == 0 || i == n_r - 1) ? 0.5 * dr : dr;
    for (int j = 0; j < n_theta; ++j) {
      coords.push_back(r * std::cos(j * dtheta));
      coords.push_back(r * std::sin(j * dtheta));
      volumes.push_back(r * radial * dtheta);
      labels.push_back(i);
    }
  }
  return {PointCloud(2, std::move(coords), LatticeCells{2, std::move(volumes)}, spec),
          std::move(labels)};
}

inline LabeledCloud torus_grid(int m, double major, double minor) {
  const auto spec = ShapeSpec::torus(m, major, minor);
  validate(spec);
  const auto n = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
  require_cap(n, "torus grid");
  const double step = 2.0 * std::numbers::pi / m;
  std::vector<double> coords;
  coords.reserve(3 * n);
  std::vector<double> areas;
  areas.reserve(n);
  std::vector<std::int64_t> labels;
  labels.reserve(n);
  for (int k = 0; k < m; ++k) {
    const double phi = k * step;
    const double ring = major + minor * std::cos(phi);
    for (int j = 0; j < m; ++j) {
      const double theta = j * step;
      coords.insert(coords.end(),
                    {ring * std::cos(theta), ring * std::sin(theta), minor * std::sin(phi)});
      areas.push_back(step * step * minor * ring);
      labels.push_back(std::min(k, (m - k) % m));
    }
  }
  return {PointCloud(3, std::move(coords), LatticeCells{2, std::move(areas)}, spec),
          std::move(labels)};
}

inline std::size_t sierpinski_count(int level) {
  // (3^(k+1) + 3) / 2
  std::size_t p = 3;
  for (int i = 0; i < level; ++i) {
    if (p > max_generated_points * 2) return max_generated_points + 1;
    p *= 3;
  }
  return (p + 3) / 2;
}

inline LabeledCloud sierpinski(int level) {
  const auto spec = ShapeSpec::sierpinski(level);
  validate(spec);
  require_cap(sierpinski_count(level), "sierpinski level " + std::to_string(level));
  // Vertices in integer lattice coordinates (a, b) -> a*e1 + b*e2 with
  // e1 = (1, 0) / 2^k and e2 = (1/2, sqrt(3)/2) / 2^k.
  const std::int64_t side = std::int64_t{1} << level;
  std::set<std::pair<std::int64_t, std::int64_t>> vertices;  // (b, a) for row-major order
  struct Tri { std::int64_t a, b, size; };
  std::vector<Tri> stack{{0, 0, side}};
  while (!stack.empty()) {
    const Tri t = stack.back();
    stack.pop_back();
    if (t.size == 1) {
      vertices.insert({t.b, t.a});
      vertices.insert({t.b, t.a + 1});
      vertices.insert({t.b + 1, t.a});
      continue;
    }
    const std::int64_t half = t.size / 2;
    stack.push_back({t.a, t.b, half});
    stack.push_back({t.a + half, t.b, half});
    stack.push_back({t.a, t.b + half, half});
  }

  const double unit = 1.0 / static_cast<double>(side);
  const double rise = std::sqrt(3.0) / 2.0;
  std::vector<double> coords;
  coords.reserve(2 * vertices.size());
  std::vector<std::int64_t> labels;
  labels.reserve(vertices.size());
  for (const auto& [b, a] : vertices) {
    coords.push_back((static_cast<double>(a) + 0.5 * static_cast<double>(b)) * unit);
    coords.push_back(static_cast<double>(b) * rise * unit);
    std::int64_t bary[3] = {a, b, side - a - b};
    std::sort(bary, bary + 3);
    labels.push_back(bary[0] * (side + 1) * (side + 1) + bary[1] * (side + 1) + bary[2]);
  }
  return {PointCloud(2, std::move(coords), std::nullopt, spec), std::move(labels)};
}

inline LabeledCloud cantor(int level) {
  const auto spec = ShapeSpec::cantor(level);
  validate(spec);
  require(level <= 38, "cantor level " + std::to_string(level) + " exceeds integer range");
  require_cap(std::size_t{2} << level, "cantor level " + std::to_string(level));
  std::int64_t denominator = 1;
  for (int i = 0; i < level; ++i) denominator *= 3;
  // interval endpoints in units of 3^-level
  std::vector<std::pair<std::int64_t, std::int64_t>> intervals{{0, denominator}};
  for (int i = 0; i < level; ++i) {
    std::vector<std::pair<std::int64_t, std::int64_t>> next;
    next.reserve(2 * intervals.size());
    for (const auto& [l, r] : intervals) {
      const std::int64_t third = (r - l) / 3;
      next.emplace_back(l, l + third);
      next.emplace_back(r - third, r);
    }
    intervals = std::move(next);
  }
  std::vector<double> coords;
  std::vector<std::int64_t> labels;
  for (const auto& [l, r] : intervals) {
    for (std::int64_t e : {l, r}) {
      coords.push_back(static_cast<double>(e) / static_cast<double>(denominator));
      labels.push_back(std::min(e, denominator - e));
    }
  }
  return {PointCloud(1, std::move(coords), std::nullopt, spec), std::move(labels)};
}

inline LabeledCloud generate_labeled(const ShapeSpec& spec) {
  switch (spec.kind) {
    case ShapeKind::point: return point_cloud_single();
    case ShapeKind::segment: return segment(spec.resolution);
    case ShapeKind::circle: return circle(spec.resolution);
    case ShapeKind::bent_line: return bent_line(spec.resolution, spec.angle);
    case ShapeKind::square: return square_grid(spec.resolution);
    case ShapeKind::disc: return disc_grid(spec.resolution);
    case ShapeKind::cube: return cube_grid(spec.resolution);
    case ShapeKind::annulus:
      return annulus_polar(spec.resolution, spec.angular_resolution, spec.inner_radius,
                           spec.outer_radius);
    case ShapeKind::torus: return torus_grid(spec.resolution, spec.major_radius, spec.minor_radius);
    case ShapeKind::sierpinski: return sierpinski(spec.level);
    case ShapeKind::cantor: return cantor(spec.level);
    case ShapeKind::custom: break;
  }
  throw Error(ErrorCode::unsupported_shape, "custom shapes cannot be generated");
}

}  // namespace detail

inline PointCloud gen_point() { return detail::point_cloud_single().cloud; }

/// m evenly spaced points on [0, 1].
inline PointCloud gen_segment(int m) { return detail::segment(m).cloud; }

/// m equally spaced points on the unit circle in R^2. Homogeneous.
inline PointCloud gen_circle(int m) { return detail::circle(m).cloud; }

/// Two unit segments of m points each sharing an endpoint at the origin,
/// meeting at interior angle `angle` (pi gives a straight segment of length 2).
/// Distances are chords in R^2.
inline PointCloud gen_bent_line(int m, double angle) { return detail::bent_line(m, angle).cloud; }

/// m x m grid on [0, 1]^2, spacing 1/(m-1), row-major: index = row*m + col.
inline PointCloud gen_square_grid(int m) { return detail::square_grid(m).cloud; }

/// Square-grid points in the closed unit disc. The grid has a point at the
/// origin and the coarsest spacing that yields at least target_n points.
inline PointCloud gen_disc_grid(int target_n) { return detail::disc_grid(target_n).cloud; }

/// m x m x m grid on [0, 1]^3, index = (z*m + y)*m + x.
inline PointCloud gen_cube_grid(int m) { return detail::cube_grid(m).cloud; }

/// Polar grid: n_r radii uniform on [r_in, r_out] (endpoints included) times
/// n_theta angles uniform on [0, 2pi). Per-point cell areas r*dr*dtheta, with
/// the two boundary rings getting half a radial step so the cells tile the
/// annulus exactly.
inline PointCloud gen_annulus_polar(int n_r, int n_theta, double r_in = 0.5, double r_out = 1.0) {
  return detail::annulus_polar(n_r, n_theta, r_in, r_out).cloud;
}

/// m x m grid in (theta, phi) on the standard torus with the given radii,
/// ordered phi-major. Cell areas are the intrinsic surface element
/// (2pi/m)^2 * minor * (major + minor*cos(phi)).
inline PointCloud gen_torus_grid(int m, double major = 1.0, double minor = 0.2) {
  return detail::torus_grid(m, major, minor).cloud;
}

/// Vertex set of the level-k Sierpinski gasket on the unit equilateral
/// triangle with corners (0,0), (1,0), (1/2, sqrt(3)/2).
inline PointCloud gen_sierpinski(int level) { return detail::sierpinski(level).cloud; }

/// The 2^(k+1) interval endpoints of the level-k ternary Cantor construction.
inline PointCloud gen_cantor(int level) { return detail::cantor(level).cloud; }

inline PointCloud generate(const ShapeSpec& spec) { return detail::generate_labeled(spec).cloud; }

/// Orbits of the generated cloud under the symmetry group of its grid, in the
/// same point order as generate(spec).
inline OrbitPartition symmetry_orbits(const ShapeSpec& spec) {
  const auto labeled = detail::generate_labeled(spec);
  return OrbitPartition(labeled.labels);
}

}  // namespace magnitude
