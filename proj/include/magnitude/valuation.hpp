#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "magnitude/error.hpp"
#include "magnitude/shape_spec.hpp"

namespace magnitude {

/// Volume of the unit n-ball. Exact closed forms for n <= 3.
inline double omega(int n) {
  detail::require(n >= 0, "omega: dimension must be non-negative");
  switch (n) {
    case 0: return 1.0;
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
    default: return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
  }
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// (mu_0, ..., mu_n) of a shape at scale t. mu_0 is the Euler characteristic,
/// mu_n the volume and mu_{n-1} half the boundary measure.
struct IntrinsicVolumes {
  std::vector<double> values;
  ShapeSpec shape;
  double scale = 1.0;
};

// Unscaled building blocks, also used to check additivity.
inline std::vector<double> disc_intrinsic_volumes(double radius) {
  return {1.0, std::numbers::pi * radius, std::numbers::pi * radius * radius};
}

/// A round circle as a closed curve: Euler characteristic 0 and mu_1 = length.
inline std::vector<double> circle_intrinsic_volumes(double radius) {
  return {0.0, 2.0 * std::numbers::pi * radius};
}

inline std::vector<double> annulus_intrinsic_volumes(double r_in, double r_out) {
  constexpr double pi = std::numbers::pi;
  return {0.0, pi * (r_out + r_in), pi * (r_out * r_out - r_in * r_in)};
}

/// Closed surface: mu_0 = chi = 0, mu_1 = 0, mu_2 = area 4 pi^2 R r.
inline std::vector<double> torus_intrinsic_volumes(double major, double minor) {
  return {0.0, 0.0, 4.0 * std::numbers::pi * std::numbers::pi * major * minor};
}

inline bool has_intrinsic_volumes(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::point:
    case ShapeKind::segment:
    case ShapeKind::circle:
    case ShapeKind::bent_line:
    case ShapeKind::square:
    case ShapeKind::disc:
    case ShapeKind::cube:
    case ShapeKind::annulus:
    case ShapeKind::torus:
      return true;
    case ShapeKind::sierpinski:
    case ShapeKind::cantor:
    case ShapeKind::custom:
      return false;
  }
  return false;
}

/// Closed-form intrinsic volumes of the continuum shape `spec` describes
/// (unit size) scaled by t. Grid resolutions are ignored.
inline IntrinsicVolumes intrinsic_volumes(const ShapeSpec& spec, double t) {
  detail::require(t >= 0.0 && std::isfinite(t), "scale must be non-negative and finite");
  std::vector<double> unit;
  switch (spec.kind) {
    case ShapeKind::point: unit = {1.0}; break;
    case ShapeKind::segment: unit = {1.0, 1.0}; break;
    case ShapeKind::circle: unit = circle_intrinsic_volumes(1.0); break;
    case ShapeKind::bent_line: unit = {1.0, 2.0}; break;
    case ShapeKind::square: unit = {1.0, 2.0, 1.0}; break;
    case ShapeKind::disc: unit = disc_intrinsic_volumes(1.0); break;
    case ShapeKind::cube: unit = {1.0, 3.0, 3.0, 1.0}; break;
    case ShapeKind::annulus:
      unit = annulus_intrinsic_volumes(spec.inner_radius, spec.outer_radius);
      break;
    case ShapeKind::torus:
      unit = torus_intrinsic_volumes(spec.major_radius, spec.minor_radius);
      break;
    case ShapeKind::sierpinski:
    case ShapeKind::cantor:
      throw Error(ErrorCode::unsupported_shape,
                  "no intrinsic volumes for fractal shape '" + std::string(to_string(spec.kind)) + "'");
    case ShapeKind::custom:
      throw Error(ErrorCode::unsupported_shape, "no intrinsic volumes for custom point clouds");
  }
  IntrinsicVolumes out{std::move(unit), spec, t};
  double power = 1.0;
  for (auto& mu : out.values) {
    mu *= power;
    power *= t;
  }
  return out;
}

/// sum_i mu_i / (i! omega_i)
inline double penguin(const IntrinsicVolumes& volumes) {
  double p = 0.0;
  for (int i = static_cast<int>(volumes.values.size()) - 1; i >= 0; --i) {
    p += volumes.values[static_cast<std::size_t>(i)] / (factorial(i) * omega(i));
  }
  return p;
}

/// Which expression to use for the torus. `surface_area` evaluates the
/// valuation from the torus area (0.4 pi t^2 for the 1, 1/5 torus);
/// `printed_caption` is the alternative t^2/10 reading, i.e. (pi t^2/5)/(2 pi).
enum class TorusPenguin { surface_area, printed_caption };

inline double penguin(const ShapeSpec& spec, double t,
                      TorusPenguin torus = TorusPenguin::surface_area) {
  if (spec.kind == ShapeKind::torus && torus == TorusPenguin::printed_caption) {
    detail::require(t >= 0.0 && std::isfinite(t), "scale must be non-negative and finite");
    return (std::numbers::pi * t * t / 5.0) / (2.0 * std::numbers::pi);
  }
  return penguin(intrinsic_volumes(spec, t));
}

/// Interior weight of an infinite lattice with Voronoi covolume
/// `cell_volume` in R^n: cell_volume / (n! omega_n).
inline double bulk_weight(int n, double cell_volume) {
  detail::require(n >= 1 && n <= 3, "bulk_weight: dimension must be 1, 2 or 3");
  detail::require(cell_volume > 0.0 && std::isfinite(cell_volume),
                  "bulk_weight: cell volume must be positive");
  return cell_volume / (factorial(n) * omega(n));
}

}  // namespace magnitude
