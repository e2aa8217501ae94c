#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "magnitude/error.hpp"
#include "magnitude/kernel.hpp"
#include "magnitude/point_cloud.hpp"
#include "magnitude/shapes.hpp"
#include "magnitude/summation.hpp"
#include "magnitude/valuation.hpp"
#include "magnitude/weighting.hpp"

namespace magnitude {

/// Scaled nearest-neighbour spacing above which a record no longer
/// approximates the continuum shape.
inline constexpr double fine_spacing_limit = 0.1;
/// Scaled spacing above which a record counts as saturated and is left out
/// of fits unless asked for.
inline constexpr double saturation_spacing = 1.0;

enum class SolveMethod { dense, reduced };

constexpr std::string_view to_string(SolveMethod method) {
  return method == SolveMethod::dense ? "dense" : "reduced";
}

struct SweepOptions {
  SolveOptions solve;
  SolveMethod method = SolveMethod::dense;
  TorusPenguin torus = TorusPenguin::surface_area;
};

struct SweepRecord {
  double t = 0.0;
  std::size_t n_points = 0;
  double magnitude = 0.0;
  std::optional<double> penguin;
  double residual_inf = 0.0;
  double wall_time = 0.0;
  double spacing = 0.0;  // nearest-neighbour spacing after scaling
  SolverTag solver_tag = SolverTag::cholesky;
};

struct SweepResult {
  ShapeSpec shape;
  std::vector<SweepRecord> records;
  std::vector<std::string> warnings;
};

/// A sweep aborted at scale `t`; `partial()` holds the records solved so far.
class SweepError : public Error {
 public:
  SweepError(const Error& cause, double t, SweepResult partial)
      : Error(cause.code(), "sweep failed at t=" + format_scale(t) + ": " + cause.what()),
        t_(t),
        partial_(std::move(partial)) {}

  double t() const noexcept { return t_; }
  const SweepResult& partial() const noexcept { return partial_; }

 private:
  static std::string format_scale(double t) {
    std::ostringstream os;
    os << t;
    return os.str();
  }
  double t_;
  SweepResult partial_;
};

/// One weighting of `cloud` at `scale` by the requested method. The reduced
/// method needs the cloud to come from a generator.
inline Weighting solve_cloud(const PointCloud& cloud, double scale, SolveMethod method,
                             const SolveOptions& options = {},
                             const OrbitPartition* orbits = nullptr) {
  if (method == SolveMethod::dense) return solve_weighting(build_kernel(cloud, scale), options);
  if (orbits != nullptr) return solve_weighting_reduced(cloud, scale, *orbits, options);
  detail::require(cloud.provenance().kind != ShapeKind::custom,
                  "reduced solves need a generated cloud or an explicit orbit partition");
  return solve_weighting_reduced(cloud, scale, symmetry_orbits(cloud.provenance()), options);
}

inline SweepResult sweep(const PointCloud& cloud, std::vector<double> scales,
                         const SweepOptions& options = {}) {
  detail::require(!scales.empty(), "sweep: no scales given");
  for (double t : scales) {
    detail::require(t > 0.0 && std::isfinite(t), "sweep: scales must be positive and finite");
  }
  std::sort(scales.begin(), scales.end());
  detail::require(std::adjacent_find(scales.begin(), scales.end()) == scales.end(),
                  "sweep: scales must be distinct");

  SweepResult result;
  result.shape = cloud.provenance();
  const bool with_penguin = has_intrinsic_volumes(result.shape.kind);
  const double spacing = nearest_neighbor_spacing(cloud);
  std::optional<OrbitPartition> orbits;
  if (options.method == SolveMethod::reduced) {
    detail::require(result.shape.kind != ShapeKind::custom,
                    "reduced solves need a generated cloud");
    orbits = symmetry_orbits(result.shape);
  }

  for (double t : scales) {
    SweepRecord record;
    record.t = t;
    record.n_points = cloud.size();
    record.spacing = spacing * t;
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto w = solve_cloud(cloud, t, options.method, options.solve,
                                 orbits ? &*orbits : nullptr);
      record.magnitude = magnitude(w);
      record.residual_inf = w.residual_inf;
      record.solver_tag = w.solver_tag;
    } catch (const Error& e) {
      throw SweepError(e, t, std::move(result));
    }
    record.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (with_penguin) record.penguin = penguin(result.shape, t, options.torus);
    if (record.spacing > fine_spacing_limit * (1.0 + 1e-9)) {
      std::ostringstream os;
      os << "t=" << t << ": scaled spacing " << record.spacing << " exceeds "
         << fine_spacing_limit << "; the grid is too coarse to approximate the shape";
      result.warnings.push_back(os.str());
    }
    result.records.push_back(record);
  }
  return result;
}

inline SweepResult sweep(const ShapeSpec& shape, std::vector<double> scales,
                         const SweepOptions& options = {}) {
  return sweep(generate(shape), std::move(scales), options);
}

/// First t at which the magnitude exceeds 90% of the point count.
inline std::optional<double> saturation_knee(const SweepResult& result) {
  for (const auto& r : result.records) {
    if (r.magnitude > 0.9 * static_cast<double>(r.n_points)) return r.t;
  }
  return std::nullopt;
}

/// n! omega_n w_x / vol(V_x) for each point, with the cell volume scaled to
/// the weighting's scale (vol scales as t^lattice_dim).
inline std::vector<double> bulk_normalized_weights(const PointCloud& cloud,
                                                   const Weighting& weighting) {
  const auto& cells = cloud.cells();
  if (!cells) {
    throw Error(ErrorCode::missing_cell_volume,
                "bulk-normalized weights need lattice cell volumes; '" +
                    std::string(to_string(cloud.provenance().kind)) + "' clouds have none");
  }
  detail::require(weighting.weights.size() == cloud.size(),
                  "weighting does not match the cloud size");
  const int n = cells->lattice_dim;
  const double volume_scale = std::pow(weighting.scale, n);
  std::vector<double> out(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out[i] = weighting.weights[i] / bulk_weight(n, cells->volume_at(i) * volume_scale);
  }
  return out;
}

struct EdgeSample {
  double d = 0.0;
  double normalized_weight = 0.0;
};

/// Bulk-normalized weights along the middle row of a square grid, from the
/// first interior point in to the centre. The point on the edge itself
/// (d = 0) is kept apart in `boundary_weight`.
struct EdgeProfile {
  std::vector<EdgeSample> samples;
  double boundary_weight = 0.0;
  int points_per_side = 0;
  double scale = 1.0;
};

inline EdgeProfile edge_profile(const PointCloud& square_cloud, const Weighting& weighting) {
  const auto& spec = square_cloud.provenance();
  detail::require(spec.kind == ShapeKind::square,
                  "edge_profile needs a cloud from the square-grid generator");
  const int m = spec.resolution;
  detail::require(m % 2 == 1, "edge_profile needs an odd number of points per side");
  detail::require(square_cloud.size() == static_cast<std::size_t>(m) * static_cast<std::size_t>(m),
                  "cloud size does not match its square-grid provenance");
  const auto normalized = bulk_normalized_weights(square_cloud, weighting);
  const int middle = (m - 1) / 2;
  const double h = weighting.scale / (m - 1);

  EdgeProfile profile;
  profile.points_per_side = m;
  profile.scale = weighting.scale;
  const auto row_start = static_cast<std::size_t>(middle) * static_cast<std::size_t>(m);
  profile.boundary_weight = normalized[row_start];
  for (int c = 1; c <= middle; ++c) {
    profile.samples.push_back({c * h, normalized[row_start + static_cast<std::size_t>(c)]});
  }
  return profile;
}

/// Largest |normalized - 1| over samples with d > d_min. The sample nearest
/// the edge is never counted.
inline double edge_tail_deviation(const EdgeProfile& profile, double d_min) {
  double worst = 0.0;
  for (std::size_t i = 1; i < profile.samples.size(); ++i) {
    const auto& s = profile.samples[i];
    if (s.d > d_min) worst = std::max(worst, std::fabs(s.normalized_weight - 1.0));
  }
  return worst;
}

/// Riemann sum of exp(-|x|) * spacing^n over the cubic lattice of the given
/// spacing, restricted to |x| <= cutoff. Approximates n! omega_n.
inline double lattice_sum_check(int n, double spacing, double cutoff) {
  detail::require(n >= 1 && n <= 3, "lattice_sum_check: dimension must be 1, 2 or 3");
  detail::require(spacing > 0.0 && spacing <= 0.5, "lattice_sum_check: spacing must lie in (0, 0.5]");
  detail::require(cutoff >= 20.0 && std::isfinite(cutoff), "lattice_sum_check: cutoff must be >= 20");
  const auto k = static_cast<long>(std::floor(cutoff / spacing));
  const double c2 = cutoff * cutoff;
  CompensatedSum total;
  auto term = [&](double r2) { return r2 <= c2 ? std::exp(-std::sqrt(r2)) : 0.0; };
  if (n == 1) {
    for (long i = -k; i <= k; ++i) {
      const double x = static_cast<double>(i) * spacing;
      total.add(term(x * x));
    }
  } else if (n == 2) {
    for (long i = -k; i <= k; ++i) {
      const double x = static_cast<double>(i) * spacing;
      CompensatedSum row;
      for (long j = -k; j <= k; ++j) {
        const double y = static_cast<double>(j) * spacing;
        row.add(term(x * x + y * y));
      }
      total.add(row.value());
    }
  } else {
    for (long i = -k; i <= k; ++i) {
      const double x = static_cast<double>(i) * spacing;
      CompensatedSum plane;
      for (long j = -k; j <= k; ++j) {
        const double y = static_cast<double>(j) * spacing;
        const double r2xy = x * x + y * y;
        if (r2xy > c2) continue;
        CompensatedSum row;
        for (long l = -k; l <= k; ++l) {
          const double z = static_cast<double>(l) * spacing;
          row.add(term(r2xy + z * z));
        }
        plane.add(row.value());
      }
      total.add(plane.value());
    }
  }
  return total.value() * std::pow(spacing, n);
}

/// n! omega_n, the value lattice_sum_check approaches.
inline double lattice_sum_target(int n) { return factorial(n) * omega(n); }

struct FitWindow {
  double t_min = 0.0;
  double t_max = 0.0;
};

struct GrowthFit {
  double exponent = 0.0;
  double coefficient = 0.0;
  FitWindow window;
  double rms_residual = 0.0;
  std::size_t records_used = 0;
};

namespace detail {

inline std::vector<const SweepRecord*> in_window(const SweepResult& sweep, FitWindow window,
                                                 bool include_saturated) {
  require(window.t_min < window.t_max, "fit window needs t_min < t_max");
  const double slack = 1e-12 * window.t_max;
  std::vector<const SweepRecord*> out;
  for (const auto& r : sweep.records) {
    if (r.t < window.t_min - slack || r.t > window.t_max + slack) continue;
    if (!include_saturated && r.spacing > saturation_spacing * (1.0 + 1e-9)) continue;
    out.push_back(&r);
  }
  return out;
}

}  // namespace detail

/// Least-squares slope of log(magnitude) against log(t) over the records in
/// the window. Saturated records are skipped unless `include_saturated`.
inline GrowthFit growth_rate(const SweepResult& sweep, FitWindow window,
                             bool include_saturated = false) {
  const auto records = detail::in_window(sweep, window, include_saturated);
  detail::require(records.size() >= 4, "growth_rate: need at least 4 records in the window, have " +
                                           std::to_string(records.size()));
  const auto n = static_cast<double>(records.size());
  double sx = 0.0, sy = 0.0;
  for (const auto* r : records) {
    detail::require(r->magnitude > 0.0, "growth_rate: magnitudes must be positive");
    sx += std::log(r->t);
    sy += std::log(r->magnitude);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto* r : records) {
    const double dx = std::log(r->t) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(r->magnitude) - my);
  }
  GrowthFit fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.coefficient = std::exp(intercept);
  double ss = 0.0;
  for (const auto* r : records) {
    const double e = std::log(r->magnitude) - (intercept + fit.exponent * std::log(r->t));
    ss += e * e;
  }
  fit.rms_residual = std::sqrt(ss / n);
  fit.window = window;
  fit.records_used = records.size();
  return fit;
}

struct FunctionalResidual {
  double t = 0.0;         // the pair is (t, 2t)
  double absolute = 0.0;  // |mag(2t) - (3 mag(t) - 3)|
  double relative = 0.0;  // absolute / mag(2t)
};

struct SierpinskiFit {
  double coefficient = 0.0;
  double exponent = std::log2(3.0);
  std::vector<FunctionalResidual> functional_residuals;
  std::size_t records_used = 0;
};

/// Fits magnitude ~ c t^log2(3) + 3/2 with c free and checks the
/// self-similarity relation on every (t, 2t) pair in the window.
///
/// S_2t is three copies of S_t glued at three points, so an
/// inclusion-exclusion invariant p obeys p(2t) = 3 p(t) - 3, whose general
/// solution is f(t) t^log2(3) + 3/2 with f(2t) = f(t).
///
/// c minimises the sum of squared relative residuals, so every decade of t
/// counts equally, as on a log-log plot.
inline SierpinskiFit sierpinski_fit(const SweepResult& sweep, FitWindow window,
                                    bool include_saturated = false) {
  const auto records = detail::in_window(sweep, window, include_saturated);
  SierpinskiFit fit;
  for (const auto* r : records) {
    for (const auto* s : records) {
      if (std::fabs(s->t - 2.0 * r->t) <= 1e-9 * s->t) {
        const double abs_res = std::fabs(s->magnitude - (3.0 * r->magnitude - 3.0));
        fit.functional_residuals.push_back({r->t, abs_res, abs_res / std::fabs(s->magnitude)});
      }
    }
  }
  if (fit.functional_residuals.empty()) {
    throw Error(ErrorCode::invalid_argument, "sierpinski_fit: no (t, 2t) pairs in the window");
  }
  double num = 0.0, den = 0.0;
  for (const auto* r : records) {
    const double x = std::pow(r->t, fit.exponent);
    const double w = 1.0 / (r->magnitude * r->magnitude);
    num += w * x * (r->magnitude - 1.5);
    den += w * x * x;
  }
  fit.coefficient = num / den;
  fit.records_used = records.size();
  return fit;
}

/// (t, magnitude - penguin) for each record.
inline std::vector<std::pair<double, double>> deviation_series(const SweepResult& sweep) {
  std::vector<std::pair<double, double>> out;
  out.reserve(sweep.records.size());
  for (const auto& r : sweep.records) {
    if (!r.penguin) {
      throw Error(ErrorCode::unsupported_shape,
                  "deviation_series: no penguin value for '" +
                      std::string(to_string(sweep.shape.kind)) + "'");
    }
    out.emplace_back(r.t, r.magnitude - *r.penguin);
  }
  return out;
}

}  // namespace magnitude
