#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>

#include "magnitude/error.hpp"
#include "magnitude/kernel.hpp"
#include "magnitude/point_cloud.hpp"
#include "magnitude/summation.hpp"

namespace magnitude {

enum class SolverTag {
  cholesky,          // dense SPD factorization
  pivoted_lu,        // dense fallback after the SPD factorization failed
  reduced_cholesky,  // orbit-reduced SPD system
  reduced_lu,        // orbit-reduced fallback
};

constexpr std::string_view to_string(SolverTag tag) {
  switch (tag) {
    case SolverTag::cholesky: return "cholesky";
    case SolverTag::pivoted_lu: return "pivoted_lu";
    case SolverTag::reduced_cholesky: return "reduced_cholesky";
    case SolverTag::reduced_lu: return "reduced_lu";
  }
  return "unknown";
}

constexpr bool is_fallback(SolverTag tag) {
  return tag == SolverTag::pivoted_lu || tag == SolverTag::reduced_lu;
}

struct SolveOptions {
  double residual_gate = 1e-6;
  int refinement_steps = 1;
};

/// Solution of Zw = 1 at a given scale. `residual_inf` is always recomputed
/// from `weights` after the solve.
struct Weighting {
  std::vector<double> weights;
  double residual_inf = 0.0;
  SolverTag solver_tag = SolverTag::cholesky;
  double scale = 1.0;
};

/// The magnitude: the sum of the weights, accumulated with compensation.
inline double magnitude(const Weighting& weighting) {
  return compensated_sum(weighting.weights);
}

/// ||Zw - 1||_inf, accumulated in long double.
inline double residual(const KernelMatrix& kernel, std::span<const double> weights) {
  const auto n = static_cast<Eigen::Index>(kernel.size());
  detail::require(static_cast<Eigen::Index>(weights.size()) == n,
                  "residual: weight vector length " + std::to_string(weights.size()) +
                      " does not match kernel size " + std::to_string(n));
  const Eigen::MatrixXd& z = kernel.matrix();
  std::vector<long double> acc(static_cast<std::size_t>(n), -1.0L);
  for (Eigen::Index j = 0; j < n; ++j) {
    const long double wj = weights[static_cast<std::size_t>(j)];
    const double* col = z.data() + j * n;
    for (Eigen::Index i = 0; i < n; ++i) acc[static_cast<std::size_t>(i)] += col[i] * wj;
  }
  long double worst = 0.0L;
  for (long double a : acc) worst = std::max(worst, std::fabs(a));
  return static_cast<double>(worst);
}

inline double residual(const KernelMatrix& kernel, const Weighting& weighting) {
  return residual(kernel, weighting.weights);
}

/// ||Zw - 1||_inf without materializing Z: entries are regenerated from the
/// cloud. O(N^2) exponentials.
inline double residual(const PointCloud& cloud, double scale, std::span<const double> weights) {
  const std::size_t n = cloud.size();
  detail::require(weights.size() == n, "residual: weight vector length does not match cloud size");
  long double worst = 0.0L;
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic, 16) reduction(max : worst)
#endif
  for (std::size_t i = 0; i < n; ++i) {
    long double acc = -1.0L;
    for (std::size_t j = 0; j < n; ++j) {
      acc += std::exp(-scale * cloud.distance(i, j)) * static_cast<long double>(weights[j]);
    }
    worst = std::max(worst, std::fabs(acc));
  }
  return static_cast<double>(worst);
}

namespace detail {

inline Eigen::VectorXd long_double_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& b) {
  const Eigen::Index n = a.rows();
  std::vector<long double> acc(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) acc[static_cast<std::size_t>(i)] = b(i);
  for (Eigen::Index j = 0; j < n; ++j) {
    const long double xj = x(j);
    const double* col = a.data() + j * n;
    for (Eigen::Index i = 0; i < n; ++i) acc[static_cast<std::size_t>(i)] -= col[i] * xj;
  }
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) r(i) = static_cast<double>(acc[static_cast<std::size_t>(i)]);
  return r;
}

struct DenseSolution {
  Eigen::VectorXd x;
  bool used_fallback = false;
};

/// Solves a symmetric system by Cholesky with iterative refinement, falling
/// back to partial-pivoting LU when the factorization reports indefiniteness.
inline DenseSolution solve_symmetric(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                     int refinement_steps) {
  DenseSolution out;
  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(a);
  if (llt.info() == Eigen::Success) {
    out.x = llt.solve(b);
    for (int step = 0; step < refinement_steps; ++step) {
      out.x += llt.solve(long_double_residual(a, out.x, b));
    }
    return out;
  }
  out.used_fallback = true;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  out.x = lu.solve(b);
  for (int step = 0; step < refinement_steps; ++step) {
    out.x += lu.solve(long_double_residual(a, out.x, b));
  }
  return out;
}

inline void enforce_gate(const Weighting& w, const SolveOptions& options) {
  if (!(w.residual_inf <= options.residual_gate)) throw IllConditionedError(w.residual_inf);
}

}  // namespace detail

/// Solves the weight equations Zw = 1.
///
/// Throws IllConditionedError when the recomputed residual exceeds
/// `options.residual_gate`.
inline Weighting solve_weighting(const KernelMatrix& kernel, const SolveOptions& options = {}) {
  detail::require(options.refinement_steps >= 1, "at least one refinement step is required");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(kernel.matrix().rows());
  const auto solution = detail::solve_symmetric(kernel.matrix(), ones, options.refinement_steps);

  Weighting w;
  w.weights.assign(solution.x.data(), solution.x.data() + solution.x.size());
  w.solver_tag = solution.used_fallback ? SolverTag::pivoted_lu : SolverTag::cholesky;
  w.scale = kernel.scale();
  w.residual_inf = residual(kernel, w.weights);
  detail::enforce_gate(w, options);
  return w;
}

/// Magnitude of a homogeneous cloud from one row of Z: N / sum_x exp(-t d(x0, x)).
///
/// Every row sum is checked against the first; a relative disagreement above
/// 1e-10 raises ErrorCode::not_homogeneous.
inline double speyer_magnitude(const PointCloud& cloud, double scale) {
  detail::require(scale > 0.0 && std::isfinite(scale), "scale must be positive and finite");
  const std::size_t n = cloud.size();
  std::vector<double> row_sums(n);
  for (std::size_t i = 0; i < n; ++i) {
    CompensatedSum s;
    for (std::size_t j = 0; j < n; ++j) s.add(std::exp(-scale * cloud.distance(i, j)));
    row_sums[i] = s.value();
  }
  double deviation = 0.0;
  for (double r : row_sums) deviation = std::max(deviation, std::fabs(r - row_sums[0]) / row_sums[0]);
  if (deviation > 1e-10) {
    throw Error(ErrorCode::not_homogeneous,
                "not homogeneous: max relative row-sum deviation " + std::to_string(deviation));
  }
  return static_cast<double>(n) / row_sums[0];
}

/// A partition of a cloud's points into orbits of an isometry group of the
/// cloud. Orbit ids are dense, numbered in order of first appearance.
class OrbitPartition {
 public:
  /// `labels[i]` is any integer naming point i's orbit.
  explicit OrbitPartition(std::span<const std::int64_t> labels) {
    std::unordered_map<std::int64_t, std::size_t> ids;
    orbit_of_.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      auto [it, inserted] = ids.try_emplace(labels[i], representatives_.size());
      if (inserted) {
        representatives_.push_back(i);
        sizes_.push_back(0);
      }
      orbit_of_.push_back(it->second);
      ++sizes_[it->second];
    }
  }

  static OrbitPartition trivial(std::size_t n) {
    std::vector<std::int64_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::int64_t>(i);
    return OrbitPartition(labels);
  }

  std::size_t point_count() const noexcept { return orbit_of_.size(); }
  std::size_t orbit_count() const noexcept { return representatives_.size(); }
  std::size_t orbit_of(std::size_t i) const { return orbit_of_[i]; }
  std::size_t representative(std::size_t orbit) const { return representatives_[orbit]; }
  std::size_t orbit_size(std::size_t orbit) const { return sizes_[orbit]; }

 private:
  std::vector<std::size_t> orbit_of_;
  std::vector<std::size_t> representatives_;
  std::vector<std::size_t> sizes_;
};

/// Solves Zw = 1 on the subspace of orbit-constant weightings.
///
/// With P the N x K orbit indicator matrix the reduced system is
/// (P^T Z P) v = P^T 1, which is SPD whenever Z is. Only valid when the
/// partition consists of orbits of an isometry group; the full residual is
/// recomputed matrix-free, so a wrong partition fails the gate.
inline Weighting solve_weighting_reduced(const PointCloud& cloud, double scale,
                                         const OrbitPartition& orbits,
                                         const SolveOptions& options = {}) {
  detail::require(scale > 0.0 && std::isfinite(scale), "scale must be positive and finite");
  detail::require(options.refinement_steps >= 1, "at least one refinement step is required");
  detail::require(orbits.point_count() == cloud.size(),
                  "orbit partition does not match the cloud size");
  const std::size_t n = cloud.size();
  const auto k = static_cast<Eigen::Index>(orbits.orbit_count());

  // row a of the reduced matrix: sum over orbit b of Z(rep_a, x), scaled by |O_a|
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(k, k);
  std::size_t dup_a = n, dup_b = n;
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic, 4)
#endif
  for (Eigen::Index a = 0; a < k; ++a) {
    const std::size_t rep = orbits.representative(static_cast<std::size_t>(a));
    std::vector<CompensatedSum> row(static_cast<std::size_t>(k));
    for (std::size_t x = 0; x < n; ++x) {
      const double d = cloud.distance(rep, x);
      if (d == 0.0 && x != rep) {
#if defined(_OPENMP)
#pragma omp critical(magnitude_duplicate)
#endif
        {
          dup_a = std::min(rep, x);
          dup_b = std::max(rep, x);
        }
      }
      row[orbits.orbit_of(x)].add(std::exp(-scale * d));
    }
    const double size_a = static_cast<double>(orbits.orbit_size(static_cast<std::size_t>(a)));
    for (Eigen::Index b = 0; b < k; ++b) s(a, b) = size_a * row[static_cast<std::size_t>(b)].value();
  }
  if (dup_a < n) {
    throw Error(ErrorCode::duplicate_points, "duplicate points at indices " +
                                                 std::to_string(dup_a) + " and " +
                                                 std::to_string(dup_b));
  }
  const Eigen::MatrixXd symmetric = 0.5 * (s + s.transpose());
  Eigen::VectorXd rhs(k);
  for (Eigen::Index a = 0; a < k; ++a) rhs(a) = static_cast<double>(orbits.orbit_size(static_cast<std::size_t>(a)));

  const auto solution = detail::solve_symmetric(symmetric, rhs, options.refinement_steps);

  Weighting w;
  w.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) w.weights[i] = solution.x(static_cast<Eigen::Index>(orbits.orbit_of(i)));
  w.solver_tag = solution.used_fallback ? SolverTag::reduced_lu : SolverTag::reduced_cholesky;
  w.scale = scale;
  w.residual_inf = residual(cloud, scale, w.weights);
  detail::enforce_gate(w, options);
  return w;
}

}  // namespace magnitude
