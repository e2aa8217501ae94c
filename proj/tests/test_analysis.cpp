#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "magnitude/magnitude.hpp"
#include "oracles.hpp"

namespace mg = magnitude;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

mg::SweepResult synthetic(const std::vector<double>& ts, double (*f)(double), double spacing = 0.01) {
  mg::SweepResult result;
  for (double t : ts) {
    mg::SweepRecord r;
    r.t = t;
    r.magnitude = f(t);
    r.spacing = spacing;
    result.records.push_back(r);
  }
  return result;
}

}  // namespace

TEST_CASE("sweep of a single point is flat", "[analysis]") {
  const auto result = mg::sweep(mg::ShapeSpec::point(), {0.1, 1.0, 50.0});
  REQUIRE(result.records.size() == 3);
  for (const auto& r : result.records) {
    CHECK(r.magnitude == 1.0);
    CHECK(r.penguin == 1.0);
    CHECK(r.n_points == 1);
  }
  for (const auto& [t, dev] : mg::deviation_series(result)) CHECK(dev == 0.0);
}

TEST_CASE("sweep sorts scales, rejects bad ones, and records diagnostics", "[analysis]") {
  const auto result = mg::sweep(mg::ShapeSpec::segment(11), {4.0, 0.5, 2.0});
  REQUIRE(result.records.size() == 3);
  CHECK(result.records[0].t == 0.5);
  CHECK(result.records[2].t == 4.0);
  for (const auto& r : result.records) {
    CHECK(r.residual_inf < 1e-9);
    CHECK(r.penguin.has_value());
    CHECK_THAT(r.spacing, WithinRel(r.t / 10, 1e-12));
  }
  // spacing 0.2 and 0.4 exceed the fineness limit; 0.05 does not
  CHECK(result.warnings.size() == 2);

  CHECK_THROWS_AS(mg::sweep(mg::ShapeSpec::segment(5), {}), mg::Error);
  CHECK_THROWS_AS(mg::sweep(mg::ShapeSpec::segment(5), {1.0, 1.0}), mg::Error);
  CHECK_THROWS_AS(mg::sweep(mg::ShapeSpec::segment(5), {-1.0}), mg::Error);
}

TEST_CASE("sweep spacing exactly at the limit does not warn", "[analysis]") {
  const auto result = mg::sweep(mg::ShapeSpec::segment(101), {10.0});
  CHECK(result.warnings.empty());
}

TEST_CASE("sweep failures carry the partial result", "[analysis]") {
  mg::SweepOptions strict;
  strict.solve.residual_gate = -1.0;
  try {
    (void)mg::sweep(mg::ShapeSpec::segment(5), {1.0, 2.0}, strict);
    FAIL("expected SweepError");
  } catch (const mg::SweepError& e) {
    CHECK(e.code() == mg::ErrorCode::ill_conditioned);
    CHECK(e.t() == 1.0);
    CHECK(e.partial().records.empty());
  }
}

TEST_CASE("dense and reduced sweeps agree", "[analysis]") {
  mg::SweepOptions reduced;
  reduced.method = mg::SolveMethod::reduced;
  const auto a = mg::sweep(mg::ShapeSpec::square(21), {1.0, 5.0, 20.0});
  const auto b = mg::sweep(mg::ShapeSpec::square(21), {1.0, 5.0, 20.0}, reduced);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK_THAT(b.records[i].magnitude, WithinRel(a.records[i].magnitude, 1e-11));
    CHECK(b.records[i].solver_tag == mg::SolverTag::reduced_cholesky);
  }
}

TEST_CASE("segment magnitude approaches 1 + t/2 from below as the grid refines", "[analysis]") {
  // 1 + sum tanh(t h / 2) < 1 + t/2, and the gap shrinks with h
  const double t = 10.0;
  double previous = 0.0;
  for (int m : {51, 101, 201, 401}) {
    const auto seg = mg::gen_segment(m);
    const double mag = mg::magnitude(mg::solve_weighting(mg::build_kernel(seg, t)));
    const double exact =
        oracle::collinear_magnitude(std::vector<double>(seg.coords().begin(), seg.coords().end()), t);
    CHECK_THAT(mag, WithinRel(exact, 1e-10));
    CHECK(mag > previous);
    CHECK(mag < 1.0 + t / 2);
    previous = mag;
  }
  CHECK_THAT(previous, WithinRel(6.0, 0.005));
}

TEST_CASE("segment m=101 at t=10 is within 1% of 6", "[analysis]") {
  const auto r = mg::sweep(mg::ShapeSpec::segment(101), {10.0});
  CHECK_THAT(r.records[0].magnitude, WithinRel(6.0, 0.01));
}

TEST_CASE("saturation knee", "[analysis]") {
  const auto r = mg::sweep(mg::ShapeSpec::segment(6), {0.1, 1.0, 10.0, 100.0});
  const auto knee = mg::saturation_knee(r);
  REQUIRE(knee.has_value());
  CHECK(*knee == 100.0);
  CHECK_FALSE(mg::saturation_knee(mg::sweep(mg::ShapeSpec::segment(6), {0.1})).has_value());
}

TEST_CASE("bulk-normalized weights", "[analysis]") {
  // a weighting equal to vol/(2 pi) everywhere normalizes to one
  const auto cloud = mg::gen_square_grid(5);
  mg::Weighting w;
  w.scale = 3.0;
  const double cell = std::pow(3.0 / 4, 2);
  w.weights.assign(25, cell / (2 * pi));
  for (double v : mg::bulk_normalized_weights(cloud, w)) CHECK_THAT(v, WithinRel(1.0, 1e-14));

  try {
    (void)mg::bulk_normalized_weights(mg::gen_cantor(3), mg::Weighting{std::vector<double>(16, 1.0)});
    FAIL("expected missing_cell_volume");
  } catch (const mg::Error& e) {
    CHECK(e.code() == mg::ErrorCode::missing_cell_volume);
  }
}

TEST_CASE("interior weights of a fine segment sit at the bulk value", "[analysis]") {
  const auto seg = mg::gen_segment(401);
  const auto w = mg::solve_weighting(mg::build_kernel(seg, 20.0));
  const auto norm = mg::bulk_normalized_weights(seg, w);
  for (std::size_t i = 1; i + 1 < norm.size(); ++i) CHECK_THAT(norm[i], WithinRel(1.0, 0.05));
  CHECK(norm.front() > 2.0);
}

TEST_CASE("bulk-normalized weight at the centre of a square", "[analysis]") {
  const auto cloud = mg::gen_square_grid(101);
  const auto w = mg::solve_cloud(cloud, 10.0, mg::SolveMethod::reduced);
  const auto norm = mg::bulk_normalized_weights(cloud, w);
  CHECK_THAT(norm[50 * 101 + 50], WithinRel(1.0, 0.05));
}

TEST_CASE("edge profile of the smallest odd grid", "[analysis]") {
  const auto cloud = mg::gen_square_grid(3);
  const auto w = mg::solve_weighting(mg::build_kernel(cloud, 2.0));
  const auto profile = mg::edge_profile(cloud, w);
  const auto norm = mg::bulk_normalized_weights(cloud, w);
  REQUIRE(profile.samples.size() == 1);
  CHECK(profile.samples[0].d == 1.0);
  CHECK(profile.samples[0].normalized_weight == norm[4]);
  CHECK(profile.boundary_weight == norm[3]);
  CHECK(profile.points_per_side == 3);

  CHECK_THROWS_AS(mg::edge_profile(mg::gen_square_grid(4),
                                   mg::solve_weighting(mg::build_kernel(mg::gen_square_grid(4), 1.0))),
                  mg::Error);
  CHECK_THROWS_AS(mg::edge_profile(mg::gen_segment(5),
                                   mg::solve_weighting(mg::build_kernel(mg::gen_segment(5), 1.0))),
                  mg::Error);
}

TEST_CASE("edge profile dips below zero then settles at one", "[analysis]") {
  const auto cloud = mg::gen_square_grid(171);
  const auto w = mg::solve_cloud(cloud, 10.0, mg::SolveMethod::reduced);
  const auto profile = mg::edge_profile(cloud, w);
  REQUIRE(profile.samples.size() == 85);
  CHECK(profile.boundary_weight > 1.0);
  double lowest = profile.samples.front().normalized_weight;
  for (const auto& s : profile.samples) lowest = std::min(lowest, s.normalized_weight);
  CHECK(lowest < -1.0);
  CHECK(profile.samples.back().normalized_weight > 0.9);
  CHECK(profile.samples.back().normalized_weight < 1.1);
  CHECK_THAT(profile.samples.back().d, WithinRel(5.0, 1e-12));
  // the centre sits at d = 5, so the tail is taken from d > 1.5 on
  CHECK(mg::edge_tail_deviation(profile, 5.0) < 0.05);
  CHECK(mg::edge_tail_deviation(profile, 1.5) < 0.05);
}

TEST_CASE("lattice sums approach n! omega_n", "[analysis]") {
  CHECK(mg::lattice_sum_target(1) == 2.0);
  CHECK_THAT(mg::lattice_sum_target(2), WithinRel(2 * pi, 1e-15));
  CHECK_THAT(mg::lattice_sum_target(3), WithinRel(8 * pi, 1e-15));
  CHECK_THAT(mg::lattice_sum_check(1, 0.01, 40.0), WithinRel(2.0, 1e-3));
  CHECK_THAT(mg::lattice_sum_check(2, 0.05, 40.0), WithinRel(2 * pi, 5e-3));
  CHECK_THAT(mg::lattice_sum_check(3, 0.1, 30.0), WithinRel(8 * pi, 1e-2));

  // the Riemann-sum error shrinks like spacing^2 in one dimension
  const double coarse = std::fabs(mg::lattice_sum_check(1, 0.2, 40.0) - 2.0);
  const double fine = std::fabs(mg::lattice_sum_check(1, 0.1, 40.0) - 2.0);
  CHECK_THAT(coarse / fine, WithinRel(4.0, 0.01));
  for (int n : {2, 3}) {
    const double target = mg::lattice_sum_target(n);
    CHECK(std::fabs(mg::lattice_sum_check(n, 0.1, 20.0) - target) <
          std::fabs(mg::lattice_sum_check(n, 0.2, 20.0) - target));
  }

  CHECK_THROWS_AS(mg::lattice_sum_check(2, 0.6, 40.0), mg::Error);
  CHECK_THROWS_AS(mg::lattice_sum_check(2, 0.1, 10.0), mg::Error);
  CHECK_THROWS_AS(mg::lattice_sum_check(4, 0.1, 40.0), mg::Error);
}

TEST_CASE("growth rate of an exact power law", "[analysis]") {
  const auto r = synthetic({1, 2, 4, 8, 16}, [](double t) { return 0.7 * t * t; });
  const auto fit = mg::growth_rate(r, {1, 16});
  CHECK_THAT(fit.exponent, WithinAbs(2.0, 1e-10));
  CHECK_THAT(fit.coefficient, WithinRel(0.7, 1e-10));
  CHECK(fit.rms_residual < 1e-10);
  CHECK(fit.records_used == 5);

  CHECK_THROWS_AS(mg::growth_rate(r, {1, 4}), mg::Error);
  CHECK_THROWS_AS(mg::growth_rate(r, {4, 1}), mg::Error);
}

TEST_CASE("growth rate skips saturated records unless asked", "[analysis]") {
  auto r = synthetic({1, 2, 4, 8, 16}, [](double t) { return t; });
  r.records.back().spacing = 2.0;
  r.records.back().magnitude = 1e6;
  CHECK(mg::growth_rate(r, {1, 16}).records_used == 4);
  CHECK_THAT(mg::growth_rate(r, {1, 16}).exponent, WithinAbs(1.0, 1e-12));
  CHECK(mg::growth_rate(r, {1, 16}, true).records_used == 5);
}

TEST_CASE("square growth follows the penguin's own slope", "[analysis]") {
  mg::SweepOptions reduced;
  reduced.method = mg::SolveMethod::reduced;
  const auto r = mg::sweep(mg::ShapeSpec::square(101), {10.0, 20.0, 40.0, 80.0}, reduced);
  const auto fit = mg::growth_rate(r, {10, 80});
  auto p = r;
  for (auto& rec : p.records) rec.magnitude = *rec.penguin;
  CHECK_THAT(fit.exponent, WithinAbs(mg::growth_rate(p, {10, 80}).exponent, 0.03));
}

TEST_CASE("sierpinski fit of a constructed solution", "[analysis]") {
  const auto r = synthetic({8, 16, 32, 64}, [](double t) { return std::pow(t, std::log2(3.0)) / 3 + 1.5; });
  const auto fit = mg::sierpinski_fit(r, {8, 64});
  CHECK_THAT(fit.coefficient, WithinRel(1.0 / 3, 1e-12));
  CHECK_THAT(fit.exponent, WithinRel(std::log2(3.0), 1e-15));
  REQUIRE(fit.functional_residuals.size() == 3);
  for (const auto& res : fit.functional_residuals) CHECK(res.relative < 1e-12);
  CHECK(fit.records_used == 4);

  const auto unpaired = synthetic({8, 12, 20}, [](double t) { return t; });
  CHECK_THROWS_AS(mg::sierpinski_fit(unpaired, {8, 20}), mg::Error);
}

TEST_CASE("deviation series needs a valuation", "[analysis]") {
  const auto square = mg::sweep(mg::ShapeSpec::square(11), {1.0, 2.0});
  const auto dev = mg::deviation_series(square);
  REQUIRE(dev.size() == 2);
  CHECK(dev[0].second == square.records[0].magnitude - *square.records[0].penguin);
  try {
    (void)mg::deviation_series(mg::sweep(mg::ShapeSpec::cantor(2), {1.0}));
    FAIL("expected unsupported_shape");
  } catch (const mg::Error& e) {
    CHECK(e.code() == mg::ErrorCode::unsupported_shape);
  }
}

TEST_CASE("annulus deviation is large at small t and small at t=20", "[analysis]") {
  const auto r = mg::sweep(mg::ShapeSpec::annulus(20, 120), {0.5, 20.0});
  const auto dev = mg::deviation_series(r);
  CHECK(std::fabs(dev[0].second) / *r.records[0].penguin > 0.10);
  CHECK(std::fabs(dev[1].second) / *r.records[1].penguin < 0.05);
}

TEST_CASE("Cantor growth exponent is log_3 2", "[analysis]") {
  mg::SweepOptions reduced;
  reduced.method = mg::SolveMethod::reduced;
  const auto r = mg::sweep(mg::ShapeSpec::cantor(8), mg::log_scales(30, 200, 12), reduced);
  CHECK_THAT(mg::growth_rate(r, {30, 200}, true).exponent, WithinAbs(std::log(2.0) / std::log(3.0), 0.1));
}

TEST_CASE("level-5 gasket fit coefficient is near 1/3", "[analysis]") {
  mg::SweepOptions reduced;
  reduced.method = mg::SolveMethod::reduced;
  const auto r = mg::sweep(mg::ShapeSpec::sierpinski(5), {8, 16, 32, 64}, reduced);
  CHECK_THAT(mg::sierpinski_fit(r, {8, 64}, true).coefficient, WithinAbs(1.0 / 3, 0.15));
}

// Quantitative claims about the square grid, checked exactly as stated.
// written. They run as their own ctest entry.

TEST_CASE("square m=51 at t=5 is within 2% of its penguin value", "[square_claims]") {
  const auto r = mg::sweep(mg::ShapeSpec::square(51), {5.0});
  CHECK_THAT(*r.records[0].penguin, WithinAbs(9.979, 1e-3));
  CHECK_THAT(r.records[0].magnitude, WithinRel(*r.records[0].penguin, 0.02));
}

TEST_CASE("square m=151 grows like t^2 over [20, 80]", "[square_claims]") {
  mg::SweepOptions reduced;
  reduced.method = mg::SolveMethod::reduced;
  const auto r = mg::sweep(mg::ShapeSpec::square(151), {20.0, 40.0, 60.0, 80.0}, reduced);
  CHECK_THAT(mg::growth_rate(r, {20, 80}).exponent, WithinAbs(2.0, 0.1));
}

TEST_CASE("square m=151 deviation stays under 2% of the penguin value", "[square_claims]") {
  mg::SweepOptions reduced;
  reduced.method = mg::SolveMethod::reduced;
  const auto r = mg::sweep(mg::ShapeSpec::square(151), {2.0, 5.0, 10.0}, reduced);
  const auto dev = mg::deviation_series(r);
  for (std::size_t i = 0; i < dev.size(); ++i) {
    INFO("t=" << dev[i].first << " magnitude=" << r.records[i].magnitude << " penguin=" << *r.records[i].penguin);
    CHECK(std::fabs(dev[i].second) / *r.records[i].penguin < 0.02);
  }
}
