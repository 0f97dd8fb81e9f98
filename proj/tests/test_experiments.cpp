#include "steklov/experiments.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>

using namespace steklov;
using Catch::Approx;

namespace {

CurvePtr unit_circle() {
  return std::make_shared<BoundaryCurve>(BoundaryCurve::circle(1.0));
}

CurvePtr unit_square() {
  return std::make_shared<BoundaryCurve>(BoundaryCurve::polygon(
      {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}));
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i)
    out.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return out;
}

}  // namespace

TEST_CASE("power-law fitter self-tests") {
  auto radii = log_spaced(1e-3, 0.3, 24);

  SECTION("exact square root field") {
    std::vector<double> vals;
    for (double r : radii) vals.push_back(0.37 * std::sqrt(r));
    LineFit f = fit_power_law(radii, vals);
    CHECK(f.slope == Approx(0.5).margin(1e-6));
    CHECK(f.rms_residual < 1e-12);
  }

  SECTION("exact linear field") {
    std::vector<double> vals;
    for (double r : radii) vals.push_back(2.1 * r);
    LineFit f = fit_power_law(radii, vals);
    CHECK(f.slope == Approx(1.0).margin(1e-6));
  }

  SECTION("analytic singular field sampled along the ray") {
    // u(r, theta) = r^{1/2} sin(theta/2) along a fixed-angle ray
    std::vector<double> vals;
    for (double r : radii) vals.push_back(std::sqrt(r) * std::sin(kPi / 4.0));
    LineFit f = fit_power_law(radii, vals);
    CHECK(f.slope == Approx(0.5).margin(1e-6));
  }

  CHECK_THROWS_AS(fit_power_law({0.1}, {1.0}), Error);
  CHECK_THROWS_AS(fit_power_law({0.1, -0.2}, {1.0, 1.0}), Error);
}

TEST_CASE("nodal interpolation reproduces linears") {
  auto c = unit_circle();
  Mesh m = mesh_domain(c, ArcSet(c, {{0.0, kPi}}), 0.3);
  Eigen::VectorXd f(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v)
    f[v] = 1.0 + 2.0 * m.vertices[v].x() - 0.5 * m.vertices[v].y();
  for (Vec2 q : {Vec2{0.1, 0.2}, Vec2{-0.4, 0.1}, Vec2{0.0, -0.6}}) {
    CHECK(interpolate_nodal(m, f, q) ==
          Approx(1.0 + 2.0 * q.x() - 0.5 * q.y()).margin(1e-12));
  }
  CHECK_THROWS_AS(interpolate_nodal(m, f, Vec2{2.0, 2.0}), Error);
}

TEST_CASE("inward bisector directions") {
  auto c = unit_circle();
  Vec2 d0 = inward_bisector(*c, 0.0);
  CHECK((d0 - Vec2{-1.0, 0.0}).norm() < 1e-9);

  auto sq = unit_square();
  Vec2 dc = inward_bisector(*sq, 2.0);  // corner (1, 1)
  CHECK((dc - Vec2{-1.0, -1.0}.normalized()).norm() < 1e-12);
}

TEST_CASE("convergence study on the separable square fixture") {
  auto sq = unit_square();
  ArcSet top(sq, {{2.0, 3.0}});
  ConvergenceReport rep = convergence_study(sq, top, 1, 4, 0.12);

  REQUIRE(rep.hs.size() == 4);
  CHECK(rep.monotone[0]);
  CHECK(rep.observed_order[0] >= 1.0);
  double exact = kPi / std::tanh(kPi);
  CHECK(rep.extrapolated[0] == Approx(exact).epsilon(1e-3));
  CHECK(rep.error_bar[0] < 0.05);

  CHECK_THROWS_AS(convergence_study(sq, top, 1, 2, 0.12), Error);
}

TEST_CASE("singularity exponent on the disk half-half configuration") {
  auto c = unit_circle();
  ArcSet upper(c, {{0.0, kPi}});
  SingularityReport rep = singularity_fit(c, upper, 0.0, 0.12, 0.5, 12, 0.05);
  CHECK(rep.exponent > 0.4);
  CHECK(rep.exponent < 0.6);

  // not an arc endpoint
  CHECK_THROWS_AS(singularity_fit(c, upper, 1.0, 0.12, 0.5, 12, 0.05), Error);
  // window below the resolved scale
  CHECK_THROWS_AS(singularity_fit(c, upper, 0.0, 1e-4, 0.5, 12, 0.05), Error);
}

TEST_CASE("stability sweep") {
  auto c = unit_circle();
  ArcSet half(c, {{0.0, kPi}});

  SECTION("rigid rotation leaves the disk spectrum unchanged") {
    StabilityReport rep = stability_sweep(c, half, 1, {0.4, 0.2, 0.1},
                                          PerturbMode::ArcTranslate, 0.12);
    for (const auto& e : rep.entries) {
      CHECK(e.delta_lambda[0] <= 1e-6 * rep.base_lambda[0]);
      CHECK(e.sym_diff == Approx(2.0 * e.eps).epsilon(1e-12));
    }
  }

  SECTION("endpoint shift has slope >= 0.5 and bounded modulus ratio") {
    auto eps = std::vector<double>{0.2, 0.1, 0.05, 0.025};
    StabilityReport rep =
        stability_sweep(c, half, 1, eps, PerturbMode::EndpointShift, 0.1);
    int used = 0;
    for (const auto& e : rep.entries) used += e.used_in_fit;
    REQUIRE(used >= 3);
    CHECK(rep.loglog_fit.slope >= 0.5);
    CHECK(rep.constant > 0.0);
    // ratio to the modulus shrinks (or stays bounded) as eps decreases
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& e : rep.entries) {
      if (!e.used_in_fit) continue;
      double ratio = e.delta_lambda[0] / e.modulus;
      CHECK(ratio <= std::max(prev, rep.constant) * (1.0 + 1e-9));
      prev = ratio;
    }
  }

  SECTION("grid must decrease") {
    CHECK_THROWS_AS(
        stability_sweep(c, half, 1, {0.1, 0.2}, PerturbMode::EndpointShift, 0.1),
        Error);
  }
}

TEST_CASE("divergence study basics") {
  DivergenceReport rep = divergence_study({2, 4}, 0.5, 1, 0.3, 0.15);
  REQUIRE(rep.entries.size() == 2);
  CHECK(rep.entries[1].lambda_fine > rep.entries[0].lambda_fine);
  CHECK(rep.entries[0].ratio > 0.0);

  CHECK_THROWS_AS(divergence_study({2, 3}, 0.5, 1, 0.3, 0.15), Error);
  CHECK_THROWS_AS(divergence_study({4, 2}, 0.5, 1, 0.3, 0.15), Error);
  // admissibility: n = 16 features are ~0.196 long, h = 0.3 is too coarse
  CHECK_THROWS_AS(divergence_study({16}, 0.5, 1, 0.3, 0.15), Error);
}

TEST_CASE("divergence study matches a single-arc direct solve at n = 1") {
  auto disk = unit_circle();
  DivergenceReport rep = divergence_study({1}, 0.5, 1, 0.3, 0.15);
  ArcSet single = lgl_sequence(disk, 0.5, 1);
  SpectralResult direct = steklov_dirichlet_eigenvalues(disk, single, 0.15, 1);
  CHECK(rep.entries[0].lambda_fine == Approx(direct.eigenvalues[0]).epsilon(1e-12));
}

TEST_CASE("continuity study with a fixed component count") {
  auto c = unit_circle();
  ArcSet target(c, {{0.0, kPi}});
  std::vector<ArcSet> seq;
  for (double d : {0.4, 0.2, 0.1}) seq.push_back(ArcSet(c, {{0.0, kPi - d}}));

  ContinuityReport rep = continuity_study(c, target, seq, 1, 0.1);
  REQUIRE(rep.entries.size() == 3);
  for (std::size_t i = 0; i + 1 < rep.entries.size(); ++i) {
    CHECK(rep.entries[i + 1].hausdorff_arclength < rep.entries[i].hausdorff_arclength);
    CHECK(rep.entries[i + 1].gap <= rep.entries[i].gap + rep.noise_floor);
  }
  CHECK(rep.gaps_decreasing_within_noise);

  // a constant sequence has a constant (zero-gap) trajectory
  ContinuityReport rep0 = continuity_study(c, target, {target, target}, 1, 0.1);
  for (const auto& e : rep0.entries) {
    CHECK(e.gap == 0.0);
    CHECK(e.sym_diff == 0.0);
  }

  // exploding component count is rejected
  std::vector<ArcSet> bad{lgl_sequence(c, 0.5, 4)};
  CHECK_THROWS_AS(continuity_study(c, target, bad, 1, 0.1), Error);
}
