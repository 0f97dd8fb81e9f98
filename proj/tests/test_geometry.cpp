#include "steklov/geometry.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <random>

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

}  // namespace

TEST_CASE("curve basics") {
  auto circ = unit_circle();
  CHECK(circ->total_length() == Approx(2.0 * kPi).epsilon(1e-14));
  CHECK((circ->point(0.0) - Vec2{1.0, 0.0}).norm() < 1e-14);
  CHECK((circ->point(kPi) - Vec2{-1.0, 0.0}).norm() < 1e-14);

  auto sq = unit_square();
  CHECK(sq->total_length() == Approx(4.0));
  CHECK((sq->point(1.5) - Vec2{1.0, 0.5}).norm() < 1e-14);
  CHECK(sq->corner_params() == std::vector<double>{0.0, 1.0, 2.0, 3.0});

  CHECK_THROWS_AS(BoundaryCurve::circle(0.0), Error);
  CHECK_THROWS_AS(BoundaryCurve::polygon({{0, 0}, {1, 0}}), Error);
  // clockwise square
  CHECK_THROWS_AS(
      BoundaryCurve::polygon({{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, 0.0}}),
      Error);
  // bow tie
  CHECK_THROWS_AS(
      BoundaryCurve::polygon({{0.0, 0.0}, {1.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}}),
      Error);
}

TEST_CASE("star curve arclength parametrization") {
  auto star = std::make_shared<BoundaryCurve>(
      BoundaryCurve::star({0.0, 0.0}, {1.0, 0.0, 0.0, 0.2}, {}));
  double L = star->total_length();
  CHECK(L > 2.0 * kPi);  // wiggly curve is longer than the unit circle

  // 1-Lipschitz point map and locally isometric parametrization
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, L);
  for (int i = 0; i < 200; ++i) {
    double s1 = u(rng), s2 = u(rng);
    double chord = (star->point(s1) - star->point(s2)).norm();
    CHECK(chord <= cyclic_distance(s1, s2, L) + 1e-9);
  }
  for (int i = 0; i < 50; ++i) {
    double s = u(rng), ds = 1e-5;
    double chord = (star->point(s + ds) - star->point(s)).norm();
    CHECK(chord == Approx(ds).epsilon(1e-5));
  }

  // pure circle as a star
  auto circ = BoundaryCurve::star({0.0, 0.0}, {2.0}, {});
  CHECK(circ.total_length() == Approx(4.0 * kPi).epsilon(1e-12));

  CHECK_THROWS_AS(BoundaryCurve::star({0, 0}, {0.1, 0.5}, {}), Error);
}

TEST_CASE("arcset canonicalization") {
  auto c = unit_circle();
  double L = c->total_length();

  SECTION("merges abutting and overlapping intervals") {
    ArcSet s(c, {{0.0, 1.0}, {1.0, 2.0}});
    CHECK(s.intervals().size() == 1);
    CHECK(s.intervals()[0] == ArcSet::Interval{0.0, 2.0});

    ArcSet t(c, {{0.5, 1.5}, {1.0, 2.0}});
    CHECK(t.intervals().size() == 1);
    CHECK(measure(t) == Approx(1.5));
  }

  SECTION("wrapping interval is canonical") {
    ArcSet s(c, {{L - 0.5, L + 0.5}});
    REQUIRE(s.intervals().size() == 1);
    CHECK(s.intervals()[0].a == Approx(L - 0.5));
    CHECK(s.intervals()[0].b == Approx(L + 0.5));
    CHECK(s.contains(0.1));
    CHECK(s.contains(L - 0.1));
    CHECK_FALSE(s.contains(1.0));

    // same set entered as two pieces across the origin
    ArcSet t(c, {{0.0, 0.5}, {L - 0.5, L}});
    CHECK(s == t);
  }

  SECTION("point-set equality is field-wise equality") {
    ArcSet a(c, {{0.2, 1.0}, {2.0, 3.0}});
    ArcSet b(c, {{2.0, 3.0}, {0.2, 0.7}, {0.5, 1.0}});
    CHECK(a == b);
  }

  SECTION("rejects degenerate and full-cover inputs") {
    CHECK_THROWS_AS(ArcSet(c, {{1.0, 1.0}}), Error);
    CHECK_THROWS_AS(ArcSet(c, {{2.0, 1.0}}), Error);
    CHECK_THROWS_AS(ArcSet(c, {{0.0, L}}), Error);
    CHECK_THROWS_AS(ArcSet(c, {{0.0, 4.0}, {3.0, L}}), Error);
  }

  SECTION("idempotence on random soups") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, L);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<ArcSet::Interval> soup;
      int n = 1 + int(rng() % 4);
      for (int i = 0; i < n; ++i) {
        double a = u(rng);
        double len = 0.01 + 0.2 * u(rng);
        soup.push_back({a, a + len});
      }
      ArcSet s(c, soup);
      ArcSet again(c, s.intervals());
      CHECK(s == again);
    }
  }
}

TEST_CASE("measure") {
  auto c = unit_circle();
  CHECK(measure(ArcSet(c, {{0.0, kPi}})) == Approx(kPi));
  CHECK(measure(ArcSet::empty(c)) == 0.0);
  // two alternating arcs of length pi/2 each
  CHECK(measure(lgl_sequence(c, 0.5, 2)) == Approx(kPi));
}

TEST_CASE("complement") {
  auto c = unit_circle();
  double L = c->total_length();

  ArcSet s(c, {{0.0, kPi}});
  ClosedArcSet d = complement(s);
  REQUIRE(d.intervals().size() == 1);
  CHECK(d.intervals()[0].a == Approx(kPi));
  CHECK(d.intervals()[0].b == Approx(L));
  CHECK(d.contains(0.0));  // endpoint of the open arc belongs to the complement
  CHECK(d.contains(kPi));
  CHECK_FALSE(d.contains(1.0));
  CHECK(measure(s) + measure(d) == Approx(L));

  CHECK(complement(ArcSet::empty(c)).is_full());

  ArcSet two(c, {{0.0, 1.0}, {2.0, 3.0}});
  CHECK(component_count(complement(two)) == 2);

  // complement round trips measure on random sets
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    auto a = testutil::random_arcset(rng, c, 1 + int(rng() % 3), 0.1);
    CHECK(measure(a) + measure(complement(a)) == Approx(L).epsilon(1e-12));
  }
}

TEST_CASE("symmetric difference measure") {
  auto c = unit_circle();
  ArcSet a(c, {{0.0, kPi}});
  CHECK(symmetric_difference_measure(a, a) == 0.0);

  double eps = 0.3;
  ArcSet b(c, {{eps, kPi + eps}});
  CHECK(symmetric_difference_measure(a, b) == Approx(2.0 * eps));

  ArcSet p(c, {{0.0, 1.0}}), q(c, {{2.0, 3.0}});
  CHECK(symmetric_difference_measure(p, q) == Approx(2.0));

  auto other = unit_square();
  ArcSet r(other, {{0.0, 1.0}});
  CHECK_THROWS_AS(symmetric_difference_measure(p, r), Error);
}

TEST_CASE("component count") {
  auto c = unit_circle();
  CHECK(component_count(ArcSet(c, {{0.0, 1.0}})) == 1);
  CHECK(component_count(ArcSet::empty(c)) == 0);
  CHECK(component_count(lgl_sequence(c, 0.5, 4)) == 4);
}

TEST_CASE("lgl sequence") {
  auto c = unit_circle();

  SECTION("n = 2, m = 1/2 gives two quarter arcs") {
    ArcSet s = lgl_sequence(c, 0.5, 2);
    REQUIRE(s.intervals().size() == 2);
    CHECK(s.intervals()[0].a == Approx(0.0));
    CHECK(s.intervals()[0].b == Approx(kPi / 2.0));
    CHECK(s.intervals()[1].a == Approx(kPi));
    CHECK(s.intervals()[1].b == Approx(1.5 * kPi));
  }

  SECTION("alternating arcs with period L/n") {
    // each arc (2k) * 2pi/(2n) .. (2k+1) * 2pi/(2n) for the doubled count
    for (int n : {1, 2, 4, 8}) {
      ArcSet s = lgl_sequence(c, 0.5, n);
      CHECK(component_count(s) == n);
      CHECK(measure(s) == Approx(kPi).epsilon(1e-12));
      double cell = 2.0 * kPi / n;
      for (int i = 0; i < n; ++i) {
        CHECK(s.intervals()[i].a == Approx(i * cell).margin(1e-13));
        CHECK(s.intervals()[i].b == Approx(i * cell + 0.5 * cell).margin(1e-13));
      }
    }
  }

  SECTION("single arc") {
    ArcSet s = lgl_sequence(c, 0.37, 1);
    REQUIRE(s.intervals().size() == 1);
    CHECK(measure(s) == Approx(0.37 * 2.0 * kPi));
  }

  SECTION("measure is exact for any m, n") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int i = 0; i < 30; ++i) {
      double m = u(rng);
      int n = 1 + int(rng() % 16);
      ArcSet s = lgl_sequence(c, m, n);
      CHECK(measure(s) == Approx(m * 2.0 * kPi).epsilon(1e-12));
      CHECK(component_count(s) == n);
    }
  }

  SECTION("weak-* convergence of the indicator, order >= 0.9") {
    // test density f(s) = 1 + |sin(s/2 + 0.3)|; a trig polynomial (or a kink
    // phase-aligned with the arc grid) would alias to an exactly zero error
    auto G = [](double u) {  // antiderivative of |sin u|
      double k = std::floor(u / kPi);
      return 2.0 * k + 1.0 - std::cos(u - k * kPi);
    };
    auto F = [&](double s) { return s + 2.0 * G(s / 2.0 + 0.3); };
    double m = 0.4;
    double exact = m * (F(2.0 * kPi) - F(0.0));
    std::vector<double> ns, errs;
    for (int n : {4, 8, 16, 32, 64, 128}) {
      ArcSet s = lgl_sequence(unit_circle(), m, n);
      double integral = 0.0;
      for (const auto& iv : s.intervals()) integral += F(iv.b) - F(iv.a);
      ns.push_back(std::log(double(n)));
      errs.push_back(std::log(std::abs(integral - exact)));
    }
    // least-squares slope of log err vs log n
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t k = ns.size();
    for (std::size_t i = 0; i < k; ++i) {
      sx += ns[i];
      sy += errs[i];
      sxx += ns[i] * ns[i];
      sxy += ns[i] * errs[i];
    }
    double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    CHECK(-slope >= 0.9);
  }

  CHECK_THROWS_AS(lgl_sequence(c, 0.0, 4), Error);
  CHECK_THROWS_AS(lgl_sequence(c, 1.0, 4), Error);
  CHECK_THROWS_AS(lgl_sequence(c, 0.5, 0), Error);
}

TEST_CASE("perturb endpoints") {
  auto c = unit_circle();
  ArcSet s(c, {{0.0, kPi}});

  CHECK(perturb_endpoints(s, {0.0, 0.0}) == s);

  double eps = 0.05;
  ArcSet grown = perturb_endpoints(s, {0.0, eps});
  CHECK(symmetric_difference_measure(s, grown) == Approx(eps));
  CHECK(grown.intervals()[0].b == Approx(kPi + eps));

  ArcSet two(c, {{0.0, 1.0}, {2.0, 3.0}});
  // push the first arc into the second
  CHECK_THROWS_AS(perturb_endpoints(two, {0.0, 1.5, 0.0, 0.0}), Error);
  // collapse an interval
  CHECK_THROWS_AS(perturb_endpoints(two, {0.6, -0.6, 0.0, 0.0}), Error);
  // wrong delta count
  CHECK_THROWS_AS(perturb_endpoints(two, {0.0, 0.0}), Error);

  // sum-of-deltas identity on random sets
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    auto a = testutil::random_arcset(rng, c, 2, 0.4);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    std::vector<double> d(4);
    double expect = 0.0;
    for (auto& x : d) {
      x = u(rng);
      expect += std::abs(x);
    }
    ArcSet b = perturb_endpoints(a, d);
    CHECK(symmetric_difference_measure(a, b) == Approx(expect).margin(1e-12));
  }
}

TEST_CASE("is_subset") {
  auto c = unit_circle();
  ArcSet a(c, {{0.0, 1.0}});
  CHECK(is_subset(a, a));
  CHECK(is_subset(a, ArcSet(c, {{0.0, 2.0}})));
  CHECK_FALSE(is_subset(a, ArcSet(c, {{0.5, 2.0}})));

  // wrap-aware containment
  double L = c->total_length();
  ArcSet wrapped(c, {{L - 0.5, L + 0.5}});
  ArcSet inner(c, {{L - 0.2, L + 0.1}});
  CHECK(is_subset(inner, wrapped));
  CHECK_FALSE(is_subset(wrapped, inner));
  CHECK(is_subset(ArcSet::empty(c), a));
}

TEST_CASE("hausdorff distance on the circle") {
  auto c = unit_circle();
  double L = c->total_length();

  SECTION("identical sets") {
    auto d = complement(ArcSet(c, {{0.0, kPi}}));
    CHECK(hausdorff_distance(d, d, BoundaryMetric::Euclidean) == 0.0);
    CHECK(hausdorff_distance(d, d, BoundaryMetric::Arclength) == 0.0);
  }

  SECTION("endpoint shift of the Dirichlet arc") {
    double eps = 0.2;
    auto gd = complement(ArcSet(c, {{0.0, kPi}}));
    auto gd2 = complement(ArcSet(c, {{0.0, kPi + eps}}));
    double da = hausdorff_distance(gd, gd2, BoundaryMetric::Arclength);
    double de = hausdorff_distance(gd, gd2, BoundaryMetric::Euclidean);
    CHECK(da == Approx(eps).epsilon(1e-12));
    CHECK(de == Approx(2.0 * std::sin(eps / 2.0)).epsilon(1e-12));
    // dense-sampling oracle agrees
    CHECK(testutil::sampled_hausdorff(gd, gd2, BoundaryMetric::Arclength) ==
          Approx(da).margin(6e-3));
    CHECK(testutil::sampled_hausdorff(gd, gd2, BoundaryMetric::Euclidean) ==
          Approx(de).margin(6e-3));
  }

  SECTION("two antipodal points") {
    ClosedArcSet p1(c, {{0.0, 0.0}});
    ClosedArcSet p2(c, {{kPi, kPi}});
    CHECK(hausdorff_distance(p1, p2, BoundaryMetric::Euclidean) == Approx(2.0));
    CHECK(hausdorff_distance(p1, p2, BoundaryMetric::Arclength) == Approx(kPi));
  }

  SECTION("empty operand rejected") {
    ClosedArcSet e(c, {});
    ClosedArcSet p(c, {{0.0, 1.0}});
    CHECK_THROWS_AS(hausdorff_distance(e, p, BoundaryMetric::Euclidean), Error);
    CHECK_THROWS_AS(hausdorff_distance(p, e, BoundaryMetric::Arclength), Error);
  }

  SECTION("matches dense sampling oracle on random pairs") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 25; ++i) {
      auto a = complement(testutil::random_arcset(rng, c, 1 + int(rng() % 3), 0.15));
      auto b = complement(testutil::random_arcset(rng, c, 1 + int(rng() % 3), 0.15));
      for (auto metric : {BoundaryMetric::Arclength, BoundaryMetric::Euclidean}) {
        double exact = hausdorff_distance(a, b, metric);
        double approx = testutil::sampled_hausdorff(a, b, metric);
        CHECK(exact == Approx(approx).margin(6e-3));
        CHECK(exact >= approx - 1e-12);  // sampling can only shrink the sup
      }
    }
  }

  (void)L;
}

TEST_CASE("hausdorff distance on polygons is exact") {
  auto sq = unit_square();

  // top edge vs bottom edge of the unit square: every point of one is at
  // distance exactly 1 from the other (opposite side), so H = 1
  ClosedArcSet top(sq, {{1.0, 2.0}});
  ClosedArcSet bottom(sq, {{3.0, 4.0}});
  // arclength [1,2] is the right edge; use explicit edges instead
  ClosedArcSet right(sq, {{1.0, 2.0}});
  ClosedArcSet left(sq, {{3.0, 4.0}});
  CHECK(hausdorff_distance(right, left, BoundaryMetric::Euclidean) == Approx(1.0));
  // along the perimeter the worst point is an edge midpoint, 1.5 from the
  // nearer endpoint of the opposite edge
  CHECK(hausdorff_distance(right, left, BoundaryMetric::Arclength) == Approx(1.5));

  // single corner point vs opposite corner point
  ClosedArcSet c0(sq, {{0.0, 0.0}});
  ClosedArcSet c2(sq, {{2.0, 2.0}});
  CHECK(hausdorff_distance(c0, c2, BoundaryMetric::Euclidean) ==
        Approx(std::sqrt(2.0)));

  // interior peak case: two points near the ends of the bottom edge vs the
  // whole bottom edge; the far set is the pair, max distance from the edge
  // midpoint to the nearest point
  ClosedArcSet edge(sq, {{0.0, 1.0}});
  ClosedArcSet pair(sq, {{0.1, 0.1}, {0.9, 0.9}});
  double exact = hausdorff_distance(edge, pair, BoundaryMetric::Euclidean);
  CHECK(exact == Approx(0.4));  // midpoint 0.5 to nearest of {0.1, 0.9}

  // oracle comparison on random same-curve pairs
  std::mt19937_64 rng(23);
  for (int i = 0; i < 15; ++i) {
    auto a = complement(testutil::random_arcset(rng, sq, 1 + int(rng() % 2), 0.2));
    auto b = complement(testutil::random_arcset(rng, sq, 1 + int(rng() % 2), 0.2));
    for (auto metric : {BoundaryMetric::Arclength, BoundaryMetric::Euclidean}) {
      double ex = hausdorff_distance(a, b, metric);
      double ap = testutil::sampled_hausdorff(a, b, metric);
      CHECK(ex == Approx(ap).margin(6e-3));
      CHECK(ex >= ap - 1e-12);
    }
  }
}

TEST_CASE("hausdorff distance on star curves via sampling") {
  auto star = std::make_shared<BoundaryCurve>(
      BoundaryCurve::star({0.0, 0.0}, {1.0, 0.0, 0.15}, {}));
  std::mt19937_64 rng(31);
  auto a = complement(testutil::random_arcset(rng, star, 2, 0.3));
  auto b = complement(testutil::random_arcset(rng, star, 2, 0.3));
  double de = hausdorff_distance(a, b, BoundaryMetric::Euclidean);
  double oracle = testutil::sampled_hausdorff(a, b, BoundaryMetric::Euclidean);
  CHECK(de == Approx(oracle).margin(6e-3));
}

TEST_CASE("metric axioms and dominations") {
  auto c = unit_circle();
  std::mt19937_64 rng(101);

  for (int i = 0; i < 40; ++i) {
    auto sa = testutil::random_arcset(rng, c, 1 + int(rng() % 3), 0.15);
    auto sb = testutil::random_arcset(rng, c, 1 + int(rng() % 3), 0.15);
    auto sc = testutil::random_arcset(rng, c, 1 + int(rng() % 3), 0.15);
    auto a = complement(sa), b = complement(sb), cc = complement(sc);

    // symmetric difference: metric axioms
    double dab = symmetric_difference_measure(sa, sb);
    double dba = symmetric_difference_measure(sb, sa);
    double dac = symmetric_difference_measure(sa, sc);
    double dcb = symmetric_difference_measure(sc, sb);
    CHECK(dab == Approx(dba).margin(1e-12));
    CHECK(dab >= 0.0);
    CHECK((dab == 0.0) == (sa == sb));
    CHECK(dab <= dac + dcb + 1e-12);

    for (auto metric : {BoundaryMetric::Arclength, BoundaryMetric::Euclidean}) {
      double hab = hausdorff_distance(a, b, metric);
      double hba = hausdorff_distance(b, a, metric);
      double hac = hausdorff_distance(a, cc, metric);
      double hcb = hausdorff_distance(cc, b, metric);
      CHECK(hab == Approx(hba).margin(1e-12));
      CHECK(hab >= 0.0);
      if (a == b) CHECK(hab == 0.0);
      if (hab == 0.0) CHECK(symmetric_difference_measure(a, b) < 1e-12);
      CHECK(hab <= hac + hcb + 1e-12);
    }

    // euclidean never exceeds arclength
    CHECK(hausdorff_distance(a, b, BoundaryMetric::Euclidean) <=
          hausdorff_distance(a, b, BoundaryMetric::Arclength) + 1e-12);
  }
}

TEST_CASE("arclength hausdorff bounded by symmetric difference for matched complements") {
  // complements of endpoint-perturbed sets keep the component structure;
  // for those the length-metric Hausdorff distance never exceeds the
  // symmetric-difference measure
  auto c = unit_circle();
  std::mt19937_64 rng(202);
  for (int i = 0; i < 40; ++i) {
    int k = 1 + int(rng() % 3);
    auto base = testutil::random_arcset(rng, c, k, 0.4);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    std::vector<double> d(2 * k);
    for (auto& x : d) x = u(rng);
    auto moved = perturb_endpoints(base, d);
    auto gd = complement(base), gd2 = complement(moved);
    REQUIRE(component_count(gd) == component_count(gd2));
    double h = hausdorff_distance(gd, gd2, BoundaryMetric::Arclength);
    double sd = symmetric_difference_measure(gd, gd2);
    CHECK(h <= sd + 1e-12);
  }
}
