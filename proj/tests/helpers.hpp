#pragma once

#include "steklov/geometry.hpp"

#include <random>
#include <vector>

namespace testutil {

using namespace steklov;

/// Random canonical ArcSet with `k` components on the given curve, all
/// features (arcs and gaps) at least `min_feature` long.
inline ArcSet random_arcset(std::mt19937_64& rng, CurvePtr curve, int k,
                            double min_feature) {
  double L = curve->total_length();
  // draw 2k gaps/lengths from a Dirichlet-like construction
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<double> w(2 * k);
  double tot = 0.0;
  for (auto& x : w) {
    x = u(rng);
    tot += x;
  }
  double slack = L - 2.0 * k * min_feature;
  std::vector<ArcSet::Interval> iv;
  double pos = std::uniform_real_distribution<double>(0.0, L)(rng);
  for (int i = 0; i < k; ++i) {
    double arc = min_feature + slack * w[2 * i] / tot;
    double gap = min_feature + slack * w[2 * i + 1] / tot;
    iv.push_back({pos, pos + arc});
    pos += arc + gap;
  }
  return ArcSet(curve, iv);
}

/// Brute-force directed Hausdorff via dense sampling of both sets.
inline double sampled_hausdorff(const ClosedArcSet& a, const ClosedArcSet& b,
                                BoundaryMetric metric, int per_unit = 1500) {
  const BoundaryCurve& c = *a.curve();
  double L = c.total_length();
  struct Sample {
    double t;
    Vec2 p;
  };
  auto sample = [&](const ClosedArcSet& s) {
    std::vector<Sample> out;
    for (const auto& iv : s.intervals()) {
      int n = std::max(1, int((iv.b - iv.a) / L * per_unit));
      for (int i = 0; i <= n; ++i) {
        double t = wrap_coordinate(iv.a + (iv.b - iv.a) * i / n, L);
        out.push_back({t, c.point(t)});
      }
    }
    return out;
  };
  auto ta = sample(a), tb = sample(b);
  bool arc = metric == BoundaryMetric::Arclength;
  auto directed = [&](const std::vector<Sample>& A, const std::vector<Sample>& B) {
    double best = 0.0;
    for (const auto& x : A) {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& y : B)
        d = std::min(d, arc ? cyclic_distance(x.t, y.t, L) : (x.p - y.p).norm());
      best = std::max(best, d);
    }
    return best;
  };
  return std::max(directed(ta, tb), directed(tb, ta));
}

}  // namespace testutil
