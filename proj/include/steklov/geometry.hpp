#pragma once

#include "steklov/common.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

namespace steklov {

enum class CurveKind { Circle, Polygon, Star };

/// A simple closed Lipschitz curve in the plane, parametrized by absolute
/// arclength s in [0, total_length). Three shapes are supported:
///   - circle of given radius centered at the origin,
///   - simple positively-oriented polygon,
///   - star-shaped curve r(t) = c0 + sum_j (a_j cos jt + b_j sin jt) about a
///     center, with strictly positive radius.
/// The point map is 1-Lipschitz in the arclength coordinate.
class BoundaryCurve {
public:
  static BoundaryCurve circle(double radius) {
    if (!(radius > 0.0)) throw Error("circle radius must be positive");
    BoundaryCurve c;
    c.kind_ = CurveKind::Circle;
    c.radius_ = radius;
    c.length_ = 2.0 * kPi * radius;
    return c;
  }

  static BoundaryCurve polygon(std::vector<Vec2> vertices) {
    if (vertices.size() < 3) throw Error("polygon needs at least 3 vertices");
    BoundaryCurve c;
    c.kind_ = CurveKind::Polygon;
    c.vertices_ = std::move(vertices);
    c.init_polygon();
    return c;
  }

  /// cos_coeffs = {c0, a1, a2, ...}, sin_coeffs = {b1, b2, ...}.
  static BoundaryCurve star(const Vec2& center, std::vector<double> cos_coeffs,
                            std::vector<double> sin_coeffs) {
    if (cos_coeffs.empty()) throw Error("star radius needs a constant term");
    BoundaryCurve c;
    c.kind_ = CurveKind::Star;
    c.center_ = center;
    c.cos_coeffs_ = std::move(cos_coeffs);
    c.sin_coeffs_ = std::move(sin_coeffs);
    c.init_star();
    return c;
  }

  CurveKind kind() const { return kind_; }
  double total_length() const { return length_; }

  /// Point at absolute arclength s (wrapped into [0, length)).
  Vec2 point(double s) const {
    s = wrap_coordinate(s, length_);
    switch (kind_) {
      case CurveKind::Circle: {
        double t = s / radius_;
        return {radius_ * std::cos(t), radius_ * std::sin(t)};
      }
      case CurveKind::Polygon: {
        std::size_t e = polygon_edge_index(s);
        double local = s - cumlen_[e];
        Vec2 d = vertices_[(e + 1) % vertices_.size()] - vertices_[e];
        return vertices_[e] + (local / edge_len_[e]) * d;
      }
      case CurveKind::Star: {
        double theta = star_angle_at(s);
        double r = star_radius(theta);
        return center_ + Vec2{r * std::cos(theta), r * std::sin(theta)};
      }
    }
    throw Error("unreachable");
  }

  /// Unit tangent in the direction of increasing s; at a polygon corner this
  /// is the right limit (direction of the outgoing edge).
  Vec2 forward_tangent(double s) const {
    s = wrap_coordinate(s, length_);
    switch (kind_) {
      case CurveKind::Circle: {
        double t = s / radius_;
        return {-std::sin(t), std::cos(t)};
      }
      case CurveKind::Polygon: {
        std::size_t e = polygon_edge_index(s);
        Vec2 d = vertices_[(e + 1) % vertices_.size()] - vertices_[e];
        return d / edge_len_[e];
      }
      case CurveKind::Star: {
        double theta = star_angle_at(s);
        return star_velocity(theta).normalized();
      }
    }
    throw Error("unreachable");
  }

  /// Unit tangent as the left limit at s (incoming edge at a corner).
  Vec2 backward_tangent(double s) const {
    s = wrap_coordinate(s, length_);
    if (kind_ != CurveKind::Polygon) return forward_tangent(s);
    // step just behind s so a corner resolves to the incoming edge
    std::size_t n = vertices_.size();
    std::size_t e = polygon_edge_index(s);
    if (s - cumlen_[e] < 1e-12 * length_) e = (e + n - 1) % n;
    Vec2 d = vertices_[(e + 1) % n] - vertices_[e];
    return d / edge_len_[e];
  }

  /// Arclength parameters of polygon corners (empty for smooth curves).
  std::vector<double> corner_params() const {
    if (kind_ != CurveKind::Polygon) return {};
    return std::vector<double>(cumlen_.begin(), cumlen_.end());
  }

  double radius() const { return radius_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const Vec2& star_center() const { return center_; }
  const std::vector<double>& star_cos_coeffs() const { return cos_coeffs_; }
  const std::vector<double>& star_sin_coeffs() const { return sin_coeffs_; }

  bool operator==(const BoundaryCurve& o) const {
    if (kind_ != o.kind_) return false;
    switch (kind_) {
      case CurveKind::Circle:
        return radius_ == o.radius_;
      case CurveKind::Polygon:
        return vertices_.size() == o.vertices_.size() &&
               std::equal(vertices_.begin(), vertices_.end(),
                          o.vertices_.begin());
      case CurveKind::Star:
        return center_ == o.center_ && cos_coeffs_ == o.cos_coeffs_ &&
               sin_coeffs_ == o.sin_coeffs_;
    }
    return false;
  }
  bool operator!=(const BoundaryCurve& o) const { return !(*this == o); }

private:
  BoundaryCurve() = default;

  void init_polygon() {
    std::size_t n = vertices_.size();
    edge_len_.resize(n);
    cumlen_.resize(n);
    double acc = 0.0;
    double area2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& p = vertices_[i];
      const Vec2& q = vertices_[(i + 1) % n];
      double len = (q - p).norm();
      if (!(len > 0.0)) throw Error("polygon has a zero-length edge");
      cumlen_[i] = acc;
      edge_len_[i] = len;
      acc += len;
      area2 += p.x() * q.y() - q.x() * p.y();
    }
    length_ = acc;
    if (!(area2 > 0.0))
      throw Error("polygon must be positively oriented (counterclockwise)");
    // simplicity: non-adjacent edges must not intersect
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (j == i + 1 || (i == 0 && j == n - 1)) continue;
        if (segments_intersect(vertices_[i], vertices_[(i + 1) % n],
                               vertices_[j], vertices_[(j + 1) % n]))
          throw Error("polygon is self-intersecting");
      }
    }
  }

  static bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c,
                                 const Vec2& d) {
    auto cross = [](const Vec2& u, const Vec2& v) {
      return u.x() * v.y() - u.y() * v.x();
    };
    double d1 = cross(b - a, c - a);
    double d2 = cross(b - a, d - a);
    double d3 = cross(d - c, a - c);
    double d4 = cross(d - c, b - c);
    if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return true;
    auto on = [&](const Vec2& p, const Vec2& q, const Vec2& r) {
      return cross(q - p, r - p) == 0.0 &&
             std::min(p.x(), q.x()) <= r.x() && r.x() <= std::max(p.x(), q.x()) &&
             std::min(p.y(), q.y()) <= r.y() && r.y() <= std::max(p.y(), q.y());
    };
    return on(a, b, c) || on(a, b, d) || on(c, d, a) || on(c, d, b);
  }

  std::size_t polygon_edge_index(double s) const {
    auto it = std::upper_bound(cumlen_.begin(), cumlen_.end(), s);
    std::size_t e = static_cast<std::size_t>(it - cumlen_.begin());
    return (e == 0) ? 0 : e - 1;
  }

  double star_radius(double theta) const {
    double r = cos_coeffs_[0];
    for (std::size_t j = 1; j < cos_coeffs_.size(); ++j)
      r += cos_coeffs_[j] * std::cos(double(j) * theta);
    for (std::size_t j = 0; j < sin_coeffs_.size(); ++j)
      r += sin_coeffs_[j] * std::sin(double(j + 1) * theta);
    return r;
  }

  double star_radius_deriv(double theta) const {
    double d = 0.0;
    for (std::size_t j = 1; j < cos_coeffs_.size(); ++j)
      d -= double(j) * cos_coeffs_[j] * std::sin(double(j) * theta);
    for (std::size_t j = 0; j < sin_coeffs_.size(); ++j)
      d += double(j + 1) * sin_coeffs_[j] * std::cos(double(j + 1) * theta);
    return d;
  }

  Vec2 star_velocity(double theta) const {
    double r = star_radius(theta);
    double dr = star_radius_deriv(theta);
    double ct = std::cos(theta), st = std::sin(theta);
    return {dr * ct - r * st, dr * st + r * ct};
  }

  double star_speed(double theta) const { return star_velocity(theta).norm(); }

  // 5-point Gauss-Legendre on [t0, t1]
  double star_arc_integral(double t0, double t1) const {
    static const double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
    static const double wg[5] = {0.2369268850561891, 0.4786286704993665,
                                 0.5688888888888889, 0.4786286704993665,
                                 0.2369268850561891};
    double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) acc += wg[i] * star_speed(mid + half * xg[i]);
    return acc * half;
  }

  void init_star() {
    const int table_n = 4096;
    double rmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4 * table_n; ++i)
      rmin = std::min(rmin, star_radius(2.0 * kPi * i / (4 * table_n)));
    if (!(rmin > 0.0))
      throw Error("star radius function must be strictly positive");
    star_theta_.resize(table_n + 1);
    star_s_.resize(table_n + 1);
    star_s_[0] = 0.0;
    for (int i = 0; i <= table_n; ++i)
      star_theta_[i] = 2.0 * kPi * i / table_n;
    for (int i = 0; i < table_n; ++i)
      star_s_[i + 1] = star_s_[i] + star_arc_integral(star_theta_[i], star_theta_[i + 1]);
    length_ = star_s_.back();
    // cross-check the quadrature with a half-step table
    double l2 = 0.0;
    for (int i = 0; i < table_n; ++i) {
      double tm = 0.5 * (star_theta_[i] + star_theta_[i + 1]);
      l2 += star_arc_integral(star_theta_[i], tm) + star_arc_integral(tm, star_theta_[i + 1]);
    }
    if (std::abs(l2 - length_) > 1e-10 * length_)
      throw Error("star arclength quadrature failed to converge");
    length_ = l2;
    // rebuild the table at the doubled accuracy so point() is consistent
    double acc = 0.0;
    for (int i = 0; i < table_n; ++i) {
      star_s_[i] = acc;
      double tm = 0.5 * (star_theta_[i] + star_theta_[i + 1]);
      acc += star_arc_integral(star_theta_[i], tm) + star_arc_integral(tm, star_theta_[i + 1]);
    }
    star_s_[table_n] = acc;
    length_ = acc;
  }

  double star_angle_at(double s) const {
    auto it = std::upper_bound(star_s_.begin(), star_s_.end(), s);
    std::size_t i = static_cast<std::size_t>(it - star_s_.begin());
    i = (i == 0) ? 0 : i - 1;
    if (i >= star_theta_.size() - 1) i = star_theta_.size() - 2;
    double target = s - star_s_[i];
    double seg = star_s_[i + 1] - star_s_[i];
    double theta = star_theta_[i] + (star_theta_[i + 1] - star_theta_[i]) * (target / seg);
    for (int iter = 0; iter < 6; ++iter) {
      double g = star_arc_integral(star_theta_[i], theta) - target;
      if (std::abs(g) <= 1e-13 * length_) break;
      theta -= g / star_speed(theta);
    }
    return theta;
  }

  CurveKind kind_ = CurveKind::Circle;
  double length_ = 0.0;
  double radius_ = 0.0;
  std::vector<Vec2> vertices_;
  std::vector<double> edge_len_, cumlen_;
  Vec2 center_ = Vec2::Zero();
  std::vector<double> cos_coeffs_, sin_coeffs_;
  std::vector<double> star_theta_, star_s_;
};

using CurvePtr = std::shared_ptr<const BoundaryCurve>;

namespace detail {

struct Piece {
  double a, b;  // linear (non-cyclic) sub-interval of [0, L)
};

// Decompose cyclic intervals (last one may extend past L) into linear pieces.
inline std::vector<Piece> to_linear_pieces(const std::vector<std::pair<double, double>>& iv,
                                           double L) {
  std::vector<Piece> out;
  for (auto [a, b] : iv) {
    if (b <= L) {
      out.push_back({a, b});
    } else {
      out.push_back({a, L});
      out.push_back({0.0, b - L});
    }
  }
  std::sort(out.begin(), out.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
  return out;
}

}  // namespace detail

class ClosedArcSet;

/// Canonical disjoint union of half-open boundary arcs [a, b) in absolute
/// arclength, interpreted cyclically. Canonical form: intervals sorted by
/// start, pairwise disjoint and never abutting; at most the last interval
/// wraps past the curve origin and is stored with b > total_length. The
/// complement always has positive measure.
class ArcSet {
public:
  struct Interval {
    double a, b;
    double length() const { return b - a; }
    bool operator==(const Interval& o) const { return a == o.a && b == o.b; }
  };

  ArcSet(CurvePtr curve, const std::vector<Interval>& raw) : curve_(std::move(curve)) {
    if (!curve_) throw Error("arc set needs a curve");
    normalize(raw);
  }

  static ArcSet empty(CurvePtr curve) { return ArcSet(std::move(curve), {}); }

  const CurvePtr& curve() const { return curve_; }
  const std::vector<Interval>& intervals() const { return intervals_; }
  double total_length() const { return curve_->total_length(); }
  bool is_empty() const { return intervals_.empty(); }

  bool operator==(const ArcSet& o) const {
    return *curve_ == *o.curve_ && intervals_ == o.intervals_;
  }
  bool operator!=(const ArcSet& o) const { return !(*this == o); }

  /// True iff the wrapped coordinate t lies strictly inside one of the arcs.
  bool contains_open(double t) const {
    double L = total_length();
    t = wrap_coordinate(t, L);
    for (const auto& iv : intervals_) {
      if (t > iv.a && t < iv.b) return true;
      if (t + L > iv.a && t + L < iv.b) return true;
    }
    return false;
  }

  /// Membership in the half-open union (the measure-theoretic set).
  bool contains(double t) const {
    double L = total_length();
    t = wrap_coordinate(t, L);
    for (const auto& iv : intervals_) {
      if (t >= iv.a && t < iv.b) return true;
      if (t + L >= iv.a && t + L < iv.b) return true;
    }
    return false;
  }

  /// Sorted arc endpoints, wrapped into [0, L).
  std::vector<double> endpoint_params() const {
    double L = total_length();
    std::vector<double> out;
    for (const auto& iv : intervals_) {
      out.push_back(wrap_coordinate(iv.a, L));
      out.push_back(wrap_coordinate(iv.b, L));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

private:
  void normalize(const std::vector<Interval>& raw) {
    double L = curve_->total_length();
    std::vector<std::pair<double, double>> segs;
    for (const auto& iv : raw) {
      double len = iv.b - iv.a;
      if (!(len > 0.0)) throw Error("arc interval must have positive length");
      if (len >= L) throw Error("arc interval covers the whole boundary");
      double a = wrap_coordinate(iv.a, L);
      segs.emplace_back(a, a + len);
    }
    auto pieces = detail::to_linear_pieces(segs, L);
    // merge overlapping or abutting pieces
    std::vector<detail::Piece> merged;
    for (const auto& p : pieces) {
      if (!merged.empty() && p.a <= merged.back().b)
        merged.back().b = std::max(merged.back().b, p.b);
      else
        merged.push_back(p);
    }
    // cyclic join across the origin
    intervals_.clear();
    if (merged.empty()) return;
    if (merged.size() >= 2 && merged.front().a == 0.0 && merged.back().b == L) {
      double head = merged.front().b;
      merged.erase(merged.begin());
      merged.back().b = L + head;
    } else if (merged.size() == 1 && merged.front().a == 0.0 && merged.front().b == L) {
      throw Error("arc set covers the whole boundary");
    }
    double total = 0.0;
    for (const auto& p : merged) {
      intervals_.push_back({p.a, p.b});
      total += p.b - p.a;
    }
    if (!(total < L))
      throw Error("arc set must leave a complement of positive measure");
  }

  CurvePtr curve_;
  std::vector<Interval> intervals_;
};

/// Closed union of boundary arcs [a, b] (possibly degenerate points),
/// canonical in the same cyclic sense as ArcSet; merging also happens when
/// two closed arcs merely touch. A set covering the whole curve is stored
/// as the single interval [0, L].
class ClosedArcSet {
public:
  struct Interval {
    double a, b;  // a <= b; degenerate point when a == b
    bool operator==(const Interval& o) const { return a == o.a && b == o.b; }
  };

  ClosedArcSet(CurvePtr curve, const std::vector<Interval>& raw)
      : curve_(std::move(curve)) {
    if (!curve_) throw Error("arc set needs a curve");
    normalize(raw);
  }

  static ClosedArcSet full(CurvePtr curve) {
    ClosedArcSet s(curve, {Interval{0.0, curve->total_length()}});
    return s;
  }

  const CurvePtr& curve() const { return curve_; }
  const std::vector<Interval>& intervals() const { return intervals_; }
  double total_length() const { return curve_->total_length(); }
  bool is_empty() const { return intervals_.empty(); }
  bool is_full() const {
    return intervals_.size() == 1 && intervals_[0].a == 0.0 &&
           intervals_[0].b == total_length();
  }

  bool operator==(const ClosedArcSet& o) const {
    return *curve_ == *o.curve_ && intervals_ == o.intervals_;
  }

  bool contains(double t) const {
    if (is_full()) return true;
    double L = total_length();
    t = wrap_coordinate(t, L);
    for (const auto& iv : intervals_) {
      if (t >= iv.a && t <= iv.b) return true;
      if (t + L >= iv.a && t + L <= iv.b) return true;
    }
    return false;
  }

private:
  void normalize(const std::vector<Interval>& raw) {
    double L = curve_->total_length();
    std::vector<std::pair<double, double>> segs;
    double covered = 0.0;
    for (const auto& iv : raw) {
      double len = iv.b - iv.a;
      if (len < 0.0) throw Error("closed arc interval has negative length");
      covered += len;
      if (len >= L) {
        intervals_ = {Interval{0.0, L}};
        return;
      }
      double a = wrap_coordinate(iv.a, L);
      segs.emplace_back(a, a + len);
    }
    intervals_.clear();
    if (segs.empty()) return;
    auto pieces = detail::to_linear_pieces(segs, L);
    std::vector<detail::Piece> merged;
    for (const auto& p : pieces) {
      if (!merged.empty() && p.a <= merged.back().b)
        merged.back().b = std::max(merged.back().b, p.b);
      else
        merged.push_back(p);
    }
    if (merged.size() == 1 && merged.front().a == 0.0 && merged.front().b == L) {
      intervals_ = {Interval{0.0, L}};
      return;
    }
    if (merged.size() >= 2 && merged.front().a == 0.0 && merged.back().b == L) {
      double head = merged.front().b;
      merged.erase(merged.begin());
      merged.back().b = L + head;
      if (merged.size() == 1 && merged.front().b - merged.front().a >= L) {
        intervals_ = {Interval{0.0, L}};
        return;
      }
    }
    for (const auto& p : merged) intervals_.push_back({p.a, p.b});
  }

  CurvePtr curve_;
  std::vector<Interval> intervals_;
};

enum class BoundaryMetric { Euclidean, Arclength };

// ---------------------------------------------------------------------------
// Arc-set operations
// ---------------------------------------------------------------------------

/// Total arclength of the arc union.
inline double measure(const ArcSet& s) {
  double m = 0.0;
  for (const auto& iv : s.intervals()) m += iv.length();
  return m;
}

inline double measure(const ClosedArcSet& s) {
  double m = 0.0;
  for (const auto& iv : s.intervals()) m += iv.b - iv.a;
  return m;
}

/// Closed complement: endpoints of the open arcs belong to the complement.
inline ClosedArcSet complement(const ArcSet& s) {
  double L = s.total_length();
  if (s.is_empty()) return ClosedArcSet::full(s.curve());
  const auto& iv = s.intervals();
  std::vector<ClosedArcSet::Interval> gaps;
  for (std::size_t i = 0; i + 1 < iv.size(); ++i)
    gaps.push_back({iv[i].b, iv[i + 1].a});
  const auto& last = iv.back();
  if (last.b > L) {
    gaps.push_back({last.b - L, iv.front().a});
  } else {
    gaps.push_back({last.b, iv.front().a + L});
  }
  return ClosedArcSet(s.curve(), gaps);
}

inline int component_count(const ArcSet& s) {
  return static_cast<int>(s.intervals().size());
}
inline int component_count(const ClosedArcSet& s) {
  return static_cast<int>(s.intervals().size());
}

namespace detail {

inline void require_same_curve(const BoundaryCurve& a, const BoundaryCurve& b) {
  if (!(a == b))
    throw Error("arc sets live on different curves and are incomparable");
}

// Measure of the symmetric difference of two linear piece lists on [0, L).
inline double sym_diff_pieces(const std::vector<Piece>& pa, const std::vector<Piece>& pb) {
  struct Ev {
    double t;
    int da, db;
  };
  std::vector<Ev> ev;
  for (const auto& p : pa) {
    ev.push_back({p.a, +1, 0});
    ev.push_back({p.b, -1, 0});
  }
  for (const auto& p : pb) {
    ev.push_back({p.a, 0, +1});
    ev.push_back({p.b, 0, -1});
  }
  std::sort(ev.begin(), ev.end(), [](const Ev& x, const Ev& y) { return x.t < y.t; });
  double acc = 0.0, prev = 0.0;
  int ina = 0, inb = 0;
  for (const auto& e : ev) {
    if ((ina > 0) != (inb > 0)) acc += e.t - prev;
    prev = e.t;
    ina += e.da;
    inb += e.db;
  }
  return acc;
}

template <typename SetT>
inline std::vector<Piece> linear_pieces_of(const SetT& s) {
  std::vector<std::pair<double, double>> iv;
  for (const auto& i : s.intervals()) iv.emplace_back(i.a, i.b);
  return to_linear_pieces(iv, s.total_length());
}

}  // namespace detail

/// H^1 measure of the symmetric difference, computed by an exact interval
/// sweep. Zero iff the two sets coincide up to a null set.
inline double symmetric_difference_measure(const ArcSet& a, const ArcSet& b) {
  detail::require_same_curve(*a.curve(), *b.curve());
  return detail::sym_diff_pieces(detail::linear_pieces_of(a), detail::linear_pieces_of(b));
}

inline double symmetric_difference_measure(const ClosedArcSet& a, const ClosedArcSet& b) {
  detail::require_same_curve(*a.curve(), *b.curve());
  return detail::sym_diff_pieces(detail::linear_pieces_of(a), detail::linear_pieces_of(b));
}

/// True iff every arc of `a` is covered by a single arc of `b` (cyclically).
inline bool is_subset(const ArcSet& a, const ArcSet& b) {
  detail::require_same_curve(*a.curve(), *b.curve());
  double L = a.total_length();
  for (const auto& ia : a.intervals()) {
    bool covered = false;
    for (const auto& ib : b.intervals()) {
      for (int shift = -1; shift <= 1 && !covered; ++shift) {
        double a0 = ia.a + shift * L, b0 = ia.b + shift * L;
        if (ib.a <= a0 && b0 <= ib.b) covered = true;
      }
      if (covered) break;
    }
    if (!covered) return false;
  }
  return true;
}

/// Shifts every arc endpoint by the given arclength deltas
/// (a_0, b_0, a_1, b_1, ...). Shifts must keep the arcs disjoint with
/// positive lengths and the complement of positive measure.
inline ArcSet perturb_endpoints(const ArcSet& s, const std::vector<double>& deltas) {
  const auto& iv = s.intervals();
  if (deltas.size() != 2 * iv.size())
    throw Error("perturb_endpoints: expected " + std::to_string(2 * iv.size()) +
                " deltas, got " + std::to_string(deltas.size()));
  double L = s.total_length();
  std::vector<ArcSet::Interval> shifted(iv.size());
  double total = 0.0;
  for (std::size_t i = 0; i < iv.size(); ++i) {
    shifted[i].a = iv[i].a + deltas[2 * i];
    shifted[i].b = iv[i].b + deltas[2 * i + 1];
    double len = shifted[i].b - shifted[i].a;
    if (!(len > 0.0))
      throw Error("perturb_endpoints: interval " + std::to_string(i) +
                  " collapsed to non-positive length");
    total += len;
  }
  for (std::size_t i = 0; i < iv.size(); ++i) {
    std::size_t j = (i + 1) % iv.size();
    double gap = (j == 0) ? (shifted[j].a + L - shifted[i].b)
                          : (shifted[j].a - shifted[i].b);
    if (!(gap > 0.0))
      throw Error("perturb_endpoints: intervals " + std::to_string(i) + " and " +
                  std::to_string(j) + " collide");
  }
  if (!(total < L))
    throw Error("perturb_endpoints: complement lost positive measure");
  return ArcSet(s.curve(), shifted);
}

/// n equally spaced arcs of equal length with total measure m * L; the i-th
/// arc starts at i * L / n. The indicator converges weakly-* to the constant
/// density m as n grows.
inline ArcSet lgl_sequence(CurvePtr curve, double m, int n) {
  if (!(m > 0.0 && m < 1.0)) throw Error("lgl_sequence: m must lie in (0,1)");
  if (n < 1) throw Error("lgl_sequence: n must be positive");
  double L = curve->total_length();
  double cell = L / n, arc = m * cell;
  std::vector<ArcSet::Interval> iv;
  iv.reserve(n);
  for (int i = 0; i < n; ++i) iv.push_back({i * cell, i * cell + arc});
  return ArcSet(std::move(curve), iv);
}

// ---------------------------------------------------------------------------
// Hausdorff distances
// ---------------------------------------------------------------------------

namespace detail {

// Cyclic sorted closed components, each as (a, b) with b possibly > L.
inline std::vector<std::pair<double, double>> cyclic_components(const ClosedArcSet& s) {
  std::vector<std::pair<double, double>> out;
  for (const auto& iv : s.intervals()) out.emplace_back(iv.a, iv.b);
  return out;
}

inline double point_to_closed_cyclic(double t, const std::vector<std::pair<double, double>>& comps,
                                     double L) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : comps) {
    if ((t >= a && t <= b) || (t + L >= a && t + L <= b)) return 0.0;
    best = std::min({best, cyclic_distance(t, a, L), cyclic_distance(t, b, L)});
  }
  return best;
}

inline double directed_hausdorff_arclength(const ClosedArcSet& A, const ClosedArcSet& B) {
  double L = A.total_length();
  if (B.is_full()) return 0.0;
  auto bc = cyclic_components(B);
  double best = 0.0;
  // endpoints of A
  for (const auto& iv : A.intervals()) {
    best = std::max(best, point_to_closed_cyclic(wrap_coordinate(iv.a, L), bc, L));
    best = std::max(best, point_to_closed_cyclic(wrap_coordinate(iv.b, L), bc, L));
  }
  // peaks of dist(., B) inside A: midpoints of the gaps between consecutive
  // components of B
  std::size_t n = bc.size();
  for (std::size_t i = 0; i < n; ++i) {
    double gap_start = bc[i].second;
    double gap_end = (i + 1 < n) ? bc[(i + 1)].first : bc[0].first + L;
    if (n == 1) gap_end = bc[0].first + L;
    double gap = gap_end - gap_start;
    if (gap <= 0.0) continue;
    double mid = wrap_coordinate(0.5 * (gap_start + gap_end), L);
    if (A.contains(mid)) best = std::max(best, 0.5 * gap);
  }
  return best;
}

struct PlanarSeg {
  Vec2 p, q;
  bool degenerate() const { return (q - p).squaredNorm() == 0.0; }
};

// Straight pieces of a closed arc union on a polygon or circle-approximating
// curve; closed intervals are split at polygon corners.
inline std::vector<PlanarSeg> planar_segments(const ClosedArcSet& s) {
  const BoundaryCurve& c = *s.curve();
  double L = c.total_length();
  auto corners = c.corner_params();
  std::vector<PlanarSeg> out;
  for (const auto& iv : s.intervals()) {
    if (iv.b == iv.a) {
      Vec2 pt = c.point(iv.a);
      out.push_back({pt, pt});
      continue;
    }
    std::vector<double> cuts{iv.a};
    for (double t : corners) {
      for (int shift = 0; shift <= 1; ++shift) {
        double tc = t + shift * L;
        if (tc > iv.a && tc < iv.b) cuts.push_back(tc);
      }
    }
    cuts.push_back(iv.b);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      out.push_back({c.point(cuts[i]), c.point(cuts[i + 1])});
  }
  return out;
}

inline double point_segment_distance(const Vec2& x, const PlanarSeg& s) {
  Vec2 d = s.q - s.p;
  double len2 = d.squaredNorm();
  if (len2 == 0.0) return (x - s.p).norm();
  double u = (x - s.p).dot(d) / len2;
  u = std::clamp(u, 0.0, 1.0);
  return (x - (s.p + u * d)).norm();
}

inline double point_to_segments(const Vec2& x, const std::vector<PlanarSeg>& segs) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : segs) best = std::min(best, point_segment_distance(x, s));
  return best;
}

// Exact directed Hausdorff from a union of planar segments A to a union of
// planar segments B. The max of x -> dist(x, B) along a segment of A is
// attained at a segment endpoint or at a breakpoint of the lower envelope of
// the per-feature distance functions; all such breakpoints solve linear or
// quadratic equations, which are enumerated exhaustively.
inline double directed_hausdorff_segments(const std::vector<PlanarSeg>& A,
                                          const std::vector<PlanarSeg>& B) {
  struct Feature {
    bool is_point;
    Vec2 p;        // point feature
    Vec2 q0, dir;  // line feature: q0 + u * dir, |dir| = 1
  };
  std::vector<Feature> feats;
  for (const auto& s : B) {
    feats.push_back({true, s.p, {}, {}});
    if (!s.degenerate()) {
      feats.push_back({true, s.q, {}, {}});
      feats.push_back({false, {}, s.p, (s.q - s.p).normalized()});
    }
  }
  double best = 0.0;
  auto consider = [&](const Vec2& x) { best = std::max(best, point_to_segments(x, B)); };

  for (const auto& sa : A) {
    consider(sa.p);
    if (sa.degenerate()) continue;
    consider(sa.q);
    Vec2 P = sa.p, D = sa.q - sa.p;
    std::vector<double> ts;
    auto push = [&](double t) {
      if (t > 0.0 && t < 1.0 && std::isfinite(t)) ts.push_back(t);
    };
    // signed distance to a line feature along the A-segment is |c0 + c1 t|
    auto line_coeffs = [&](const Feature& f, double& c0, double& c1) {
      Vec2 n{-f.dir.y(), f.dir.x()};
      c0 = (P - f.q0).dot(n);
      c1 = D.dot(n);
    };
    // slab boundaries: where the projection onto a B segment passes its ends
    for (const auto& sb : B) {
      if (sb.degenerate()) continue;
      Vec2 E = sb.q - sb.p;
      double ee = E.squaredNorm();
      double r0 = (P - sb.p).dot(E), r1 = D.dot(E);
      if (r1 != 0.0) {
        push((0.0 - r0) / r1);
        push((ee - r0) / r1);
      }
    }
    for (std::size_t i = 0; i < feats.size(); ++i) {
      for (std::size_t j = i + 1; j < feats.size(); ++j) {
        const Feature &f = feats[i], &g = feats[j];
        if (f.is_point && g.is_point) {
          // |x(t)-p|^2 = |x(t)-q|^2: linear
          Vec2 p = f.p, q = g.p;
          double a = 2.0 * D.dot(q - p);
          double b = (P - p).squaredNorm() - (P - q).squaredNorm();
          if (a != 0.0) push(-b / a);
        } else if (!f.is_point && !g.is_point) {
          double a0, a1, b0, b1;
          line_coeffs(f, a0, a1);
          line_coeffs(g, b0, b1);
          if (a1 - b1 != 0.0) push((b0 - a0) / (a1 - b1));
          if (a1 + b1 != 0.0) push(-(a0 + b0) / (a1 + b1));
        } else {
          const Feature& pt = f.is_point ? f : g;
          const Feature& ln = f.is_point ? g : f;
          double c0, c1;
          line_coeffs(ln, c0, c1);
          // |x(t)-p|^2 = (c0 + c1 t)^2: quadratic
          double qa = D.squaredNorm() - c1 * c1;
          double qb = 2.0 * (P - pt.p).dot(D) - 2.0 * c0 * c1;
          double qc = (P - pt.p).squaredNorm() - c0 * c0;
          if (qa == 0.0) {
            if (qb != 0.0) push(-qc / qb);
          } else {
            double disc = qb * qb - 4.0 * qa * qc;
            if (disc >= 0.0) {
              double sq = std::sqrt(disc);
              push((-qb + sq) / (2.0 * qa));
              push((-qb - sq) / (2.0 * qa));
            }
          }
        }
      }
    }
    for (double t : ts) consider(P + t * D);
  }
  return best;
}

// Sample points of a closed arc union on a star curve at the given
// resolution; component endpoints are always included.
inline std::vector<Vec2> sampled_points(const ClosedArcSet& s, double res) {
  const BoundaryCurve& c = *s.curve();
  std::vector<Vec2> pts;
  for (const auto& iv : s.intervals()) {
    double len = iv.b - iv.a;
    int n = std::max(1, static_cast<int>(std::ceil(len / res)));
    for (int i = 0; i <= n; ++i) pts.push_back(c.point(iv.a + len * i / n));
  }
  return pts;
}

// Nearest-neighbor queries over a fixed point cloud, sorted by x with a
// growing-window scan.
class NearestPoints {
public:
  explicit NearestPoints(std::vector<Vec2> pts) : pts_(std::move(pts)) {
    std::sort(pts_.begin(), pts_.end(),
              [](const Vec2& a, const Vec2& b) { return a.x() < b.x(); });
  }

  double distance(const Vec2& q) const {
    auto it = std::lower_bound(pts_.begin(), pts_.end(), q.x(),
                               [](const Vec2& p, double x) { return p.x() < x; });
    std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pts_.size());
    std::ptrdiff_t r = it - pts_.begin(), l = r - 1;
    double best = std::numeric_limits<double>::infinity();
    while (l >= 0 || r < n) {
      bool advanced = false;
      if (l >= 0) {
        if (q.x() - pts_[l].x() <= best) {
          best = std::min(best, (pts_[l] - q).norm());
          --l;
          advanced = true;
        } else {
          l = -1;
        }
      }
      if (r < n) {
        if (pts_[r].x() - q.x() <= best) {
          best = std::min(best, (pts_[r] - q).norm());
          ++r;
          advanced = true;
        } else {
          r = n;
        }
      }
      if (!advanced) break;
    }
    return best;
  }

private:
  std::vector<Vec2> pts_;
};

inline double directed_hausdorff_sampled(const std::vector<Vec2>& A,
                                         const std::vector<Vec2>& B) {
  NearestPoints nn(B);
  double best = 0.0;
  for (const auto& x : A) best = std::max(best, nn.distance(x));
  return best;
}

}  // namespace detail

/// Hausdorff distance between two nonempty closed boundary sets on the same
/// curve. The arclength variant measures along the curve and is exact. The
/// euclidean variant is exact on circles (monotone chord transform) and
/// polygons (envelope breakpoint enumeration); star curves fall back to
/// dense sampling at resolution total_length / 1e5 with component endpoints
/// always included.
inline double hausdorff_distance(const ClosedArcSet& a, const ClosedArcSet& b,
                                 BoundaryMetric metric) {
  detail::require_same_curve(*a.curve(), *b.curve());
  if (a.is_empty() || b.is_empty())
    throw Error("hausdorff_distance is undefined for an empty set");
  double arc = std::max(detail::directed_hausdorff_arclength(a, b),
                        detail::directed_hausdorff_arclength(b, a));
  if (metric == BoundaryMetric::Arclength) return arc;
  switch (a.curve()->kind()) {
    case CurveKind::Circle: {
      double R = a.curve()->radius();
      return 2.0 * R * std::sin(std::min(arc, kPi * R) / (2.0 * R));
    }
    case CurveKind::Polygon: {
      auto sa = detail::planar_segments(a);
      auto sb = detail::planar_segments(b);
      return std::max(detail::directed_hausdorff_segments(sa, sb),
                      detail::directed_hausdorff_segments(sb, sa));
    }
    case CurveKind::Star: {
      double res = a.curve()->total_length() * 1e-5;
      auto pa = detail::sampled_points(a, res);
      auto pb = detail::sampled_points(b, res);
      return std::max(detail::directed_hausdorff_sampled(pa, pb),
                      detail::directed_hausdorff_sampled(pb, pa));
    }
  }
  throw Error("unreachable");
}

}  // namespace steklov
