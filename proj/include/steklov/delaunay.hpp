#pragma once

#include "steklov/common.hpp"

#include <array>
#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

namespace steklov::detail {

// ---------------------------------------------------------------------------
// Geometric predicates: double-precision filter with a quad-precision
// fallback when the filter cannot certify the sign.
// ---------------------------------------------------------------------------

inline double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  double detleft = (a.x() - c.x()) * (b.y() - c.y());
  double detright = (a.y() - c.y()) * (b.x() - c.x());
  double det = detleft - detright;
  double detsum = std::abs(detleft) + std::abs(detright);
  // ccwerrboundA from the standard adaptive-precision scheme
  constexpr double errbound = 3.3306690738754716e-16;
  if (std::abs(det) > errbound * detsum) return det;
  __float128 ax = a.x(), ay = a.y(), bx = b.x(), by = b.y(), cx = c.x(), cy = c.y();
  __float128 dl = (ax - cx) * (by - cy), dr = (ay - cy) * (bx - cx);
  __float128 d = dl - dr;
  // magnitudes below the quad rounding floor are exact zeros that rounded;
  // treating them as nonzero makes degenerate-case decisions inconsistent
  __float128 perm = (dl < 0 ? -dl : dl) + (dr < 0 ? -dr : dr);
  constexpr double quad_floor = 7.9e-31;  // 2^-100
  if (d > perm * quad_floor) return 1.0;
  if (d < -perm * quad_floor) return -1.0;
  return 0.0;
}

/// > 0 iff d lies strictly inside the circumcircle of the ccw triangle abc.
inline double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  double adx = a.x() - d.x(), ady = a.y() - d.y();
  double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  double alift = adx * adx + ady * ady;
  double blift = bdx * bdx + bdy * bdy;
  double clift = cdx * cdx + cdy * cdy;
  double bcdet = bdx * cdy - cdx * bdy;
  double cadet = cdx * ady - adx * cdy;
  double abdet = adx * bdy - bdx * ady;
  double det = alift * bcdet + blift * cadet + clift * abdet;
  double permanent = alift * (std::abs(bdx * cdy) + std::abs(cdx * bdy)) +
                     blift * (std::abs(cdx * ady) + std::abs(adx * cdy)) +
                     clift * (std::abs(adx * bdy) + std::abs(bdx * ady));
  constexpr double errbound = 1.1102230246251577e-15;
  if (std::abs(det) > errbound * permanent) return det;
  // recompute from the raw coordinates: the double differences above are
  // already rounded, which is exactly what breaks near-cocircular cases
  __float128 qadx = __float128(a.x()) - __float128(d.x());
  __float128 qady = __float128(a.y()) - __float128(d.y());
  __float128 qbdx = __float128(b.x()) - __float128(d.x());
  __float128 qbdy = __float128(b.y()) - __float128(d.y());
  __float128 qcdx = __float128(c.x()) - __float128(d.x());
  __float128 qcdy = __float128(c.y()) - __float128(d.y());
  __float128 qa = qadx * qadx + qady * qady;
  __float128 qb = qbdx * qbdx + qbdy * qbdy;
  __float128 qc = qcdx * qcdx + qcdy * qcdy;
  __float128 qdet = qa * (qbdx * qcdy - qcdx * qbdy) +
                    qb * (qcdx * qady - qadx * qcdy) +
                    qc * (qadx * qbdy - qbdx * qady);
  // snap results below the quad rounding floor to zero (exactly cocircular
  // points, e.g. lattice rectangles, would otherwise give inconsistent signs)
  constexpr double quad_floor = 7.9e-31;  // 2^-100
  __float128 qperm = __float128(permanent) * quad_floor;
  if (qdet > qperm) return 1.0;
  if (qdet < -qperm) return -1.0;
  return 0.0;
}

inline Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  Vec2 ab = b - a, ac = c - a;
  double d = 2.0 * (ab.x() * ac.y() - ab.y() * ac.x());
  double ab2 = ab.squaredNorm(), ac2 = ac.squaredNorm();
  double ux = (ac.y() * ab2 - ab.y() * ac2) / d;
  double uy = (ab.x() * ac2 - ac.x() * ab2) / d;
  return a + Vec2{ux, uy};
}

// ---------------------------------------------------------------------------
// Constrained Delaunay triangulation with Ruppert-style refinement.
// Triangle t has ccw vertices v[0..2]; neighbor n[i] faces vertex v[i];
// n[i] == -1 marks a constrained (boundary) edge.
// ---------------------------------------------------------------------------

class Triangulation {
public:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> n;
    bool alive = true;
  };

  struct Segment {
    int v0, v1;   // directed along the boundary cycle
    int section;  // index into the caller's section table
    bool alive = true;
  };

  std::vector<Vec2> points;
  std::vector<double> params;  // boundary arclength parameter, NaN if interior
  std::vector<Tri> tris;
  std::vector<Segment> segments;

  /// Builds the initial constrained triangulation of a simple ccw polygon
  /// whose vertices are points[0..n-1] in boundary order. Section ids label
  /// the polygon edges i -> i+1.
  void triangulate_polygon(const std::vector<int>& sections) {
    int n = static_cast<int>(points.size());
    if (n < 3) throw Error("boundary polygon needs at least 3 vertices");
    segments.clear();
    segments.reserve(n);
    for (int i = 0; i < n; ++i)
      segments.push_back({i, (i + 1) % n, sections[i], true});
    rebuild_segment_map();
    ear_clip();
    build_adjacency();
    legalize_all();
  }

  bool is_segment(int a, int b) const {
    return seg_map_.count(edge_key(a, b)) > 0;
  }

  int segment_index(int a, int b) const {
    auto it = seg_map_.find(edge_key(a, b));
    return it == seg_map_.end() ? -1 : it->second;
  }

  /// Refines until every triangle has min angle >= quality_deg and longest
  /// edge <= max_edge. add_point(s_mid, v0, v1) supplies the position of a
  /// new boundary vertex when a segment is split (the chord midpoint for
  /// straight boundaries, curve-aware for the caller to decide).
  template <typename SplitPos>
  void refine(double quality_deg, double max_edge, SplitPos&& split_pos,
              std::size_t max_points = 2000000) {
    double min_sin = std::sin(quality_deg * kPi / 180.0);
    double ratio_bound = 1.0 / (2.0 * min_sin);  // circumradius / shortest edge

    std::deque<int> seg_queue, tri_queue;
    for (std::size_t i = 0; i < segments.size(); ++i)
      if (segment_encroached_by_any(static_cast<int>(i)))
        seg_queue.push_back(static_cast<int>(i));
    for (std::size_t i = 0; i < tris.size(); ++i)
      if (tris[i].alive && triangle_bad(static_cast<int>(i), ratio_bound, max_edge))
        tri_queue.push_back(static_cast<int>(i));

    auto push_new_tris = [&](const std::vector<int>& created) {
      for (int t : created)
        if (tris[t].alive && triangle_bad(t, ratio_bound, max_edge))
          tri_queue.push_back(t);
    };

    std::size_t guard = 0;
    while (!seg_queue.empty() || !tri_queue.empty()) {
      if (points.size() > max_points || ++guard > 8 * max_points)
        throw Error("mesh refinement did not converge");
      if (!seg_queue.empty()) {
        int s = seg_queue.front();
        seg_queue.pop_front();
        if (!segments[s].alive) continue;
        if (!segment_encroached_by_any(s)) continue;
        auto [s1, s2, created] = split_segment(s, split_pos);
        push_new_tris(created);
        if (segment_encroached_by_any(s1)) seg_queue.push_back(s1);
        if (segment_encroached_by_any(s2)) seg_queue.push_back(s2);
        continue;
      }
      int t = tri_queue.front();
      tri_queue.pop_front();
      if (!tris[t].alive) continue;
      if (!triangle_bad(t, ratio_bound, max_edge)) continue;
      Vec2 cc = circumcenter(points[tris[t].v[0]], points[tris[t].v[1]],
                             points[tris[t].v[2]]);
      if (!std::isfinite(cc.x()) || !std::isfinite(cc.y())) continue;
      // Ruppert rule: a rejected circumcenter splits the segments it
      // encroaches, unconditionally
      auto force_split = [&](int s) {
        auto [s1, s2, created] = split_segment(s, split_pos);
        push_new_tris(created);
        if (segment_encroached_by_any(s1)) seg_queue.push_back(s1);
        if (segment_encroached_by_any(s2)) seg_queue.push_back(s2);
      };
      std::vector<int> hit;
      for (std::size_t s = 0; s < segments.size(); ++s)
        if (segments[s].alive && point_encroaches(cc, static_cast<int>(s)))
          hit.push_back(static_cast<int>(s));
      if (!hit.empty()) {
        for (int s : hit) force_split(s);
        tri_queue.push_back(t);
        continue;
      }
      auto [loc, through] = locate(cc, t);
      if (loc < 0) {
        // walk left the domain: split the blocking segment instead
        force_split(through);
        tri_queue.push_back(t);
        continue;
      }
      if (too_close_to_vertex(cc, loc)) continue;  // give up on this triangle
      auto created = insert_point(cc, std::numeric_limits<double>::quiet_NaN(), loc);
      push_new_tris(created);
    }
  }

  /// Point location by visibility walk from the hint triangle. Returns
  /// {triangle, -1} on success or {-1, blocking_segment} when the walk wants
  /// to exit through a constrained edge.
  std::pair<int, int> locate(const Vec2& p, int hint) const {
    int t = hint;
    int prev = -1;
    for (std::size_t steps = 0; steps < tris.size() + 10; ++steps) {
      const Tri& tri = tris[t];
      int next = -1, blocked = -1;
      for (int i = 0; i < 3; ++i) {
        int a = tri.v[(i + 1) % 3], b = tri.v[(i + 2) % 3];
        if (orient2d(points[a], points[b], p) < 0.0) {
          if (tri.n[i] == -1) {
            blocked = segment_index(a, b);
          } else if (tri.n[i] != prev) {
            next = tri.n[i];
            break;
          } else if (next == -1) {
            next = tri.n[i];  // may have to backtrack; keep as fallback
          }
        }
      }
      if (next == -1) {
        if (blocked != -1) return {-1, blocked};
        return {t, -1};
      }
      prev = t;
      t = next;
    }
    throw Error("point location walk failed to terminate");
  }

  /// Bowyer-Watson insertion of p into triangle `loc`. Returns the indices of
  /// the created triangles. `param` is recorded for boundary points.
  std::vector<int> insert_point(const Vec2& p, double param, int loc) {
    auto cavity = grow_cavity(p, loc);
    auto boundary = cavity_boundary(cavity);
    int pi = static_cast<int>(points.size());
    points.push_back(p);
    params.push_back(param);
    return fan_cavity(pi, boundary, /*skip_a=*/-1, /*skip_b=*/-1);
  }

  bool triangle_bad(int t, double ratio_bound, double max_edge) const {
    const Tri& tr = tris[t];
    const Vec2 &a = points[tr.v[0]], &b = points[tr.v[1]], &c = points[tr.v[2]];
    double lab = (b - a).norm(), lbc = (c - b).norm(), lca = (a - c).norm();
    double lmax = std::max({lab, lbc, lca});
    if (lmax > max_edge) return true;
    double lmin = std::min({lab, lbc, lca});
    double area2 = std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    if (area2 <= 0.0) return true;
    double circumradius = lab * lbc * lca / (2.0 * area2);
    return circumradius / lmin > ratio_bound;
  }

  /// Splits segment s; the new vertex position and parameter come from
  /// split_pos(s). Returns {new_seg_a, new_seg_b, created triangles}.
  template <typename SplitPos>
  std::tuple<int, int, std::vector<int>> split_segment(int s, SplitPos&& split_pos) {
    Segment seg = segments[s];
    auto [pos, param] = split_pos(seg.v0, seg.v1, seg.section);
    // the triangle owning this constrained edge
    int owner = -1, owner_edge = -1;
    find_segment_triangle(seg.v0, seg.v1, owner, owner_edge);
    if (owner < 0) throw Error("constrained edge lost from triangulation");

    auto cavity = grow_cavity_for_segment_split(pos, owner);
    auto boundary = cavity_boundary(cavity);
    int pi = static_cast<int>(points.size());
    points.push_back(pos);
    params.push_back(param);
    auto created = fan_cavity(pi, boundary, seg.v0, seg.v1);

    // replace the segment by its two halves
    segments[s].alive = false;
    seg_map_.erase(edge_key(seg.v0, seg.v1));
    int s1 = static_cast<int>(segments.size());
    segments.push_back({seg.v0, pi, seg.section, true});
    seg_map_[edge_key(seg.v0, pi)] = s1;
    int s2 = static_cast<int>(segments.size());
    segments.push_back({pi, seg.v1, seg.section, true});
    seg_map_[edge_key(pi, seg.v1)] = s2;
    return {s1, s2, created};
  }

  bool point_encroaches(const Vec2& p, int s) const {
    const Segment& seg = segments[s];
    Vec2 a = points[seg.v0], b = points[seg.v1];
    Vec2 mid = 0.5 * (a + b);
    double r2 = 0.25 * (b - a).squaredNorm();
    return (p - mid).squaredNorm() < r2 * (1.0 - 1e-12);
  }

private:
  static std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
  }

  void rebuild_segment_map() {
    seg_map_.clear();
    for (std::size_t i = 0; i < segments.size(); ++i)
      if (segments[i].alive)
        seg_map_[edge_key(segments[i].v0, segments[i].v1)] = static_cast<int>(i);
  }

  void ear_clip() {
    int n = static_cast<int>(points.size());
    std::vector<int> next(n), prev(n);
    for (int i = 0; i < n; ++i) {
      next[i] = (i + 1) % n;
      prev[i] = (i + n - 1) % n;
    }
    tris.clear();
    int remaining = n;
    int i = 0;
    int since_clip = 0;
    while (remaining > 3) {
      int p = prev[i], q = next[i];
      bool ear = orient2d(points[p], points[i], points[q]) > 0.0;
      if (ear) {
        // no other remaining vertex inside or on the candidate ear
        for (int w = next[q]; w != p; w = next[w]) {
          if (point_in_or_on_triangle(points[w], points[p], points[i], points[q])) {
            ear = false;
            break;
          }
        }
      }
      if (ear) {
        tris.push_back({{p, i, q}, {-1, -1, -1}, true});
        next[p] = q;
        prev[q] = p;
        --remaining;
        i = p;
        since_clip = 0;
      } else {
        i = q;
        if (++since_clip > remaining + 1)
          throw Error("boundary polygon could not be triangulated");
      }
    }
    tris.push_back({{prev[i], i, next[i]}, {-1, -1, -1}, true});
  }

  static bool point_in_or_on_triangle(const Vec2& w, const Vec2& a, const Vec2& b,
                                      const Vec2& c) {
    return orient2d(a, b, w) >= 0.0 && orient2d(b, c, w) >= 0.0 &&
           orient2d(c, a, w) >= 0.0;
  }

  void build_adjacency() {
    std::unordered_map<std::uint64_t, std::pair<int, int>> half;  // edge -> (tri, side)
    half.reserve(tris.size() * 3);
    for (std::size_t t = 0; t < tris.size(); ++t) {
      for (int i = 0; i < 3; ++i) {
        int a = tris[t].v[(i + 1) % 3], b = tris[t].v[(i + 2) % 3];
        auto key = edge_key(a, b);
        auto it = half.find(key);
        if (it == half.end()) {
          half[key] = {static_cast<int>(t), i};
        } else {
          tris[t].n[i] = it->second.first;
          tris[it->second.first].n[it->second.second] = static_cast<int>(t);
        }
      }
    }
  }

  void legalize_all() {
    std::deque<std::pair<int, int>> queue;  // (tri, edge side)
    for (std::size_t t = 0; t < tris.size(); ++t)
      for (int i = 0; i < 3; ++i)
        if (tris[t].n[i] >= 0) queue.emplace_back(static_cast<int>(t), i);
    std::size_t guard = 0;
    while (!queue.empty()) {
      if (++guard > 200 * (tris.size() + 1) + 100000)
        throw Error("Delaunay legalization did not terminate");
      auto [t, i] = queue.front();
      queue.pop_front();
      if (!tris[t].alive) continue;
      int u = tris[t].n[i];
      if (u < 0 || !tris[u].alive) continue;
      int a = tris[t].v[(i + 1) % 3], b = tris[t].v[(i + 2) % 3];
      if (is_segment(a, b)) continue;
      int j = opposite_side(u, b, a);
      int c = tris[t].v[i], d = tris[u].v[j];
      if (incircle(points[tris[t].v[0]], points[tris[t].v[1]], points[tris[t].v[2]],
                   points[d]) <= 0.0)
        continue;
      // flip edge (a, b) -> (c, d); reuse slots t and u
      int tn_ca = tris[t].n[(i + 2) % 3];  // neighbor of t across (c, a)
      int tn_bc = tris[t].n[(i + 1) % 3];  // across (b, c)
      int un_ad = tris[u].n[(j + 1) % 3];  // across (a, d) in u
      int un_db = tris[u].n[(j + 2) % 3];  // across (d, b)
      tris[t] = {{c, a, d}, {un_ad, u, tn_ca}, true};
      tris[u] = {{d, b, c}, {tn_bc, t, un_db}, true};
      fix_neighbor(tn_ca, a, c, t);
      fix_neighbor(un_ad, a, d, t);
      fix_neighbor(tn_bc, b, c, u);
      fix_neighbor(un_db, b, d, u);
      for (int side = 0; side < 3; ++side) {
        if (tris[t].n[side] >= 0) queue.emplace_back(t, side);
        if (tris[u].n[side] >= 0) queue.emplace_back(u, side);
      }
    }
  }

  int opposite_side(int t, int a, int b) const {
    // side of tri t whose edge is (a, b) in that ccw order
    for (int i = 0; i < 3; ++i)
      if (tris[t].v[(i + 1) % 3] == a && tris[t].v[(i + 2) % 3] == b) return i;
    throw Error("adjacency corrupted");
  }

  void fix_neighbor(int t, int a, int b, int newn) {
    if (t < 0) return;
    for (int i = 0; i < 3; ++i) {
      int x = tris[t].v[(i + 1) % 3], y = tris[t].v[(i + 2) % 3];
      if ((x == a && y == b) || (x == b && y == a)) {
        tris[t].n[i] = newn;
        return;
      }
    }
    throw Error("adjacency corrupted");
  }

  std::vector<int> grow_cavity(const Vec2& p, int seed) {
    std::vector<int> cavity{seed};
    std::vector<int> stack{seed};
    in_cavity_.assign(tris.size(), 0);
    in_cavity_[seed] = 1;
    while (!stack.empty()) {
      int t = stack.back();
      stack.pop_back();
      for (int i = 0; i < 3; ++i) {
        int u = tris[t].n[i];
        if (u < 0 || in_cavity_[u]) continue;
        int a = tris[t].v[(i + 1) % 3], b = tris[t].v[(i + 2) % 3];
        if (is_segment(a, b)) continue;  // constrained edges wall the cavity
        if (incircle(points[tris[u].v[0]], points[tris[u].v[1]],
                     points[tris[u].v[2]], p) > 0.0) {
          in_cavity_[u] = 1;
          cavity.push_back(u);
          stack.push_back(u);
        }
      }
    }
    return cavity;
  }

  // For a split point that sits (numerically) on a constrained edge of the
  // owner triangle: seed only from the owner, so the cavity stays on the
  // domain side regardless of which side of the chord the point rounds to.
  std::vector<int> grow_cavity_for_segment_split(const Vec2& p, int owner) {
    return grow_cavity(p, owner);
  }

  struct BoundaryEdgeRec {
    int a, b;    // directed: cavity interior on the left
    int outer;   // neighbor triangle outside the cavity, or -1
  };

  std::vector<BoundaryEdgeRec> cavity_boundary(const std::vector<int>& cavity) {
    std::vector<BoundaryEdgeRec> edges;
    for (int t : cavity) {
      for (int i = 0; i < 3; ++i) {
        int u = tris[t].n[i];
        if (u >= 0 && in_cavity_[u]) continue;
        edges.push_back({tris[t].v[(i + 1) % 3], tris[t].v[(i + 2) % 3], u});
      }
    }
    // chain into a cycle
    std::unordered_map<int, std::size_t> by_start;
    for (std::size_t i = 0; i < edges.size(); ++i) by_start[edges[i].a] = i;
    std::vector<BoundaryEdgeRec> cycle;
    cycle.reserve(edges.size());
    std::size_t cur = 0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      cycle.push_back(edges[cur]);
      auto it = by_start.find(edges[cur].b);
      if (it == by_start.end()) throw Error("cavity boundary is not a cycle");
      cur = it->second;
    }
    if (cycle.size() != edges.size()) throw Error("cavity boundary is not a single cycle");
    for (int t : cavity) tris[t].alive = false;
    return cycle;
  }

  // Fans the new point pi onto the cavity boundary. If (skip_a, skip_b) names
  // a constrained edge of the cavity boundary, that edge is not fanned (the
  // point splits it) and the two flank edges become constrained.
  std::vector<int> fan_cavity(int pi, const std::vector<BoundaryEdgeRec>& cycle,
                              int skip_a, int skip_b) {
    std::vector<int> created;
    std::vector<int> slot(cycle.size(), -1);
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      if (cycle[i].a == skip_a && cycle[i].b == skip_b) continue;
      slot[i] = static_cast<int>(tris.size());
      tris.push_back({{cycle[i].a, cycle[i].b, pi}, {-1, -1, -1}, true});
      created.push_back(slot[i]);
      in_cavity_.push_back(0);
    }
    std::size_t m = cycle.size();
    for (std::size_t i = 0; i < m; ++i) {
      if (slot[i] < 0) continue;
      Tri& t = tris[slot[i]];
      // side 2 faces pi across edge (a, b)
      t.n[2] = cycle[i].outer;
      if (cycle[i].outer >= 0)
        fix_neighbor(cycle[i].outer, cycle[i].a, cycle[i].b, slot[i]);
      std::size_t inext = (i + 1) % m, iprev = (i + m - 1) % m;
      t.n[0] = slot[inext];  // across (b, pi)
      t.n[1] = slot[iprev];  // across (pi, a)
    }
    return created;
  }

  void find_segment_triangle(int a, int b, int& owner, int& side) const {
    owner = -1;
    side = -1;
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!tris[t].alive) continue;
      for (int i = 0; i < 3; ++i) {
        int x = tris[t].v[(i + 1) % 3], y = tris[t].v[(i + 2) % 3];
        if ((x == a && y == b) || (x == b && y == a)) {
          if (tris[t].n[i] == -1) {
            owner = static_cast<int>(t);
            side = i;
            return;
          }
        }
      }
    }
  }

  bool segment_encroached_by_any(int s) const {
    if (!segments[s].alive) return false;
    const Segment& seg = segments[s];
    Vec2 a = points[seg.v0], b = points[seg.v1];
    Vec2 mid = 0.5 * (a + b);
    double r2 = 0.25 * (b - a).squaredNorm();
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (static_cast<int>(i) == seg.v0 || static_cast<int>(i) == seg.v1) continue;
      if ((points[i] - mid).squaredNorm() < r2 * (1.0 - 1e-12)) return true;
    }
    return false;
  }

  bool too_close_to_vertex(const Vec2& p, int t) const {
    for (int i = 0; i < 3; ++i)
      if ((points[tris[t].v[i]] - p).squaredNorm() == 0.0) return true;
    return false;
  }

  std::unordered_map<std::uint64_t, int> seg_map_;
  std::vector<char> in_cavity_;
};

}  // namespace steklov::detail
