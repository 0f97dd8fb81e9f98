#pragma once

#include "steklov/delaunay.hpp"
#include "steklov/geometry.hpp"

#include <array>
#include <cstdint>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace steklov {

enum class EdgeTag : std::uint8_t { Steklov, Dirichlet };
enum class VertexFlag : std::uint8_t { Interior, SteklovInterior, Dirichlet };

struct BoundaryEdge {
  int v0, v1;  // directed along increasing arclength
  EdgeTag tag;
  int interval_id;  // component index within the arc set (Steklov) or its
                    // complement (Dirichlet)
};

struct MeshQuality {
  double min_angle_deg;
  double max_aspect;  // longest edge over inscribed-circle diameter
  double h;
  int vertices, edges, triangles, boundary_edges;
};

/// Conforming triangulation of the domain bounded by a curve, with boundary
/// edges tagged by the arc partition and vertices at every arc endpoint.
struct Mesh {
  CurvePtr curve;
  ArcSet arcs;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // ccw
  std::vector<BoundaryEdge> boundary_edges;   // ordered along the cycle
  std::vector<VertexFlag> vertex_flags;
  std::vector<double> boundary_param;  // arclength coordinate, NaN if interior
  double h = 0.0;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
};

namespace detail {

struct Section {
  double s0, s1;  // s1 > s0; may extend past L for the wrapping section
  bool steklov;
  int interval_id;
};

inline int containing_component(double t, const std::vector<std::pair<double, double>>& comps,
                                double L) {
  for (std::size_t i = 0; i < comps.size(); ++i) {
    auto [a, b] = comps[i];
    if ((t >= a && t <= b) || (t + L >= a && t + L <= b)) return static_cast<int>(i);
  }
  return -1;
}

inline std::vector<Section> boundary_sections(const BoundaryCurve& curve, const ArcSet& arcs,
                                              const std::vector<double>& extra_forced) {
  double L = curve.total_length();
  std::vector<double> bp = arcs.endpoint_params();
  for (double t : curve.corner_params()) bp.push_back(wrap_coordinate(t, L));
  for (double t : extra_forced) bp.push_back(wrap_coordinate(t, L));
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end(),
                       [&](double a, double b) { return std::abs(a - b) <= 1e-12 * L; }),
           bp.end());
  if (bp.empty()) bp.push_back(0.0);

  std::vector<std::pair<double, double>> arc_comps, gap_comps;
  for (const auto& iv : arcs.intervals()) arc_comps.emplace_back(iv.a, iv.b);
  for (const auto& iv : complement(arcs).intervals()) gap_comps.emplace_back(iv.a, iv.b);

  std::vector<Section> out;
  for (std::size_t i = 0; i < bp.size(); ++i) {
    double s0 = bp[i];
    double s1 = (i + 1 < bp.size()) ? bp[i + 1] : bp[0] + L;
    double mid = wrap_coordinate(0.5 * (s0 + s1), L);
    bool st = arcs.contains(mid);
    int id = st ? containing_component(mid, arc_comps, L)
                : containing_component(mid, gap_comps, L);
    out.push_back({s0, s1, st, id});
  }
  return out;
}

inline double min_feature_length(const ArcSet& arcs, std::size_t* which, bool* is_gap) {
  double best = std::numeric_limits<double>::infinity();
  const auto& iv = arcs.intervals();
  for (std::size_t i = 0; i < iv.size(); ++i) {
    if (iv[i].length() < best) {
      best = iv[i].length();
      if (which) *which = i;
      if (is_gap) *is_gap = false;
    }
  }
  const auto gaps = complement(arcs).intervals();
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    double len = gaps[i].b - gaps[i].a;
    if (len < best) {
      best = len;
      if (which) *which = i;
      if (is_gap) *is_gap = true;
    }
  }
  return best;
}

inline double triangle_min_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
  double la = (c - b).norm(), lb = (a - c).norm(), lc = (b - a).norm();
  auto angle = [](double opp, double s1, double s2) {
    double cosv = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
    return std::acos(std::clamp(cosv, -1.0, 1.0));
  };
  return std::min({angle(la, lb, lc), angle(lb, lc, la), angle(lc, la, lb)});
}

inline void validate_mesh(const Mesh& m) {
  double L = m.curve->total_length();
  // positive areas and angle floor
  double min_angle = std::numeric_limits<double>::infinity();
  for (const auto& t : m.triangles) {
    const Vec2 &a = m.vertices[t[0]], &b = m.vertices[t[1]], &c = m.vertices[t[2]];
    if (orient2d(a, b, c) <= 0.0) throw Error("mesh has a degenerate or inverted triangle");
    min_angle = std::min(min_angle, triangle_min_angle(a, b, c));
  }
  if (min_angle < 15.0 * kPi / 180.0)
    throw Error("mesh violates the 15 degree minimum-angle invariant");

  // conformity and the Euler relation V - E + T = 1
  std::unordered_map<std::uint64_t, int> edge_count;
  auto key = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
  };
  for (const auto& t : m.triangles)
    for (int i = 0; i < 3; ++i) edge_count[key(t[i], t[(i + 1) % 3])]++;
  std::unordered_set<std::uint64_t> boundary_keys;
  for (const auto& e : m.boundary_edges) boundary_keys.insert(key(e.v0, e.v1));
  for (const auto& [k, c] : edge_count) {
    bool onb = boundary_keys.count(k) > 0;
    if (!((c == 2 && !onb) || (c == 1 && onb)))
      throw Error("mesh is not conforming");
  }
  long V = m.num_vertices(), E = static_cast<long>(edge_count.size()),
       T = m.num_triangles();
  if (V - E + T != 1) throw Error("Euler relation violated");

  // boundary edges form one cycle in order
  for (std::size_t i = 0; i < m.boundary_edges.size(); ++i) {
    const auto& e = m.boundary_edges[i];
    const auto& next = m.boundary_edges[(i + 1) % m.boundary_edges.size()];
    if (e.v1 != next.v0) throw Error("boundary edges do not chain into a cycle");
  }

  // every arc endpoint coincides with a boundary vertex
  for (double t : m.arcs.endpoint_params()) {
    bool found = false;
    for (const auto& e : m.boundary_edges) {
      if (cyclic_distance(m.boundary_param[e.v0], t, L) <= 1e-12 * std::max(1.0, L)) {
        found = true;
        break;
      }
    }
    if (!found) throw Error("arc endpoint is not a mesh vertex");
  }

  // no edge straddles an endpoint; tags match the arc set; flags consistent
  for (const auto& e : m.boundary_edges) {
    double p0 = m.boundary_param[e.v0];
    double span = wrap_coordinate(m.boundary_param[e.v1] - p0, L);
    double mid = p0 + 0.5 * span;
    for (double t : m.arcs.endpoint_params()) {
      double fwd = wrap_coordinate(t - p0, L);
      if (fwd > 1e-12 * L && fwd < span - 1e-12 * L)
        throw Error("boundary edge straddles an arc endpoint");
    }
    bool st = m.arcs.contains(wrap_coordinate(mid, L));
    if (st != (e.tag == EdgeTag::Steklov)) throw Error("boundary edge tag mismatch");
  }
  for (int v = 0; v < m.num_vertices(); ++v) {
    bool onb = std::isfinite(m.boundary_param[v]);
    if (!onb) {
      if (m.vertex_flags[v] != VertexFlag::Interior)
        throw Error("interior vertex carries a boundary flag");
      continue;
    }
    bool inside = m.arcs.contains_open(m.boundary_param[v]);
    VertexFlag expect = inside ? VertexFlag::SteklovInterior : VertexFlag::Dirichlet;
    if (m.vertex_flags[v] != expect) throw Error("boundary vertex flag mismatch");
  }
}

inline double mesh_h(const Mesh& m) {
  double h = 0.0;
  for (const auto& t : m.triangles)
    for (int i = 0; i < 3; ++i)
      h = std::max(h, (m.vertices[t[i]] - m.vertices[t[(i + 1) % 3]]).norm());
  return h;
}

inline void assign_flags(Mesh& m) {
  m.vertex_flags.assign(m.num_vertices(), VertexFlag::Interior);
  for (int v = 0; v < m.num_vertices(); ++v) {
    if (!std::isfinite(m.boundary_param[v])) continue;
    m.vertex_flags[v] = m.arcs.contains_open(m.boundary_param[v])
                            ? VertexFlag::SteklovInterior
                            : VertexFlag::Dirichlet;
  }
}

}  // namespace detail

/// Meshes the interior of `curve` with boundary vertices at every arc
/// endpoint (plus any extra forced parameters) and boundary spacing at most
/// h_target. Deterministic: identical inputs give identical meshes.
inline Mesh mesh_domain(CurvePtr curve, const ArcSet& arcs, double h_target,
                        const std::vector<double>& extra_forced = {}) {
  if (!(h_target > 0.0)) throw Error("h_target must be positive");
  if (!(*curve == *arcs.curve())) throw Error("arc set belongs to a different curve");
  double L = curve->total_length();

  if (!arcs.is_empty()) {
    std::size_t which = 0;
    bool is_gap = false;
    double feat = detail::min_feature_length(arcs, &which, &is_gap);
    if (h_target > 0.5 * feat)
      throw Error(std::string("h_target too coarse: ") +
                  (is_gap ? "gap " : "arc ") + std::to_string(which) +
                  " has length " + std::to_string(feat) +
                  "; maximum admissible h_target is " + std::to_string(0.5 * feat));
  }

  auto sections = detail::boundary_sections(*curve, arcs, extra_forced);

  detail::Triangulation tri;
  std::vector<int> edge_sections;
  for (std::size_t si = 0; si < sections.size(); ++si) {
    const auto& sec = sections[si];
    double len = sec.s1 - sec.s0;
    int nseg = std::max(1, static_cast<int>(std::ceil(len / h_target - 1e-12)));
    for (int k = 0; k < nseg; ++k) {
      double s = sec.s0 + len * k / nseg;
      tri.points.push_back(curve->point(s));
      tri.params.push_back(wrap_coordinate(s, L));
      edge_sections.push_back(static_cast<int>(si));
    }
  }
  tri.triangulate_polygon(edge_sections);

  auto split_pos = [&](int v0, int v1, int /*section*/) -> std::pair<Vec2, double> {
    double p0 = tri.params[v0];
    double fwd = wrap_coordinate(tri.params[v1] - p0, L);
    double pm = wrap_coordinate(p0 + 0.5 * fwd, L);
    // chord midpoint keeps the point inside the current triangulation; all
    // boundary vertices are projected onto the curve afterwards
    return {0.5 * (tri.points[v0] + tri.points[v1]), pm};
  };
  // 20 degrees keeps the circumradius/shortest-edge bound clear of the
  // sqrt(2) termination threshold while staying well above the 15 degree
  // mesh invariant
  tri.refine(20.0, 1.8 * h_target, split_pos);

  // project boundary vertices onto the exact curve
  for (std::size_t i = 0; i < tri.points.size(); ++i)
    if (std::isfinite(tri.params[i])) tri.points[i] = curve->point(tri.params[i]);

  Mesh m{std::move(curve), arcs, {}, {}, {}, {}, {}, 0.0};
  m.vertices = tri.points;
  m.boundary_param = tri.params;
  for (const auto& t : tri.tris)
    if (t.alive) m.triangles.push_back({t.v[0], t.v[1], t.v[2]});

  // boundary edges in cycle order, starting from the segment at the smallest
  // parameter
  std::unordered_map<int, const detail::Triangulation::Segment*> by_start;
  const detail::Triangulation::Segment* first = nullptr;
  for (const auto& s : tri.segments) {
    if (!s.alive) continue;
    by_start[s.v0] = &s;
    if (!first || tri.params[s.v0] < tri.params[first->v0]) first = &s;
  }
  const auto* cur = first;
  do {
    const auto& sec = sections[cur->section];
    m.boundary_edges.push_back({cur->v0, cur->v1,
                                sec.steklov ? EdgeTag::Steklov : EdgeTag::Dirichlet,
                                sec.interval_id});
    cur = by_start.at(cur->v1);
  } while (cur != first);

  detail::assign_flags(m);
  m.h = detail::mesh_h(m);
  detail::validate_mesh(m);
  return m;
}

/// Uniform midpoint refinement: every triangle splits into four. New boundary
/// midpoints are placed back on the exact curve; tags are inherited.
inline Mesh refine(const Mesh& mesh) {
  double L = mesh.curve->total_length();
  Mesh out{mesh.curve, mesh.arcs, mesh.vertices, {}, {}, {}, mesh.boundary_param, 0.0};

  auto key = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
  };
  std::unordered_map<std::uint64_t, int> edge_mid;
  std::unordered_map<std::uint64_t, double> boundary_mid_param;
  for (const auto& e : mesh.boundary_edges) {
    double p0 = mesh.boundary_param[e.v0];
    double fwd = wrap_coordinate(mesh.boundary_param[e.v1] - p0, L);
    boundary_mid_param[key(e.v0, e.v1)] = wrap_coordinate(p0 + 0.5 * fwd, L);
  }
  auto midpoint = [&](int a, int b) {
    auto k = key(a, b);
    auto it = edge_mid.find(k);
    if (it != edge_mid.end()) return it->second;
    int idx = static_cast<int>(out.vertices.size());
    auto bit = boundary_mid_param.find(k);
    if (bit != boundary_mid_param.end()) {
      out.vertices.push_back(mesh.curve->point(bit->second));
      out.boundary_param.push_back(bit->second);
    } else {
      out.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
      out.boundary_param.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    edge_mid[k] = idx;
    return idx;
  };

  for (const auto& t : mesh.triangles) {
    int mab = midpoint(t[0], t[1]);
    int mbc = midpoint(t[1], t[2]);
    int mca = midpoint(t[2], t[0]);
    out.triangles.push_back({t[0], mab, mca});
    out.triangles.push_back({t[1], mbc, mab});
    out.triangles.push_back({t[2], mca, mbc});
    out.triangles.push_back({mab, mbc, mca});
  }
  for (const auto& e : mesh.boundary_edges) {
    int mid = edge_mid.at(key(e.v0, e.v1));
    out.boundary_edges.push_back({e.v0, mid, e.tag, e.interval_id});
    out.boundary_edges.push_back({mid, e.v1, e.tag, e.interval_id});
  }
  detail::assign_flags(out);
  out.h = detail::mesh_h(out);
  detail::validate_mesh(out);
  return out;
}

/// Re-tags an existing mesh for a different arc set on the same curve. Every
/// endpoint of the new arc set must already be a boundary vertex.
inline Mesh retag(const Mesh& mesh, const ArcSet& arcs) {
  if (!(*mesh.curve == *arcs.curve()))
    throw Error("arc set belongs to a different curve");
  double L = mesh.curve->total_length();
  Mesh out = mesh;
  out.arcs = arcs;

  std::vector<std::pair<double, double>> arc_comps, gap_comps;
  for (const auto& iv : arcs.intervals()) arc_comps.emplace_back(iv.a, iv.b);
  for (const auto& iv : complement(arcs).intervals()) gap_comps.emplace_back(iv.a, iv.b);

  for (auto& e : out.boundary_edges) {
    double p0 = mesh.boundary_param[e.v0];
    double fwd = wrap_coordinate(mesh.boundary_param[e.v1] - p0, L);
    double mid = wrap_coordinate(p0 + 0.5 * fwd, L);
    bool st = arcs.contains(mid);
    e.tag = st ? EdgeTag::Steklov : EdgeTag::Dirichlet;
    e.interval_id = st ? detail::containing_component(mid, arc_comps, L)
                       : detail::containing_component(mid, gap_comps, L);
  }
  detail::assign_flags(out);
  detail::validate_mesh(out);  // rejects arc endpoints that are not vertices
  return out;
}

/// Rigidly rotates a disk mesh by an arclength shift, retagging nothing: the
/// arc set rotates with the mesh. Exact congruence makes the spectrum agree
/// with the original to rounding accuracy.
inline Mesh rotate_circle_mesh(const Mesh& mesh, double arc_shift) {
  if (mesh.curve->kind() != CurveKind::Circle)
    throw Error("mesh rotation requires a circle");
  double R = mesh.curve->radius();
  double L = mesh.curve->total_length();
  double theta = arc_shift / R;
  double ct = std::cos(theta), st = std::sin(theta);

  Mesh out = mesh;
  for (auto& v : out.vertices)
    v = Vec2{ct * v.x() - st * v.y(), st * v.x() + ct * v.y()};
  for (auto& t : out.boundary_param)
    if (std::isfinite(t)) t = wrap_coordinate(t + arc_shift, L);
  std::vector<ArcSet::Interval> shifted;
  for (const auto& iv : mesh.arcs.intervals())
    shifted.push_back({iv.a + arc_shift, iv.b + arc_shift});
  out.arcs = ArcSet(mesh.arcs.curve(), shifted);
  // tags, flags and connectivity are rotation-invariant
  detail::validate_mesh(out);
  return out;
}

inline MeshQuality mesh_quality(const Mesh& m) {
  MeshQuality q{};
  q.min_angle_deg = 180.0;
  q.max_aspect = 0.0;
  for (const auto& t : m.triangles) {
    const Vec2 &a = m.vertices[t[0]], &b = m.vertices[t[1]], &c = m.vertices[t[2]];
    q.min_angle_deg =
        std::min(q.min_angle_deg, detail::triangle_min_angle(a, b, c) * 180.0 / kPi);
    double la = (c - b).norm(), lb = (a - c).norm(), lc = (b - a).norm();
    double per = la + lb + lc;
    double area = 0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    double lmax = std::max({la, lb, lc});
    q.max_aspect = std::max(q.max_aspect, lmax * per / (4.0 * area));
  }
  std::set<std::pair<int, int>> edges;
  for (const auto& t : m.triangles)
    for (int i = 0; i < 3; ++i)
      edges.insert(std::minmax(t[i], t[(i + 1) % 3]));
  q.h = m.h;
  q.vertices = m.num_vertices();
  q.edges = static_cast<int>(edges.size());
  q.triangles = m.num_triangles();
  q.boundary_edges = static_cast<int>(m.boundary_edges.size());
  return q;
}

}  // namespace steklov
