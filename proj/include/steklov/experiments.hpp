#pragma once

#include "steklov/eigensolve.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace steklov {

// ---------------------------------------------------------------------------
// Shared small helpers
// ---------------------------------------------------------------------------

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

inline LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("line fit needs >= 2 points");
  double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (f.intercept + f.slope * x[i]);
    acc += r * r;
  }
  f.rms_residual = std::sqrt(acc / n);
  return f;
}

/// Least-squares exponent of a power law v = C r^p through (radii, values).
inline LineFit fit_power_law(const std::vector<double>& radii,
                             const std::vector<double>& values) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !(values[i] > 0.0))
      throw Error("power-law fit needs positive samples");
    lx.push_back(std::log(radii[i]));
    ly.push_back(std::log(values[i]));
  }
  return least_squares_line(lx, ly);
}

/// P1 interpolation of a nodal field at an arbitrary point (brute-force
/// triangle search; intended for a handful of probe points).
inline double interpolate_nodal(const Mesh& mesh, const Eigen::VectorXd& nodal,
                                const Vec2& q) {
  for (const auto& t : mesh.triangles) {
    const Vec2 &a = mesh.vertices[t[0]], &b = mesh.vertices[t[1]], &c = mesh.vertices[t[2]];
    double d0 = detail::orient2d(a, b, q);
    double d1 = detail::orient2d(b, c, q);
    double d2 = detail::orient2d(c, a, q);
    if (d0 >= 0.0 && d1 >= 0.0 && d2 >= 0.0) {
      double area = detail::orient2d(a, b, c);
      double wa = d1 / area, wb = d2 / area, wc = d0 / area;
      return wa * nodal[t[0]] + wb * nodal[t[1]] + wc * nodal[t[2]];
    }
  }
  throw Error("probe point lies outside the mesh");
}

// ---------------------------------------------------------------------------
// Convergence study with Richardson extrapolation (the desk-scale oracle)
// ---------------------------------------------------------------------------

struct ConvergenceReport {
  std::vector<double> hs;                    // per level, finest last
  std::vector<std::vector<double>> lambdas;  // [level][k]
  std::vector<double> observed_order;        // per k, NaN when withheld
  std::vector<double> extrapolated;          // per k, NaN when withheld
  std::vector<double> error_bar;             // |lambda(h_finest) - lambda*|
  std::vector<bool> monotone;                // per k
  int k = 0;
  std::string provenance;
};

inline ConvergenceReport convergence_study(CurvePtr curve, const ArcSet& arcs, int k,
                                           int levels, double h0) {
  if (levels < 3) throw Error("convergence study needs at least 3 levels");
  ConvergenceReport rep;
  rep.k = k;
  auto mesh = std::make_shared<const Mesh>(mesh_domain(curve, arcs, h0));
  for (int l = 0; l < levels; ++l) {
    SpectralResult r = steklov_spectrum(mesh, k);
    rep.hs.push_back(r.h);
    rep.lambdas.push_back(r.eigenvalues);
    if (l == 0) rep.provenance = r.provenance;
    if (l + 1 < levels) mesh = std::make_shared<const Mesh>(refine(*mesh));
  }
  double nan = std::numeric_limits<double>::quiet_NaN();
  for (int j = 0; j < k; ++j) {
    int L = levels;
    double d1 = rep.lambdas[L - 3][j] - rep.lambdas[L - 2][j];
    double d2 = rep.lambdas[L - 2][j] - rep.lambdas[L - 1][j];
    bool mono = true;
    for (int l = 0; l + 1 < L; ++l) {
      double dl = rep.lambdas[l][j] - rep.lambdas[l + 1][j];
      if (dl * d2 <= 0.0) mono = false;
    }
    rep.monotone.push_back(mono);
    if (!mono || d2 == 0.0 || d1 / d2 <= 1.0) {
      rep.observed_order.push_back(nan);
      rep.extrapolated.push_back(nan);
      rep.error_bar.push_back(nan);
      continue;
    }
    double p = std::log2(d1 / d2);
    // geometric tail: lambda_finest - lambda* = d2 / (2^p - 1), signed
    double limit = rep.lambdas[L - 1][j] - d2 / (std::pow(2.0, p) - 1.0);
    rep.observed_order.push_back(p);
    rep.extrapolated.push_back(limit);
    rep.error_bar.push_back(std::abs(rep.lambdas[L - 1][j] - limit));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Stability sweep
// ---------------------------------------------------------------------------

enum class PerturbMode { EndpointShift, ArcTranslate };

struct StabilityEntry {
  double eps = 0.0;
  double sym_diff = 0.0;
  double hausdorff_euclid = 0.0;
  double hausdorff_arclength = 0.0;
  double modulus = 0.0;  // sqrt(sym_diff) + sqrt(hausdorff_euclid)
  std::vector<double> delta_lambda;
  bool used_in_fit = false;
};

struct StabilityReport {
  int k = 0;
  double h_target = 0.0;
  PerturbMode mode{};
  std::vector<double> base_lambda;
  std::vector<double> noise_floor;  // per k: cross-resolution deviation
  std::vector<StabilityEntry> entries;
  LineFit loglog_fit;    // log |dlambda_1| vs log eps over qualifying entries
  double constant = 0.0; // max |dlambda_1| / modulus over qualifying entries
  std::string provenance;
};

inline ArcSet perturbed_for_mode(const ArcSet& base, PerturbMode mode, double eps) {
  std::vector<double> deltas(2 * base.intervals().size(), 0.0);
  if (mode == PerturbMode::EndpointShift) {
    deltas[1] = eps;  // right endpoint of the first arc
  } else {
    for (auto& d : deltas) d = eps;  // rigid translation of every arc
  }
  return perturb_endpoints(base, deltas);
}

inline StabilityReport stability_sweep(CurvePtr curve, const ArcSet& base, int k,
                                       const std::vector<double>& eps_grid,
                                       PerturbMode mode, double h_target) {
  for (std::size_t i = 0; i + 1 < eps_grid.size(); ++i)
    if (!(eps_grid[i] > eps_grid[i + 1]))
      throw Error("epsilon grid must be strictly decreasing");

  StabilityReport rep;
  rep.k = k;
  rep.h_target = h_target;
  rep.mode = mode;

  SpectralResult base_r = steklov_dirichlet_eigenvalues(curve, base, h_target, k);
  SpectralResult base_fine = steklov_dirichlet_eigenvalues(curve, base, h_target / 2.0, k);
  rep.base_lambda = base_r.eigenvalues;
  rep.provenance = base_r.provenance;
  for (int j = 0; j < k; ++j)
    rep.noise_floor.push_back(std::abs(base_r.eigenvalues[j] - base_fine.eigenvalues[j]));

  auto base_d = complement(base);
  for (double eps : eps_grid) {
    StabilityEntry e;
    e.eps = eps;
    ArcSet moved = perturbed_for_mode(base, mode, eps);
    e.sym_diff = symmetric_difference_measure(base, moved);
    auto moved_d = complement(moved);
    e.hausdorff_euclid = hausdorff_distance(base_d, moved_d, BoundaryMetric::Euclidean);
    e.hausdorff_arclength = hausdorff_distance(base_d, moved_d, BoundaryMetric::Arclength);
    e.modulus = std::sqrt(e.sym_diff) + std::sqrt(e.hausdorff_euclid);
    SpectralResult r = steklov_dirichlet_eigenvalues(curve, moved, h_target, k);
    for (int j = 0; j < k; ++j)
      e.delta_lambda.push_back(std::abs(r.eigenvalues[j] - base_r.eigenvalues[j]));
    e.used_in_fit = e.delta_lambda[0] >= 10.0 * rep.noise_floor[0];
    rep.entries.push_back(e);
  }

  std::vector<double> lx, ly;
  rep.constant = 0.0;
  for (const auto& e : rep.entries) {
    if (!e.used_in_fit) continue;
    lx.push_back(std::log(e.eps));
    ly.push_back(std::log(e.delta_lambda[0]));
    if (e.modulus > 0.0)
      rep.constant = std::max(rep.constant, e.delta_lambda[0] / e.modulus);
  }
  if (lx.size() >= 2) rep.loglog_fit = least_squares_line(lx, ly);
  return rep;
}

// ---------------------------------------------------------------------------
// Divergence study on the disk
// ---------------------------------------------------------------------------

struct DivergenceEntry {
  int n = 0;
  double lambda_coarse = 0.0;
  double lambda_fine = 0.0;
  double ratio = 0.0;      // lambda_fine / n
  double deviation = 0.0;  // cross-resolution relative deviation
  bool converged = false;
};

struct DivergenceReport {
  double m = 0.0;
  int k = 1;
  double h_coarse = 0.0, h_fine = 0.0;
  double deviation_tol = 0.02;
  std::vector<DivergenceEntry> entries;
  std::string provenance;
};

inline DivergenceReport divergence_study(const std::vector<int>& n_grid, double m, int k,
                                         double h_coarse, double h_fine,
                                         double deviation_tol = 0.02) {
  for (int n : n_grid)
    if (n < 1 || (n & (n - 1)) != 0)
      throw Error("divergence study expects an n grid of powers of two");
  for (std::size_t i = 0; i + 1 < n_grid.size(); ++i)
    if (!(n_grid[i] < n_grid[i + 1])) throw Error("n grid must be increasing");

  auto disk = std::make_shared<BoundaryCurve>(BoundaryCurve::circle(1.0));
  DivergenceReport rep;
  rep.m = m;
  rep.k = k;
  rep.h_coarse = h_coarse;
  rep.h_fine = h_fine;
  rep.deviation_tol = deviation_tol;

  for (int n : n_grid) {
    ArcSet arcs = lgl_sequence(disk, m, n);
    double feature = detail::min_feature_length(arcs, nullptr, nullptr);
    if (h_coarse > 0.5 * feature)
      throw Error("h_coarse inadmissible for n = " + std::to_string(n) +
                  "; maximum admissible h is " + std::to_string(0.5 * feature));
    DivergenceEntry e;
    e.n = n;
    SpectralResult rc = steklov_dirichlet_eigenvalues(disk, arcs, h_coarse, k);
    SpectralResult rf = steklov_dirichlet_eigenvalues(disk, arcs, h_fine, k);
    e.lambda_coarse = rc.eigenvalues[k - 1];
    e.lambda_fine = rf.eigenvalues[k - 1];
    e.ratio = e.lambda_fine / n;
    e.deviation = std::abs(e.lambda_coarse - e.lambda_fine) / e.lambda_fine;
    e.converged = e.deviation <= deviation_tol;
    if (rep.entries.empty()) rep.provenance = rf.provenance;
    rep.entries.push_back(e);
  }

  for (std::size_t i = 0; i + 1 < rep.entries.size(); ++i) {
    if (!(rep.entries[i + 1].lambda_fine > rep.entries[i].lambda_fine) ||
        !(rep.entries[i + 1].lambda_coarse > rep.entries[i].lambda_coarse))
      throw Error("eigenvalue failed to grow strictly between n = " +
                  std::to_string(rep.entries[i].n) + " and n = " +
                  std::to_string(rep.entries[i + 1].n));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Interface singularity exponent
// ---------------------------------------------------------------------------

struct SingularityReport {
  double exponent = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  std::vector<double> radii;
  std::vector<double> values;
  Vec2 interface_point = Vec2::Zero();
  Vec2 direction = Vec2::Zero();
  std::string provenance;
};

/// Inward ray direction bisecting the boundary tangents at an interface
/// point; at smooth points this is the inward normal.
inline Vec2 inward_bisector(const BoundaryCurve& curve, double t) {
  Vec2 fwd = curve.forward_tangent(t);
  Vec2 back = curve.backward_tangent(t);
  Vec2 sum = fwd - back;  // outgoing minus incoming tangent
  if (sum.norm() > 1e-8) {
    Vec2 dir = sum.normalized();
    // orient into the domain: the inward normal of the outgoing edge
    Vec2 inward{-fwd.y(), fwd.x()};
    if (dir.dot(inward) < 0.0) dir = -dir;
    return dir;
  }
  return Vec2{-fwd.y(), fwd.x()};
}

inline SingularityReport singularity_fit(CurvePtr curve, const ArcSet& arcs,
                                         double interface_param, double r_min,
                                         double r_max, int n_samples, double h_target) {
  double L = curve->total_length();
  bool endpoint = false;
  for (double t : arcs.endpoint_params())
    if (cyclic_distance(t, interface_param, L) <= 1e-12 * std::max(1.0, L)) endpoint = true;
  if (!endpoint) throw Error("interface point must be an arc endpoint");
  if (!(r_min > 0.0 && r_max > r_min)) throw Error("invalid radius window");

  auto mesh = std::make_shared<const Mesh>(mesh_domain(curve, arcs, h_target));
  if (r_min < 2.0 * mesh->h)
    throw Error("radius window must start at or above 2 h = " +
                std::to_string(2.0 * mesh->h));
  SpectralResult r = steklov_spectrum(mesh, 1);

  SingularityReport rep;
  rep.interface_point = curve->point(interface_param);
  rep.direction = inward_bisector(*curve, interface_param);
  rep.provenance = r.provenance;
  for (int i = 0; i < n_samples; ++i) {
    double rad = r_min * std::pow(r_max / r_min, double(i) / (n_samples - 1));
    Vec2 q = rep.interface_point + rad * rep.direction;
    double v = std::abs(interpolate_nodal(*mesh, r.eigenvectors.col(0), q));
    rep.radii.push_back(rad);
    rep.values.push_back(v);
  }
  LineFit fit = fit_power_law(rep.radii, rep.values);
  rep.exponent = fit.slope;
  rep.intercept = fit.intercept;
  rep.rms_residual = fit.rms_residual;
  return rep;
}

// ---------------------------------------------------------------------------
// Continuity along a bounded-component approach sequence
// ---------------------------------------------------------------------------

struct ContinuityEntry {
  double hausdorff_euclid = 0.0;
  double hausdorff_arclength = 0.0;
  double sym_diff = 0.0;
  std::vector<double> lambda;
  double gap = 0.0;  // |lambda_1(n) - lambda_1(target)|
};

struct ContinuityReport {
  int k = 0;
  std::vector<double> target_lambda;
  double noise_floor = 0.0;
  std::vector<ContinuityEntry> entries;
  bool gaps_decreasing_within_noise = true;
  std::string provenance;
};

inline ContinuityReport continuity_study(CurvePtr curve, const ArcSet& target,
                                         const std::vector<ArcSet>& sequence, int k,
                                         double h_target) {
  for (const auto& s : sequence)
    if (component_count(s) != component_count(target))
      throw Error("approach sequence changes the component count, violating the "
                  "bounded-components hypothesis");

  ContinuityReport rep;
  rep.k = k;
  SpectralResult rt = steklov_dirichlet_eigenvalues(curve, target, h_target, k);
  SpectralResult rt_fine = steklov_dirichlet_eigenvalues(curve, target, h_target / 2.0, k);
  rep.target_lambda = rt.eigenvalues;
  rep.noise_floor = std::abs(rt.eigenvalues[0] - rt_fine.eigenvalues[0]);
  rep.provenance = rt.provenance;

  auto target_d = complement(target);
  for (const auto& s : sequence) {
    ContinuityEntry e;
    auto sd = complement(s);
    e.hausdorff_euclid = hausdorff_distance(sd, target_d, BoundaryMetric::Euclidean);
    e.hausdorff_arclength = hausdorff_distance(sd, target_d, BoundaryMetric::Arclength);
    e.sym_diff = symmetric_difference_measure(s, target);
    SpectralResult r = steklov_dirichlet_eigenvalues(curve, s, h_target, k);
    e.lambda = r.eigenvalues;
    e.gap = std::abs(r.eigenvalues[0] - rt.eigenvalues[0]);
    rep.entries.push_back(e);
  }
  for (std::size_t i = 0; i + 1 < rep.entries.size(); ++i)
    if (rep.entries[i + 1].gap > rep.entries[i].gap + rep.noise_floor)
      rep.gaps_decreasing_within_noise = false;
  return rep;
}

}  // namespace steklov
