#pragma once

#include "steklov/assembly.hpp"

#include <Eigen/Eigenvalues>

#include <sstream>
#include <string>
#include <vector>

namespace steklov {

/// Ascending eigenpairs of the dense symmetric pencil S y = lambda M y with
/// both matrices positive definite. Reduction via the Cholesky factor of M;
/// eigenvector signs are fixed by making the largest-magnitude entry
/// positive. Vectors are M-orthonormal.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> generalized_symmetric_eig(
    const Eigen::MatrixXd& S, const Eigen::MatrixXd& M, int k) {
  if (S.rows() != S.cols() || M.rows() != M.cols() || S.rows() != M.rows())
    throw Error("pencil matrices must be square and of equal size");
  if (k < 1 || k > S.rows())
    throw Error("requested " + std::to_string(k) + " eigenpairs from a pencil of size " +
                std::to_string(S.rows()));
  Eigen::LLT<Eigen::MatrixXd> mllt(M);
  if (mllt.info() != Eigen::Success)
    throw Error("mass matrix is not positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, M);
  if (es.info() != Eigen::Success) throw Error("generalized eigensolve failed");

  Eigen::VectorXd vals = es.eigenvalues().head(k);
  Eigen::MatrixXd vecs = es.eigenvectors().leftCols(k);
  for (int j = 0; j < k; ++j) {
    int imax = 0;
    for (int i = 1; i < vecs.rows(); ++i)
      if (std::abs(vecs(i, j)) > std::abs(vecs(imax, j))) imax = i;
    if (vecs(imax, j) < 0.0) vecs.col(j) = -vecs.col(j);
  }
  return {vals, vecs};
}

/// Spectrum with full-mesh nodal eigenvectors: Steklov dofs from the Schur
/// pencil, interior dofs by harmonic extension, Dirichlet dofs zero.
struct SpectralResult {
  std::vector<double> eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors;     // num_vertices x k
  std::vector<double> residuals;    // relative free-dof pencil residuals
  std::vector<int> cluster_id;      // eigenvalues within 1e-8 relative share an id
  double h = 0.0;
  int k = 0;
  std::string provenance;
};

namespace detail {

inline std::string describe_curve(const BoundaryCurve& c) {
  std::ostringstream os;
  os.precision(17);
  switch (c.kind()) {
    case CurveKind::Circle:
      os << "circle r=" << c.radius();
      break;
    case CurveKind::Polygon:
      os << "polygon";
      for (const auto& v : c.vertices()) os << " " << v.x() << "," << v.y();
      break;
    case CurveKind::Star:
      os << "star c=" << c.star_center().x() << "," << c.star_center().y() << " a=";
      for (double a : c.star_cos_coeffs()) os << a << ",";
      os << " b=";
      for (double b : c.star_sin_coeffs()) os << b << ",";
      break;
  }
  return os.str();
}

inline std::string provenance_hash(const Mesh& mesh, int k, const char* settings) {
  std::ostringstream os;
  os.precision(17);
  os << describe_curve(*mesh.curve) << "|arcs";
  for (const auto& iv : mesh.arcs.intervals()) os << " " << iv.a << ":" << iv.b;
  os << "|V=" << mesh.num_vertices() << "|T=" << mesh.num_triangles()
     << "|h=" << mesh.h << "|k=" << k << "|" << settings;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(os.str())));
  return std::string(buf);
}

inline std::vector<int> cluster_eigenvalues(const std::vector<double>& vals) {
  std::vector<int> id(vals.size(), 0);
  int cur = 0;
  for (std::size_t i = 1; i < vals.size(); ++i) {
    double scale = std::max(std::abs(vals[i]), std::abs(vals[i - 1]));
    if (std::abs(vals[i] - vals[i - 1]) > 1e-8 * scale) ++cur;
    id[i] = cur;
  }
  return id;
}

}  // namespace detail

/// Solves the Steklov-Dirichlet eigenproblem on an assembled problem. The
/// problem must be Schur-reduced; the pencil invariants (residuals, mass
/// orthonormality, Rayleigh identity) are verified before returning.
inline SpectralResult steklov_spectrum(const DiscreteProblem& p, int k) {
  if (!p.reduced) throw Error("problem must be Schur-reduced before eigensolving");
  auto [vals, yvecs] = generalized_symmetric_eig(p.S, p.M_s, k);

  const Mesh& mesh = *p.mesh;
  int nfree = static_cast<int>(p.vertex_of_free.size());
  Eigen::MatrixXd free_vecs = Eigen::MatrixXd::Zero(nfree, k);
  for (int j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < p.steklov_dofs.size(); ++i)
      free_vecs(p.steklov_dofs[i], j) = yvecs(static_cast<Eigen::Index>(i), j);
    if (!p.interior_dofs.empty()) {
      Eigen::VectorXd rhs = -(p.A_ib * yvecs.col(j));
      Eigen::VectorXd ui = p.Aii_solver->solve(rhs);
      for (std::size_t i = 0; i < p.interior_dofs.size(); ++i)
        free_vecs(p.interior_dofs[i], j) = ui[static_cast<Eigen::Index>(i)];
    }
  }

  SpectralResult r;
  r.k = k;
  r.h = mesh.h;
  r.eigenvalues.assign(vals.data(), vals.data() + k);
  r.cluster_id = detail::cluster_eigenvalues(r.eigenvalues);
  r.residuals.resize(k);
  r.eigenvectors = Eigen::MatrixXd::Zero(mesh.num_vertices(), k);

  if (!(r.eigenvalues.front() > 0.0))
    throw Error("first eigenvalue is not positive; problem is inconsistent");

  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd u = free_vecs.col(j);
    Eigen::VectorXd Au = p.A * u;
    Eigen::VectorXd Mu = p.M * u;
    double res = (Au - vals[j] * Mu).norm() / Au.norm();
    if (!(res <= 1e-8))
      throw Error("eigenpair residual " + std::to_string(res) + " exceeds 1e-8");
    r.residuals[j] = res;
    double rq = u.dot(Au) / u.dot(Mu);
    if (std::abs(rq - vals[j]) > 1e-9 * std::abs(vals[j]))
      throw Error("Rayleigh identity violated for an eigenpair");
    for (int l = 0; l <= j; ++l) {
      double mij = free_vecs.col(l).dot(Mu) - (l == j ? 1.0 : 0.0);
      if (std::abs(mij) > 1e-9)
        throw Error("eigenvectors are not mass-orthonormal");
    }
  }

  for (int j = 0; j < k; ++j) {
    for (int f = 0; f < nfree; ++f)
      r.eigenvectors(p.vertex_of_free[f], j) = free_vecs(f, j);
    int imax = 0;
    for (int i = 1; i < r.eigenvectors.rows(); ++i)
      if (std::abs(r.eigenvectors(i, j)) > std::abs(r.eigenvectors(imax, j))) imax = i;
    if (r.eigenvectors(imax, j) < 0.0) r.eigenvectors.col(j) = -r.eigenvectors.col(j);
  }
  r.provenance = detail::provenance_hash(mesh, k, "schur");
  return r;
}

/// Assembles and solves on an existing mesh.
inline SpectralResult steklov_spectrum(std::shared_ptr<const Mesh> mesh, int k) {
  auto p = schur_reduce(
      apply_dirichlet(assemble_stiffness(*mesh), assemble_boundary_mass(*mesh), mesh));
  return steklov_spectrum(p, k);
}

/// Full pipeline: mesh, assemble, eliminate, reduce, solve.
inline SpectralResult steklov_dirichlet_eigenvalues(CurvePtr curve, const ArcSet& arcs,
                                                    double h_target, int k) {
  if (k < 1) throw Error("k must be positive");
  auto mesh = std::make_shared<const Mesh>(mesh_domain(curve, arcs, h_target));
  return steklov_spectrum(mesh, k);
}

/// Oracle path: the finite eigenvalues of the unreduced free-dof pencil
/// A u = lambda M u, computed densely through the Cholesky factor of A. The
/// pencil mass is singular on interior dofs, so the finite spectrum is
/// recovered from the largest eigenvalues of the inverted problem. Intended
/// for modest fixture sizes.
inline std::vector<double> full_pencil_eigenvalues(const DiscreteProblem& p, int k) {
  int n = static_cast<int>(p.vertex_of_free.size());
  int rank = static_cast<int>(p.steklov_dofs.size());
  if (k < 1 || k > rank)
    throw Error("requested more eigenvalues than the pencil mass rank");
  Eigen::MatrixXd A = Eigen::MatrixXd(p.A);
  Eigen::MatrixXd M = Eigen::MatrixXd(p.M);
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw Error("free-dof stiffness is not positive definite");
  Eigen::MatrixXd L = llt.matrixL();
  // G = L^{-1} M L^{-T}; mu = 1/lambda are its nonzero eigenvalues
  Eigen::MatrixXd G = L.triangularView<Eigen::Lower>().solve(M);
  G = L.triangularView<Eigen::Lower>().solve(G.transpose().eval());
  G = 0.5 * (G + G.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  if (es.info() != Eigen::Success) throw Error("dense eigensolve failed");
  std::vector<double> lambdas;
  for (int j = 0; j < k; ++j) {
    double mu = es.eigenvalues()[n - 1 - j];
    if (!(mu > 0.0)) throw Error("pencil rank deficient beyond the Steklov dofs");
    lambdas.push_back(1.0 / mu);
  }
  return lambdas;
}

}  // namespace steklov
