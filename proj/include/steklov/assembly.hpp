#pragma once

#include "steklov/meshing.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <memory>
#include <ostream>
#include <vector>

namespace steklov {

/// Symmetric sparse matrix assembled in a deterministic order; only the
/// lower triangle is stored.
class SymmetricSparse {
public:
  SymmetricSparse() = default;
  SymmetricSparse(int dim, const std::vector<Eigen::Triplet<double>>& lower_triplets)
      : lower_(dim, dim) {
    lower_.setFromTriplets(lower_triplets.begin(), lower_triplets.end());
    lower_.makeCompressed();
  }

  int dim() const { return static_cast<int>(lower_.rows()); }
  const Eigen::SparseMatrix<double>& lower() const { return lower_; }

  Eigen::SparseMatrix<double> full() const {
    Eigen::SparseMatrix<double> f =
        lower_.selfadjointView<Eigen::Lower>();
    f.makeCompressed();
    return f;
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    return lower_.selfadjointView<Eigen::Lower>() * v;
  }

  double quadratic_form(const Eigen::VectorXd& v) const { return v.dot(apply(v)); }

private:
  Eigen::SparseMatrix<double> lower_;
};

/// Coordinate-format text dump (row col value per line, sorted) for external
/// verification of assembled matrices.
inline void dump_coo(const SymmetricSparse& m, std::ostream& os) {
  auto full = m.full();
  os.precision(17);
  for (int k = 0; k < full.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(full, k); it; ++it)
      os << it.row() << " " << it.col() << " " << it.value() << "\n";
}

/// P1 stiffness matrix over all mesh vertices, exact per-triangle cotangent
/// formula. Constants lie in the kernel before constraints are applied.
inline SymmetricSparse assemble_stiffness(const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.triangles.size() * 6);
  for (const auto& t : mesh.triangles) {
    const Vec2 &p0 = mesh.vertices[t[0]], &p1 = mesh.vertices[t[1]],
               &p2 = mesh.vertices[t[2]];
    double area2 = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
    if (!(area2 > 0.0)) throw Error("degenerate triangle in stiffness assembly");
    Vec2 e[3] = {p2 - p1, p0 - p2, p1 - p0};  // edge opposite each vertex
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j <= i; ++j) {
        double k = e[i].dot(e[j]) / (2.0 * area2);
        int a = t[i], b = t[j];
        if (a >= b)
          trips.emplace_back(a, b, k);
        else
          trips.emplace_back(b, a, k);
      }
    }
  }
  return SymmetricSparse(mesh.num_vertices(), trips);
}

/// Boundary mass on Steklov-tagged edges only: per edge of length l the
/// 2x2 block (l/6) [[2,1],[1,2]].
inline SymmetricSparse assemble_boundary_mass(const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != EdgeTag::Steklov) continue;
    double l = (mesh.vertices[e.v1] - mesh.vertices[e.v0]).norm();
    int a = e.v0, b = e.v1;
    trips.emplace_back(a, a, l / 3.0);
    trips.emplace_back(b, b, l / 3.0);
    if (a >= b)
      trips.emplace_back(a, b, l / 6.0);
    else
      trips.emplace_back(b, a, l / 6.0);
  }
  return SymmetricSparse(mesh.num_vertices(), trips);
}

using SparseSolver = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>;

/// Discrete Rayleigh-quotient pair after Dirichlet elimination, optionally
/// carrying the Schur (boundary-reduced) pair.
struct DiscreteProblem {
  std::shared_ptr<const Mesh> mesh;
  SymmetricSparse A_full, M_full;  // all vertices

  std::vector<int> free_of_vertex;  // vertex -> free index, -1 if eliminated
  std::vector<int> vertex_of_free;
  std::vector<int> dirichlet_vertices;      // eliminated vertices, ascending
  std::vector<int> steklov_trace_vertices;  // vertices on Steklov edges, ascending

  Eigen::SparseMatrix<double> A, M;  // free-dof matrices (full symmetric storage)
  std::vector<int> steklov_dofs;     // free indices of Steklov-interior vertices
  std::vector<int> interior_dofs;    // remaining free indices
  std::shared_ptr<SparseSolver> A_solver;  // factorization of A (the PD check)

  // populated by schur_reduce
  bool reduced = false;
  Eigen::MatrixXd S, M_s;  // dense pair on steklov_dofs
  std::shared_ptr<SparseSolver> Aii_solver;
  Eigen::SparseMatrix<double> A_ib, A_bb;
};

namespace detail {

inline Eigen::SparseMatrix<double> submatrix(const Eigen::SparseMatrix<double>& m,
                                             const std::vector<int>& rows,
                                             const std::vector<int>& cols) {
  std::vector<int> rmap(m.rows(), -1), cmap(m.cols(), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) rmap[rows[i]] = static_cast<int>(i);
  for (std::size_t j = 0; j < cols.size(); ++j) cmap[cols[j]] = static_cast<int>(j);
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
      int r = rmap[it.row()], c = cmap[it.col()];
      if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
    }
  }
  Eigen::SparseMatrix<double> out(rows.size(), cols.size());
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

inline void require_positive_definite(const SparseSolver& solver, const char* what) {
  if (solver.info() != Eigen::Success)
    throw Error(std::string(what) + ": factorization failed");
  if ((solver.vectorD().array() <= 0.0).any())
    throw Error(std::string(what) + ": matrix is not positive definite");
}

}  // namespace detail

/// Eliminates Dirichlet-flagged vertices (rows and columns) from the
/// assembled pair; the resulting stiffness block is positive definite, which
/// is checked by factorizing it.
inline DiscreteProblem apply_dirichlet(const SymmetricSparse& A, const SymmetricSparse& M,
                                       std::shared_ptr<const Mesh> mesh) {
  if (A.dim() != mesh->num_vertices() || M.dim() != mesh->num_vertices())
    throw Error("matrices were assembled from a different mesh");
  DiscreteProblem p;
  p.mesh = mesh;
  p.A_full = A;
  p.M_full = M;

  int nv = mesh->num_vertices();
  p.free_of_vertex.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (mesh->vertex_flags[v] == VertexFlag::Dirichlet)
      p.dirichlet_vertices.push_back(v);
    else
      p.free_of_vertex[v] = static_cast<int>(p.vertex_of_free.size()),
      p.vertex_of_free.push_back(v);
  }
  if (p.dirichlet_vertices.empty())
    throw Error("no Dirichlet vertices: the complement must have positive measure");

  std::vector<char> on_steklov(nv, 0);
  for (const auto& e : mesh->boundary_edges) {
    if (e.tag != EdgeTag::Steklov) continue;
    on_steklov[e.v0] = on_steklov[e.v1] = 1;
  }
  for (int v = 0; v < nv; ++v)
    if (on_steklov[v]) p.steklov_trace_vertices.push_back(v);

  auto Af = A.full();
  auto Mf = M.full();
  p.A = detail::submatrix(Af, p.vertex_of_free, p.vertex_of_free);
  p.M = detail::submatrix(Mf, p.vertex_of_free, p.vertex_of_free);

  for (std::size_t f = 0; f < p.vertex_of_free.size(); ++f) {
    if (mesh->vertex_flags[p.vertex_of_free[f]] == VertexFlag::SteklovInterior)
      p.steklov_dofs.push_back(static_cast<int>(f));
    else
      p.interior_dofs.push_back(static_cast<int>(f));
  }

  p.A_solver = std::make_shared<SparseSolver>();
  p.A_solver->compute(p.A);
  detail::require_positive_definite(*p.A_solver, "stiffness after elimination");
  return p;
}

/// Populates the Schur pair: S = A_bb - A_bi A_ii^{-1} A_ib on the Steklov
/// degrees of freedom, M_s the boundary mass restricted to them. The pencil
/// (S, M_s) has exactly the finite eigenvalues of (A, M).
inline DiscreteProblem schur_reduce(const DiscreteProblem& p0) {
  DiscreteProblem p = p0;
  const auto& b = p.steklov_dofs;
  const auto& in = p.interior_dofs;
  int nb = static_cast<int>(b.size());
  if (nb == 0) throw Error("no Steklov degrees of freedom to reduce onto");

  p.A_bb = detail::submatrix(p.A, b, b);
  p.A_ib = detail::submatrix(p.A, in, b);
  auto A_ii = detail::submatrix(p.A, in, in);

  Eigen::MatrixXd S = Eigen::MatrixXd(p.A_bb);
  if (!in.empty()) {
    p.Aii_solver = std::make_shared<SparseSolver>();
    p.Aii_solver->compute(A_ii);
    detail::require_positive_definite(*p.Aii_solver, "interior stiffness block");
    Eigen::MatrixXd Aib = Eigen::MatrixXd(p.A_ib);
    for (int j = 0; j < nb; ++j) {
      Eigen::VectorXd x = p.Aii_solver->solve(Aib.col(j));
      S.col(j) -= Aib.transpose() * x;
    }
  }
  double scale = S.cwiseAbs().maxCoeff();
  double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    throw Error("Schur complement lost symmetry beyond tolerance");
  p.S = 0.5 * (S + S.transpose());
  p.M_s = Eigen::MatrixXd(detail::submatrix(p.M, b, b));
  p.reduced = true;
  return p;
}

/// Solves the mixed boundary value problem: Laplace with Neumann data g on
/// the Steklov part and (possibly inhomogeneous) Dirichlet data on the
/// Dirichlet part. Data vectors are indexed by steklov_trace_vertices and
/// dirichlet_vertices respectively. Returns the nodal solution on all
/// vertices.
inline Eigen::VectorXd solve_mixed_bvp(const DiscreteProblem& p,
                                       const Eigen::VectorXd& neumann_data,
                                       const Eigen::VectorXd& dirichlet_data) {
  int nv = p.mesh->num_vertices();
  if (neumann_data.size() != static_cast<Eigen::Index>(p.steklov_trace_vertices.size()))
    throw Error("neumann data size mismatch");
  if (dirichlet_data.size() != static_cast<Eigen::Index>(p.dirichlet_vertices.size()))
    throw Error("dirichlet data size mismatch");

  Eigen::VectorXd g = Eigen::VectorXd::Zero(nv);
  for (std::size_t i = 0; i < p.steklov_trace_vertices.size(); ++i)
    g[p.steklov_trace_vertices[i]] = neumann_data[i];
  Eigen::VectorXd u_lift = Eigen::VectorXd::Zero(nv);
  for (std::size_t i = 0; i < p.dirichlet_vertices.size(); ++i)
    u_lift[p.dirichlet_vertices[i]] = dirichlet_data[i];

  Eigen::VectorXd load = p.M_full.apply(g) - p.A_full.apply(u_lift);
  Eigen::VectorXd rhs(p.vertex_of_free.size());
  for (std::size_t f = 0; f < p.vertex_of_free.size(); ++f)
    rhs[f] = load[p.vertex_of_free[f]];

  Eigen::VectorXd u_f = p.A_solver->solve(rhs);
  // one step of iterative refinement keeps the residual at solver accuracy
  u_f += p.A_solver->solve(rhs - p.A * u_f);
  double rhs_norm = rhs.norm();
  if (rhs_norm > 0.0) {
    double res = (p.A * u_f - rhs).norm() / rhs_norm;
    if (res > 1e-10)
      throw Error("mixed BVP solve exceeded the residual tolerance");
  }

  Eigen::VectorXd u = u_lift;
  for (std::size_t f = 0; f < p.vertex_of_free.size(); ++f)
    u[p.vertex_of_free[f]] = u_f[f];
  return u;
}

/// Rayleigh quotient of the free-dof pencil. Dirichlet entries of the input
/// are ignored (the quotient is over the constrained space).
inline double rayleigh_quotient(const DiscreteProblem& p, const Eigen::VectorXd& nodal) {
  if (nodal.size() != p.mesh->num_vertices()) throw Error("nodal vector size mismatch");
  Eigen::VectorXd v(p.vertex_of_free.size());
  for (std::size_t f = 0; f < p.vertex_of_free.size(); ++f)
    v[f] = nodal[p.vertex_of_free[f]];
  double den = v.dot(p.M * v);
  double num = v.dot(p.A * v);
  if (!(den > 0.0) || den <= 1e-300 * std::max(1.0, num))
    throw Error("rayleigh quotient undefined: zero boundary trace");
  return num / den;
}

}  // namespace steklov
