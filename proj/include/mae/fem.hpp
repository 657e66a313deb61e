#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "mae/mesh.hpp"
#include "mae/tensor.hpp"

namespace mae {

/// One value per mesh vertex (an element of V_h, or V_0h when the boundary
/// values are zero).
using NodalField = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Symmetric positive definite system over the interior degrees of freedom.
struct SpdSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
};

struct SolverOptions {
  double relative_tolerance = 1e-12;
  /// Iteration cap as a multiple of the system dimension.
  int max_iterations_factor = 10;
};

/// P1 space on a mesh: per-triangle basis gradients, lumped weights
/// |omega_k|/3 and the sparsity pattern of interior-DOF matrices. Holds a
/// reference to the mesh, which must outlive it.
class FemSpace {
 public:
  explicit FemSpace(const TriMesh& mesh);

  const TriMesh& mesh() const { return mesh_; }
  int num_vertices() const { return mesh_.num_vertices(); }
  int num_interior() const { return mesh_.num_interior(); }

  /// Gradients of the three barycentric basis functions on triangle t.
  const std::array<Eigen::Vector2d, 3>& basis_gradients(int t) const { return gradients_[t]; }
  /// Constant gradient of u on triangle t.
  Eigen::Vector2d gradient(int t, const NodalField& u) const;

  /// Lumped quadrature weights |omega_k| / 3; they sum to the mesh area.
  const Eigen::VectorXd& lumped_weights() const { return weights_; }

  /// Interior values of a full nodal field.
  Eigen::VectorXd restrict_to_interior(const NodalField& u) const;
  /// Full nodal field with zero boundary values.
  NodalField extend_from_interior(const Eigen::VectorXd& interior) const;

  /// M + scale * K(coeff) over the interior DOFs, where M is the lumped mass
  /// matrix and K the stiffness matrix with the per-triangle coefficient
  /// equal to the mean of its three vertex tensors.
  SparseMatrix assemble(const SymTensorField& coeff, double scale) const;

  /// Unscaled stiffness matrix with identity coefficient (interior DOFs).
  SparseMatrix laplacian() const;

  void check_field(const NodalField& u, const char* what) const;
  void check_field(const SymTensorField& p, const char* what) const;

 private:
  const TriMesh& mesh_;
  std::vector<std::array<Eigen::Vector2d, 3>> gradients_;
  Eigen::VectorXd weights_;
  SparseMatrix pattern_;
  // Position in pattern_.valuePtr() of each local (row, col) entry, or -1
  // when either vertex is on the boundary.
  std::vector<std::array<int, 9>> slots_;
  std::vector<int> diagonal_slot_;
};

/// Lumped inner product (phi, theta)_h = sum_k |omega_k|/3 phi_k theta_k.
double lumped_inner(const FemSpace& space, const NodalField& phi, const NodalField& theta);
double lumped_norm(const FemSpace& space, const NodalField& v);

/// Exact integral of coeff grad(v_s) . grad(v_r) over one triangle.
Eigen::Matrix3d local_stiffness(const std::array<Eigen::Vector2d, 3>& gradients, double area,
                                const Sym2& coeff);

/// The assembly coefficient for the splitting steps: eps I + cof(p).
SymTensorField elliptic_coefficient(const SymTensorField& p, double eps);

/// Jacobi-preconditioned conjugate gradients. Throws ConvergenceError when
/// the iteration cap is hit.
Eigen::VectorXd solve_spd(const SpdSystem& system, const SolverOptions& options = {},
                          const Eigen::VectorXd* initial_guess = nullptr);

/// Solves (u, v)_h + tau int (eps I + cof p) grad u . grad v = (u_prev, v)_h
/// for all v in V_0h.
NodalField elliptic_step(const FemSpace& space, const SymTensorField& p, const NodalField& u_prev,
                         double eps, double tau, const SolverOptions& options = {});

/// Solves int grad u . grad v = (f, v)_h for all v in V_0h.
NodalField poisson_solve(const FemSpace& space, const NodalField& f,
                         const SolverOptions& options = {});

/// Smallest eigenvalue of the discrete Dirichlet Laplacian, K x = lambda M x,
/// by inverse power iteration started from the constant interior field.
double estimate_laplacian_eigenvalue(const FemSpace& space, int iterations = 50);

/// max_ij |A_ij - A_ji| / max(|A_ij|, |A_ji|) over stored pairs.
double symmetry_defect(const SparseMatrix& a);

}  // namespace mae
