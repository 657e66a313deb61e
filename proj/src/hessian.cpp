#include "mae/hessian.hpp"

#include <cmath>
#include <string>

#include <Eigen/SparseCholesky>

#include "mae/error.hpp"

namespace mae {

namespace {

using ColMatrix = Eigen::SparseMatrix<double>;
using Cholesky = Eigen::SimplicialLLT<ColMatrix>;

// c sum_T |T| K_T + M, restricted to interior vertices when interior_only.
ColMatrix regularization_matrix(const FemSpace& space, double c, bool interior_only) {
  const TriMesh& mesh = space.mesh();
  auto index = [&](int v) { return interior_only ? mesh.interior_index(v) : v; };
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(9 * mesh.num_triangles() + mesh.num_vertices());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.triangle_area(t);
    const Eigen::Matrix3d k =
        local_stiffness(space.basis_gradients(t), area, (c * area) * Sym2::identity());
    const auto& tri = mesh.triangle(t);
    for (int r = 0; r < 3; ++r) {
      const int ir = index(tri[r]);
      if (ir < 0) continue;
      for (int s = 0; s < 3; ++s) {
        const int is = index(tri[s]);
        if (is >= 0) entries.emplace_back(ir, is, k(r, s));
      }
    }
  }
  const auto& w = space.lumped_weights();
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const int i = index(v);
    if (i >= 0) entries.emplace_back(i, i, w[v]);
  }
  const int n = interior_only ? mesh.num_interior() : mesh.num_vertices();
  ColMatrix a(n, n);
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

}  // namespace

struct HessianRecovery::Factors {
  Cholesky interior;
  Cholesky full;
};

HessianRecovery::HessianRecovery(const FemSpace& space, double c)
    : space_(space), c_(c), factors_(std::make_unique<Factors>()) {
  if (!(c > 0.0)) throw InvalidArgument("regularization constant c must be positive");
  factors_->interior.compute(regularization_matrix(space, c, true));
  factors_->full.compute(regularization_matrix(space, c, false));
  if (factors_->interior.info() != Eigen::Success || factors_->full.info() != Eigen::Success)
    throw Error("Cholesky factorization of the regularization operator failed");
}

HessianRecovery::~HessianRecovery() = default;
HessianRecovery::HessianRecovery(HessianRecovery&&) noexcept = default;

SymTensorField HessianRecovery::operator()(const NodalField& u) const {
  space_.check_field(u, "discrete_hessian");
  const TriMesh& mesh = space_.mesh();
  const int n0 = mesh.num_interior();

  // Right-hand sides of the first problem, one column per component (11, 12, 22).
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n0, 3);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Eigen::Vector2d du = space_.gradient(t, u);
    const double area = mesh.triangle_area(t);
    const auto& g = space_.basis_gradients(t);
    const auto& tri = mesh.triangle(t);
    for (int r = 0; r < 3; ++r) {
      const int i = mesh.interior_index(tri[r]);
      if (i < 0) continue;
      rhs(i, 0) -= area * du.x() * g[r].x();
      rhs(i, 1) -= area * 0.5 * (du.x() * g[r].y() + du.y() * g[r].x());
      rhs(i, 2) -= area * du.y() * g[r].y();
    }
  }
  const Eigen::MatrixXd pi = factors_->interior.solve(rhs);

  const auto& w = space_.lumped_weights();
  Eigen::MatrixXd mass_pi = Eigen::MatrixXd::Zero(mesh.num_vertices(), 3);
  const auto& interior = mesh.interior_vertices();
  for (int i = 0; i < n0; ++i) mass_pi.row(interior[i]) = w[interior[i]] * pi.row(i);
  const Eigen::MatrixXd hess = factors_->full.solve(mass_pi);

  SymTensorField out(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) out[v] = {hess(v, 0), hess(v, 1), hess(v, 2)};
  return out;
}

SymTensorField relax_p(const SymTensorField& p_old, const SymTensorField& hess, double gamma,
                       double tau) {
  if (p_old.size() != hess.size()) throw InvalidArgument("relax_p: field size mismatch");
  const double keep = std::exp(-gamma * tau);
  SymTensorField out(p_old.size());
  for (std::size_t k = 0; k < p_old.size(); ++k) {
    out[k] = project_psd(keep * p_old[k] + (1.0 - keep) * hess[k]);
  }
  return out;
}

}  // namespace mae
