#include "mae/fem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/IterativeLinearSolvers>

#include "mae/error.hpp"

namespace mae {

SymTensorField cofactor(const SymTensorField& field) {
  SymTensorField out(field.size());
  std::transform(field.begin(), field.end(), out.begin(), [](const Sym2& t) { return cofactor(t); });
  return out;
}

SymTensorField project_psd(const SymTensorField& field) {
  SymTensorField out(field.size());
  std::transform(field.begin(), field.end(), out.begin(),
                 [](const Sym2& t) { return project_psd(t); });
  return out;
}

FemSpace::FemSpace(const TriMesh& mesh) : mesh_(mesh) {
  const int nt = mesh.num_triangles();
  gradients_.resize(nt);
  weights_.resize(mesh.num_vertices());
  for (int k = 0; k < mesh.num_vertices(); ++k) weights_[k] = mesh.patch_area(k) / 3.0;

  std::vector<Eigen::Triplet<double>> entries;
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangle(t);
    const Point& a = mesh.vertex(tri[0]);
    const Point& b = mesh.vertex(tri[1]);
    const Point& c = mesh.vertex(tri[2]);
    const double twice_area = 2.0 * mesh.triangle_area(t);
    // grad(lambda_i) is the inward normal of the opposite edge over its height.
    gradients_[t][0] = Eigen::Vector2d(b.y() - c.y(), c.x() - b.x()) / twice_area;
    gradients_[t][1] = Eigen::Vector2d(c.y() - a.y(), a.x() - c.x()) / twice_area;
    gradients_[t][2] = Eigen::Vector2d(a.y() - b.y(), b.x() - a.x()) / twice_area;
    for (int r = 0; r < 3; ++r) {
      const int ir = mesh.interior_index(tri[r]);
      if (ir < 0) continue;
      for (int s = 0; s < 3; ++s) {
        const int is = mesh.interior_index(tri[s]);
        if (is >= 0) entries.emplace_back(ir, is, 0.0);
      }
    }
  }
  const int n = mesh.num_interior();
  pattern_.resize(n, n);
  pattern_.setFromTriplets(entries.begin(), entries.end());
  pattern_.makeCompressed();

  auto slot_of = [this](int row, int col) {
    const int* begin = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[row];
    const int* end = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[row + 1];
    const int* it = std::lower_bound(begin, end, col);
    return static_cast<int>(it - pattern_.innerIndexPtr());
  };
  slots_.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangle(t);
    for (int r = 0; r < 3; ++r) {
      for (int s = 0; s < 3; ++s) {
        const int ir = mesh.interior_index(tri[r]);
        const int is = mesh.interior_index(tri[s]);
        slots_[t][3 * r + s] = (ir >= 0 && is >= 0) ? slot_of(ir, is) : -1;
      }
    }
  }
  diagonal_slot_.resize(n);
  for (int i = 0; i < n; ++i) diagonal_slot_[i] = slot_of(i, i);
}

Eigen::Vector2d FemSpace::gradient(int t, const NodalField& u) const {
  const auto& tri = mesh_.triangle(t);
  const auto& g = gradients_[t];
  return u[tri[0]] * g[0] + u[tri[1]] * g[1] + u[tri[2]] * g[2];
}

Eigen::VectorXd FemSpace::restrict_to_interior(const NodalField& u) const {
  const auto& interior = mesh_.interior_vertices();
  Eigen::VectorXd out(interior.size());
  for (std::size_t i = 0; i < interior.size(); ++i) out[i] = u[interior[i]];
  return out;
}

NodalField FemSpace::extend_from_interior(const Eigen::VectorXd& interior) const {
  NodalField out = NodalField::Zero(num_vertices());
  const auto& ids = mesh_.interior_vertices();
  for (std::size_t i = 0; i < ids.size(); ++i) out[ids[i]] = interior[i];
  return out;
}

void FemSpace::check_field(const NodalField& u, const char* what) const {
  if (u.size() != num_vertices())
    throw InvalidArgument(std::string(what) + ": field length " + std::to_string(u.size()) +
                          " does not match vertex count " + std::to_string(num_vertices()));
}

void FemSpace::check_field(const SymTensorField& p, const char* what) const {
  if (static_cast<int>(p.size()) != num_vertices())
    throw InvalidArgument(std::string(what) + ": tensor field length " + std::to_string(p.size()) +
                          " does not match vertex count " + std::to_string(num_vertices()));
}

Eigen::Matrix3d local_stiffness(const std::array<Eigen::Vector2d, 3>& gradients, double area,
                                const Sym2& coeff) {
  Eigen::Matrix3d k;
  for (int r = 0; r < 3; ++r) {
    const Eigen::Vector2d flux = coeff * gradients[r];
    for (int s = r; s < 3; ++s) k(r, s) = k(s, r) = area * flux.dot(gradients[s]);
  }
  return k;
}

SparseMatrix FemSpace::assemble(const SymTensorField& coeff, double scale) const {
  check_field(coeff, "assemble");
  for (int k = 0; k < num_vertices(); ++k) {
    if (coeff[k].min_eigenvalue() < -1e-10)
      throw InvalidArgument("coefficient tensor at vertex " + std::to_string(k) +
                            " is not positive semidefinite");
  }
  SparseMatrix a = pattern_;
  double* values = a.valuePtr();
  std::fill(values, values + a.nonZeros(), 0.0);
  if (scale != 0.0) {
    for (int t = 0; t < mesh_.num_triangles(); ++t) {
      const auto& tri = mesh_.triangle(t);
      const Sym2 mean = (1.0 / 3.0) * (coeff[tri[0]] + coeff[tri[1]] + coeff[tri[2]]);
      const Eigen::Matrix3d k = local_stiffness(gradients_[t], mesh_.triangle_area(t), mean);
      for (int r = 0; r < 3; ++r) {
        for (int s = 0; s < 3; ++s) {
          const int slot = slots_[t][3 * r + s];
          if (slot >= 0) values[slot] += scale * k(r, s);
        }
      }
    }
  }
  const auto& interior = mesh_.interior_vertices();
  for (std::size_t i = 0; i < interior.size(); ++i) values[diagonal_slot_[i]] += weights_[interior[i]];
  return a;
}

SparseMatrix FemSpace::laplacian() const {
  SparseMatrix a = pattern_;
  double* values = a.valuePtr();
  std::fill(values, values + a.nonZeros(), 0.0);
  for (int t = 0; t < mesh_.num_triangles(); ++t) {
    const Eigen::Matrix3d k = local_stiffness(gradients_[t], mesh_.triangle_area(t), Sym2::identity());
    for (int e = 0; e < 9; ++e) {
      const int slot = slots_[t][e];
      if (slot >= 0) values[slot] += k(e / 3, e % 3);
    }
  }
  return a;
}

double lumped_inner(const FemSpace& space, const NodalField& phi, const NodalField& theta) {
  space.check_field(phi, "lumped_inner");
  space.check_field(theta, "lumped_inner");
  return (space.lumped_weights().array() * phi.array() * theta.array()).sum();
}

double lumped_norm(const FemSpace& space, const NodalField& v) {
  return std::sqrt(lumped_inner(space, v, v));
}

SymTensorField elliptic_coefficient(const SymTensorField& p, double eps) {
  SymTensorField out(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) out[k] = eps * Sym2::identity() + cofactor(p[k]);
  return out;
}

Eigen::VectorXd solve_spd(const SpdSystem& system, const SolverOptions& options,
                          const Eigen::VectorXd* initial_guess) {
  const auto& a = system.matrix;
  const auto n = a.rows();
  if (a.cols() != n || system.rhs.size() != n)
    throw InvalidArgument("solve_spd: dimension mismatch");
  if (n == 0) return Eigen::VectorXd();
  if ((a.diagonal().array() <= 0.0).any())
    throw InvalidArgument("solve_spd: matrix has a non-positive diagonal entry");

  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(options.relative_tolerance);
  cg.setMaxIterations(static_cast<Eigen::Index>(options.max_iterations_factor) * n);
  cg.compute(a);
  Eigen::VectorXd x = (initial_guess && initial_guess->size() == n)
                          ? cg.solveWithGuess(system.rhs, *initial_guess).eval()
                          : cg.solve(system.rhs).eval();
  if (cg.info() != Eigen::Success)
    throw ConvergenceError("conjugate gradients did not converge within " +
                               std::to_string(cg.maxIterations()) +
                               " iterations (relative residual " + std::to_string(cg.error()) + ")",
                           cg.error());
  return x;
}

NodalField elliptic_step(const FemSpace& space, const SymTensorField& p, const NodalField& u_prev,
                         double eps, double tau, const SolverOptions& options) {
  space.check_field(u_prev, "elliptic_step");
  space.check_field(p, "elliptic_step");
  if (tau < 0.0 || eps < 0.0) throw InvalidArgument("elliptic_step: eps and tau must be >= 0");
  const Eigen::VectorXd previous = space.restrict_to_interior(u_prev);
  if (tau == 0.0) return space.extend_from_interior(previous);

  SpdSystem system{space.assemble(elliptic_coefficient(p, eps), tau),
                   space.restrict_to_interior(space.lumped_weights().cwiseProduct(u_prev))};
  return space.extend_from_interior(solve_spd(system, options, &previous));
}

NodalField poisson_solve(const FemSpace& space, const NodalField& f, const SolverOptions& options) {
  space.check_field(f, "poisson_solve");
  SpdSystem system{space.laplacian(),
                   space.restrict_to_interior(space.lumped_weights().cwiseProduct(f))};
  return space.extend_from_interior(solve_spd(system, options));
}

double estimate_laplacian_eigenvalue(const FemSpace& space, int iterations) {
  const SparseMatrix k = space.laplacian();
  const Eigen::VectorXd mass = space.restrict_to_interior(space.lumped_weights());
  Eigen::VectorXd x = Eigen::VectorXd::Ones(space.num_interior());
  SolverOptions options;
  options.relative_tolerance = 1e-10;
  for (int it = 0; it < iterations; ++it) {
    SpdSystem system{k, mass.cwiseProduct(x)};
    x = solve_spd(system, options, &x);
    x /= std::sqrt(x.dot(mass.cwiseProduct(x)));
  }
  return x.dot(k * x) / x.dot(mass.cwiseProduct(x));
}

double symmetry_defect(const SparseMatrix& a) {
  double worst = 0.0;
  for (int r = 0; r < a.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      const double mirror = a.coeff(it.col(), it.row());
      const double scale = std::max(std::abs(it.value()), std::abs(mirror));
      if (scale > 0.0) worst = std::max(worst, std::abs(it.value() - mirror) / scale);
    }
  }
  return worst;
}

}  // namespace mae
