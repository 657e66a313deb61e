#pragma once

#include <vector>

#include <Eigen/Core>

#include "mae/fem.hpp"

namespace mae {

/// Radially symmetric solution on the unit disk, sampled on a uniform grid
/// of [0, 1].
struct RadialSolution {
  std::vector<double> r;
  std::vector<double> u;
  double lambda = 0.0;
  double u0 = 0.0;
  /// 2 pi int |u|^{d+1} r dr (power), 2 pi int |u|^2 r dr (linear) or
  /// 2 pi int (e^{-u} - 1) r dr (Bratu), by the trapezoidal rule.
  double constraint_value = 0.0;

  /// Piecewise linear interpolation; r is clamped to [0, 1].
  double eval(double radius) const;
};

struct ShootingOptions {
  int points = 10000;
  /// Target for |u(1)|.
  double tol = 1e-12;
  int max_iters = 200;
  double lambda_min = 0.1;
  double lambda_max = 100.0;
};

/// det D^2 u = lambda |u| on the disk, normalized so that int u^2 = 1.
RadialSolution shoot_maev(int d = 2, const ShootingOptions& options = {});

/// det D^2 u = lambda |u|^d on the disk, normalized so that int |u|^{d+1} = 1.
RadialSolution shoot_maevd(int d = 2, const ShootingOptions& options = {});

/// det D^2 u = lambda e^{-u} with u(0) = u0 fixed; constraint_value is the
/// resulting C. Requires u0 < 0.
RadialSolution shoot_bratu(double u0, const ShootingOptions& options = {});

struct BratuPoint {
  double u0 = 0.0;
  double lambda = 0.0;
  double C = 0.0;
};

/// n equally spaced values of u(0) from u0_min to u0_max inclusive.
std::vector<BratuPoint> bratu_sweep(double u0_min, double u0_max, int n,
                                    const ShootingOptions& options = {});

/// Maximum of lambda over u(0) (the fold of the Bratu branch), located by a
/// coarse scan of [u0_min, u0_max] followed by golden-section refinement.
BratuPoint bratu_turning_point(double u0_min = -6.0, double u0_max = -0.05,
                               const ShootingOptions& options = {});

/// The radial Bratu solution whose constraint value equals C. C grows
/// monotonically as u(0) decreases, so this is a scalar root find.
RadialSolution bratu_for_constraint(double C, const ShootingOptions& options = {});

/// Iterates x <- (I + tau A)^{-1} x / ||.|| from x0 and returns the limit with
/// its Rayleigh quotient x^T A x. Throws InvalidArgument when I + tau A is
/// singular or x0 is zero.
struct EigenSplitResult {
  Eigen::VectorXd x;
  double lambda = 0.0;
  int iterations = 0;
  bool converged = false;
};
EigenSplitResult linear_eigen_split(const Eigen::MatrixXd& a, const Eigen::VectorXd& x0, double tau,
                                    int max_iters, double tol = 1e-14);

/// ||u_h - I_h u||_0h where u(x) = radial.eval(|x - center|) is interpolated
/// at the mesh vertices.
double radial_l2_error(const FemSpace& space, const NodalField& u_h, const RadialSolution& radial,
                       const Eigen::Vector2d& center = Eigen::Vector2d::Zero());

}  // namespace mae
