#include "mae/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include <Eigen/LU>

#include "mae/error.hpp"

namespace mae {

namespace {

// Right-hand side g(u, lambda) of w' = r g, u' = sqrt(2 w), where w = u'^2 / 2.
using Source = std::function<double(double u, double lambda)>;

struct Profile {
  std::vector<double> r;
  std::vector<double> u;
};

// RK4 on a uniform grid. Near r = 0 the square root of w ~ r^2 spoils the
// RK4 order, so the first kSeriesCells cells use the expansion
//   u = u0 + a r^2 / 2 + g_u r^4 / 32,  w = g0 r^2 / 2 + a g_u r^4 / 8,
// with a = sqrt(g0) and g_u = dg/du at u0, accurate to O(r^6).
constexpr int kSeriesCells = 8;

Profile integrate(const Source& g, double u0, double lambda, int points) {
  const double dr = 1.0 / points;
  Profile out;
  out.r.resize(points + 1);
  out.u.resize(points + 1);
  for (int i = 0; i <= points; ++i) out.r[i] = i * dr;

  const double g0 = g(u0, lambda);
  const double a = std::sqrt(std::max(g0, 0.0));
  const double h = 1e-6 * std::max(1.0, std::abs(u0));
  const double g_u = (g(u0 + h, lambda) - g(u0 - h, lambda)) / (2.0 * h);
  const int start = std::min(kSeriesCells, points);
  out.u[0] = u0;
  double u = u0, w = 0.0;
  for (int i = 1; i <= start; ++i) {
    const double r2 = out.r[i] * out.r[i];
    u = u0 + a * r2 / 2.0 + g_u * r2 * r2 / 32.0;
    w = g0 * r2 / 2.0 + a * g_u * r2 * r2 / 8.0;
    out.u[i] = u;
  }

  auto f = [&](double r, double uu, double ww, double& du, double& dw) {
    du = std::sqrt(std::max(2.0 * ww, 0.0));
    dw = r * g(uu, lambda);
  };
  for (int i = start; i < points; ++i) {
    const double r = out.r[i];
    double k1u, k1w, k2u, k2w, k3u, k3w, k4u, k4w;
    f(r, u, w, k1u, k1w);
    f(r + dr / 2, u + dr / 2 * k1u, w + dr / 2 * k1w, k2u, k2w);
    f(r + dr / 2, u + dr / 2 * k2u, w + dr / 2 * k2w, k3u, k3w);
    f(r + dr, u + dr * k3u, w + dr * k3w, k4u, k4w);
    u += dr / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
    w += dr / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
    out.u[i + 1] = u;
  }
  return out;
}

// Secant iteration on lambda for u(1) = 0, falling back to bisection
// whenever the secant step leaves the current sign-change bracket.
double shoot_lambda(const Source& g, double u0, const ShootingOptions& o) {
  auto end_value = [&](double lambda) { return integrate(g, u0, lambda, o.points).u.back(); };
  double lo = o.lambda_min, hi = o.lambda_max;
  double f_lo = end_value(lo), f_hi = end_value(hi);
  // Shallow Bratu profiles need lambda below the default bracket.
  while (f_lo > 0.0 && lo > 1e-12) {
    hi = lo;
    f_hi = f_lo;
    lo /= 10.0;
    f_lo = end_value(lo);
  }
  if (!(f_lo < 0.0 && f_hi > 0.0))
    throw ConvergenceError("shooting: no sign change of u(1) for lambda in [" + std::to_string(lo) +
                               ", " + std::to_string(hi) + "]",
                           std::min(std::abs(f_lo), std::abs(f_hi)));

  double a = lo, fa = f_lo, b = hi, fb = f_hi;
  for (int it = 0; it < o.max_iters; ++it) {
    double next = b - fb * (b - a) / (fb - fa);
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    const double fn = end_value(next);
    if (std::abs(fn) <= o.tol) return next;
    if (fn < 0.0) {
      lo = next;
      f_lo = fn;
    } else {
      hi = next;
      f_hi = fn;
    }
    if (hi - lo <= 1e-15 * hi) return next;
    a = b;
    fa = fb;
    b = next;
    fb = fn;
  }
  throw ConvergenceError("shooting: secant iteration did not converge", std::min(-f_lo, f_hi));
}

double trapezoid(const std::vector<double>& r, const std::vector<double>& integrand) {
  double sum = 0.0;
  for (std::size_t i = 1; i < r.size(); ++i)
    sum += 0.5 * (r[i] - r[i - 1]) * (integrand[i] + integrand[i - 1]);
  return sum;
}

// 2 pi int phi(u) r dr.
template <class Phi>
double radial_integral(const Profile& p, Phi phi) {
  std::vector<double> values(p.r.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = phi(p.u[i]) * p.r[i];
  return 2.0 * std::numbers::pi * trapezoid(p.r, values);
}

RadialSolution finish(Profile profile, double lambda, double constraint) {
  RadialSolution s;
  s.r = std::move(profile.r);
  s.u = std::move(profile.u);
  s.lambda = lambda;
  s.u0 = s.u.front();
  s.constraint_value = constraint;
  return s;
}

void check_options(const ShootingOptions& o) {
  if (o.points < 10) throw InvalidArgument("shooting: at least 10 grid points are required");
  if (!(o.lambda_min > 0.0 && o.lambda_max > o.lambda_min))
    throw InvalidArgument("shooting: invalid lambda bracket");
}

}  // namespace

double RadialSolution::eval(double radius) const {
  if (r.empty()) throw InvalidArgument("RadialSolution::eval on an empty profile");
  if (radius <= r.front()) return u.front();
  if (radius >= r.back()) return u.back();
  const double dr = r[1] - r[0];
  const std::size_t i = std::min(static_cast<std::size_t>(radius / dr), r.size() - 2);
  const double t = (radius - r[i]) / dr;
  return (1.0 - t) * u[i] + t * u[i + 1];
}

RadialSolution shoot_maev(int d, const ShootingOptions& options) {
  check_options(options);
  const Source g = [](double u, double lambda) { return -lambda * u; };
  const double lambda = shoot_lambda(g, -1.0, options);
  Profile p = integrate(g, -1.0, lambda, options.points);
  // (theta u, theta^{d-1} lambda) solves the same problem; pick theta so
  // that the L2 norm is one.
  const double theta = 1.0 / std::sqrt(radial_integral(p, [](double u) { return u * u; }));
  for (double& v : p.u) v *= theta;
  const double constraint = radial_integral(p, [](double u) { return u * u; });
  return finish(std::move(p), std::pow(theta, d - 1) * lambda, constraint);
}

RadialSolution shoot_maevd(int d, const ShootingOptions& options) {
  check_options(options);
  const Source g = [d](double u, double lambda) { return lambda * std::pow(std::abs(u), d); };
  const double lambda = shoot_lambda(g, -1.0, options);
  Profile p = integrate(g, -1.0, lambda, options.points);
  const auto power = [d](double u) { return std::pow(std::abs(u), d + 1); };
  const double theta = std::pow(radial_integral(p, power), -1.0 / (d + 1));
  for (double& v : p.u) v *= theta;
  const double constraint = radial_integral(p, power);
  return finish(std::move(p), lambda, constraint);
}

RadialSolution shoot_bratu(double u0, const ShootingOptions& options) {
  check_options(options);
  if (!(u0 < 0.0)) throw InvalidArgument("shoot_bratu: u(0) must be negative");
  const Source g = [](double u, double lambda) { return lambda * std::exp(-u); };
  const double lambda = shoot_lambda(g, u0, options);
  Profile p = integrate(g, u0, lambda, options.points);
  const double constraint = radial_integral(p, [](double u) { return std::exp(-u) - 1.0; });
  return finish(std::move(p), lambda, constraint);
}

std::vector<BratuPoint> bratu_sweep(double u0_min, double u0_max, int n,
                                    const ShootingOptions& options) {
  if (n < 2 || !(u0_min < u0_max) || !(u0_max < 0.0))
    throw InvalidArgument("bratu_sweep: need n >= 2 and u0_min < u0_max < 0");
  std::vector<BratuPoint> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double u0 = i == n - 1 ? u0_max : u0_min + (u0_max - u0_min) * i / (n - 1);
    const RadialSolution s = shoot_bratu(u0, options);
    out.push_back({u0, s.lambda, s.constraint_value});
  }
  return out;
}

BratuPoint bratu_turning_point(double u0_min, double u0_max, const ShootingOptions& options) {
  const auto coarse = bratu_sweep(u0_min, u0_max, 60, options);
  const auto best = std::max_element(coarse.begin(), coarse.end(),
                                     [](const BratuPoint& x, const BratuPoint& y) { return x.lambda < y.lambda; });
  const std::size_t i = static_cast<std::size_t>(best - coarse.begin());
  double a = coarse[i == 0 ? 0 : i - 1].u0;
  double b = coarse[std::min(i + 1, coarse.size() - 1)].u0;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto lambda_at = [&](double u0) { return shoot_bratu(u0, options).lambda; };
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = lambda_at(c), fd = lambda_at(d);
  while (b - a > 1e-7) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = lambda_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = lambda_at(d);
    }
  }
  const RadialSolution s = shoot_bratu(0.5 * (a + b), options);
  return {s.u0, s.lambda, s.constraint_value};
}

RadialSolution bratu_for_constraint(double C, const ShootingOptions& options) {
  if (!(C > 0.0)) throw InvalidArgument("bratu_for_constraint: C must be positive");
  // C(u0) is decreasing in u0; expand the lower end until it overshoots C.
  double hi = -1e-3, lo = -1.0;
  while (shoot_bratu(lo, options).constraint_value < C) {
    hi = lo;
    lo *= 2.0;
    if (lo < -200.0) throw ConvergenceError("bratu_for_constraint: C out of reach", C);
  }
  RadialSolution s;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    s = shoot_bratu(mid, options);
    if (std::abs(s.constraint_value - C) <= 1e-10 * C || hi - lo < 1e-14) return s;
    if (s.constraint_value > C)
      lo = mid;
    else
      hi = mid;
  }
  return s;
}

EigenSplitResult linear_eigen_split(const Eigen::MatrixXd& a, const Eigen::VectorXd& x0, double tau,
                                    int max_iters, double tol) {
  const auto n = a.rows();
  if (a.cols() != n || x0.size() != n) throw InvalidArgument("linear_eigen_split: dimension mismatch");
  if (x0.norm() == 0.0) throw InvalidArgument("linear_eigen_split: zero start vector");
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd::Identity(n, n) + tau * a);
  if (!lu.isInvertible()) throw InvalidArgument("linear_eigen_split: I + tau A is singular");

  EigenSplitResult out;
  out.x = x0.normalized();
  for (int it = 1; it <= max_iters; ++it) {
    Eigen::VectorXd next = lu.solve(out.x);
    next.normalize();
    const double change = (next - out.x).norm();
    out.x = std::move(next);
    out.iterations = it;
    if (change <= tol) {
      out.converged = true;
      break;
    }
  }
  out.lambda = out.x.dot(a * out.x);
  return out;
}

double radial_l2_error(const FemSpace& space, const NodalField& u_h, const RadialSolution& radial,
                       const Eigen::Vector2d& center) {
  space.check_field(u_h, "radial_l2_error");
  const TriMesh& mesh = space.mesh();
  NodalField diff(mesh.num_vertices());
  for (int k = 0; k < mesh.num_vertices(); ++k)
    diff[k] = u_h[k] - radial.eval((mesh.vertex(k) - center).norm());
  return lumped_norm(space, diff);
}

}  // namespace mae
