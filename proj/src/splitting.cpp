#include "mae/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mae/error.hpp"

namespace mae {

namespace {

// Largest exponent argument accepted by the Bratu update before declaring
// divergence.
constexpr double kMaxExponent = 700.0;

double weighted_norm(const Eigen::VectorXd& w, const Eigen::VectorXd& v) {
  return std::sqrt((w.array() * v.array().square()).sum());
}

// u |u|^{d-1}
Eigen::VectorXd signed_power(const Eigen::VectorXd& u, int d) {
  return u.array() * u.array().abs().pow(d - 1);
}

}  // namespace

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Linear: return "linear";
    case ProblemKind::Power: return "power";
    case ProblemKind::Bratu: return "bratu";
  }
  return "unknown";
}

ProblemKind parse_problem_kind(std::string_view name) {
  if (name == "linear") return ProblemKind::Linear;
  if (name == "power") return ProblemKind::Power;
  if (name == "bratu") return ProblemKind::Bratu;
  throw InvalidArgument("unknown problem '" + std::string(name) + "' (expected linear|power|bratu)");
}

void ProblemSpec::validate() const {
  auto require = [](bool ok, const char* message) {
    if (!ok) throw InvalidArgument(message);
  };
  require(d == 2, "only d = 2 is supported");
  require(eps > 0.0, "eps must be positive");
  require(tau > 0.0, "tau must be positive");
  require(gamma > 0.0, "gamma must be positive");
  require(stop_tol > 0.0, "stop_tol must be positive");
  require(sqp_tol > 0.0, "sqp_tol must be positive");
  require(sqp_damping > 0.0 && sqp_damping <= 1.0, "sqp_damping must lie in (0, 1]");
  require(max_steps > 0 && sqp_max_iters > 0, "iteration limits must be positive");
  require(kind != ProblemKind::Bratu || C > 0.0, "C must be positive for the Bratu problem");
  require(hessian_c > 0.0, "hessian_c must be positive");
  require(init_f > 0.0 && init_tol > 0.0, "init_f and init_tol must be positive");
}

ProblemSpec default_spec(ProblemKind kind, double h, double lambda0) {
  ProblemSpec spec;
  spec.kind = kind;
  spec.eps = h * h;
  // Coarse Bratu meshes need a shorter step to stay on the lower branch.
  spec.tau = (kind == ProblemKind::Bratu && h >= 0.1) ? h * h / 4.0 : h * h;
  spec.lambda0 = lambda0;
  spec.gamma = spec.beta * lambda0;
  spec.stop_tol = kind == ProblemKind::Bratu ? 1e-7 : 1e-9;
  spec.C = kind == ProblemKind::Bratu ? 10.5 : 1.0;
  return spec;
}

LinearProjection project_linear(const FemSpace& space, const NodalField& u_half, double tau, int d) {
  const double norm = lumped_norm(space, u_half);
  if (norm == 0.0) throw InvalidArgument("project_linear: zero field cannot be normalized");
  return {u_half / norm, (1.0 - norm) / (d * tau)};
}

SqpResult project_power_sqp(const Eigen::VectorXd& weights, const Eigen::VectorXd& u_third,
                            const Eigen::VectorXd& warm_start, int d, const SqpOptions& options) {
  if (weights.size() != u_third.size() || warm_start.size() != u_third.size())
    throw InvalidArgument("project_power_sqp: size mismatch");
  const auto constraint = [&](const Eigen::VectorXd& v) {
    return (weights.array() * v.array().abs().pow(d + 1)).sum() - 1.0;
  };
  Eigen::VectorXd u = warm_start;
  for (int k = 1; k <= options.max_iters; ++k) {
    const Eigen::VectorXd g = signed_power(u, d);
    const double denominator = (d + 1) * (weights.array() * g.array().square()).sum();
    if (!(denominator > 0.0))
      throw ConvergenceError("power SQP: iterate vanished", std::abs(constraint(u)));
    const double numerator =
        -constraint(u) + (d + 1) * (weights.array() * (u - u_third).array() * g.array()).sum();
    const Eigen::VectorXd half = u_third + (numerator / denominator) * g;
    const Eigen::VectorXd next = u + options.damping * (half - u);
    const double change = weighted_norm(weights, next - u);
    u = next;
    if (!std::isfinite(change))
      throw ConvergenceError("power SQP diverged", std::numeric_limits<double>::infinity());
    if (change <= options.tol) return {u, k, std::abs(constraint(u))};
  }
  throw ConvergenceError("power SQP did not converge in " + std::to_string(options.max_iters) +
                             " iterations",
                         std::abs(constraint(u)));
}

SqpResult project_bratu_sqp(const Eigen::VectorXd& weights, const Eigen::VectorXd& u_third,
                            const Eigen::VectorXd& warm_start, double C, double measure,
                            const SqpOptions& options) {
  if (weights.size() != u_third.size() || warm_start.size() != u_third.size())
    throw InvalidArgument("project_bratu_sqp: size mismatch");
  const auto constraint = [&](const Eigen::VectorXd& v) {
    return (weights.array() * ((-v).array().exp() - 1.0)).sum() - C;
  };
  Eigen::VectorXd u = warm_start;
  for (int k = 1; k <= options.max_iters; ++k) {
    if (u.size() > 0 && -u.minCoeff() > kMaxExponent)
      throw ConvergenceError("Bratu SQP diverged: exponent argument exceeds 700",
                             std::numeric_limits<double>::infinity());
    const Eigen::VectorXd e = (-u).array().exp();
    const double numerator =
        (weights.array() * e.array() * (1.0 - u_third.array() + u.array())).sum() - (C + measure);
    const double denominator = (weights.array() * e.array().square()).sum();
    const Eigen::VectorXd half = u_third + (numerator / denominator) * e;
    const Eigen::VectorXd next = u + options.damping * (half - u);
    const double change = weighted_norm(weights, next - u);
    u = next;
    if (!std::isfinite(change))
      throw ConvergenceError("Bratu SQP diverged", std::numeric_limits<double>::infinity());
    if (change <= options.tol) return {u, k, std::abs(constraint(u))};
  }
  throw ConvergenceError("Bratu SQP did not converge in " + std::to_string(options.max_iters) +
                             " iterations",
                         std::abs(constraint(u)));
}

NodalField sign_fix_power(const NodalField& u) { return -u.cwiseAbs(); }

NodalField sign_fix_bratu(const NodalField& u) { return u.cwiseMin(0.0); }

double energy(const FemSpace& space, const NodalField& u, const SymTensorField& p, double eps) {
  space.check_field(u, "energy");
  space.check_field(p, "energy");
  const TriMesh& mesh = space.mesh();
  double total = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangle(t);
    const Sym2 mean = (1.0 / 3.0) * (cofactor(p[tri[0]]) + cofactor(p[tri[1]]) + cofactor(p[tri[2]]));
    const Sym2 coeff = eps * Sym2::identity() + mean;
    const Eigen::Vector2d g = space.gradient(t, u);
    total += mesh.triangle_area(t) * g.dot(coeff * g);
  }
  return total;
}

double rayleigh_quotient(const FemSpace& space, ProblemKind kind, const NodalField& u,
                         const SymTensorField& p, double eps, int d) {
  const double e = energy(space, u, p, eps);
  if (kind != ProblemKind::Bratu) return e / d;
  const double denominator =
      (space.lumped_weights().array() * u.array() * (-u).array().exp()).sum();
  if (std::abs(denominator) < 1e-14)
    throw InvalidArgument("Bratu Rayleigh quotient undefined for u = 0");
  return -e / (d * denominator);
}

double lumped_lq_norm(const FemSpace& space, const NodalField& u, double q) {
  space.check_field(u, "lumped_lq_norm");
  return std::pow((space.lumped_weights().array() * u.array().abs().pow(q)).sum(), 1.0 / q);
}

double constraint_residual(const FemSpace& space, const ProblemSpec& spec, const NodalField& u) {
  space.check_field(u, "constraint_residual");
  const auto& w = space.lumped_weights().array();
  switch (spec.kind) {
    case ProblemKind::Linear: return std::abs((w * u.array().square()).sum() - 1.0);
    case ProblemKind::Power: return std::abs((w * u.array().abs().pow(spec.d + 1)).sum() - 1.0);
    case ProblemKind::Bratu: return std::abs((w * ((-u).array().exp() - 1.0)).sum() - spec.C);
  }
  return 0.0;
}

DirichletSolution solve_ma_dirichlet(const FemSpace& space, const HessianRecovery& hessian,
                                     const ProblemSpec& spec) {
  spec.validate();
  const int d = spec.d;
  // Start from the Poisson solution with the Laplacian of the quadratic
  // solution on a disk, -Lap psi = -d f^{1/d}.
  NodalField psi = poisson_solve(space, NodalField::Constant(space.num_vertices(),
                                                              -d * std::pow(spec.init_f, 1.0 / d)));
  SymTensorField p = project_psd(hessian(psi));

  // Constant source term -tau d f (1, v)_h.
  const Eigen::VectorXd source =
      space.restrict_to_interior(space.lumped_weights() * (-spec.tau * d * spec.init_f));
  DirichletSolution out;
  for (int n = 1; n <= spec.init_max_steps; ++n) {
    const Eigen::VectorXd previous = space.restrict_to_interior(psi);
    SpdSystem system{space.assemble(elliptic_coefficient(p, spec.eps), spec.tau),
                     space.restrict_to_interior(space.lumped_weights().cwiseProduct(psi)) + source};
    NodalField next = space.extend_from_interior(solve_spd(system, {}, &previous));
    p = relax_p(p, hessian(next), spec.gamma, spec.tau);
    out.final_increment = lumped_norm(space, next - psi);
    psi = std::move(next);
    out.steps = n;
    if (out.final_increment < spec.init_tol) {
      out.psi = std::move(psi);
      out.p = std::move(p);
      return out;
    }
  }
  throw ConvergenceError("Monge-Ampere Dirichlet initialization did not converge in " +
                             std::to_string(spec.init_max_steps) + " steps",
                         out.final_increment);
}

SolverState init_ma_dirichlet(const FemSpace& space, const HessianRecovery& hessian,
                              const ProblemSpec& spec) {
  NodalField u = solve_ma_dirichlet(space, hessian, spec).psi;
  switch (spec.kind) {
    case ProblemKind::Linear: u /= lumped_norm(space, u); break;
    case ProblemKind::Power: u /= lumped_lq_norm(space, u, spec.d + 1); break;
    case ProblemKind::Bratu: break;
  }
  SymTensorField p = project_psd(hessian(u));
  return {std::move(u), std::move(p)};
}

SplittingSolver::SplittingSolver(const FemSpace& space, const HessianRecovery& hessian,
                                 ProblemSpec spec)
    : space_(space), hessian_(hessian), spec_(spec) {
  spec_.validate();
  if (&hessian.space() != &space) throw InvalidArgument("Hessian recovery built on another space");
  interior_weights_ = space.restrict_to_interior(space.lumped_weights());
  bratu_measure_ = spec_.bratu_polygon_area ? space.mesh().area() : interior_weights_.sum();
}

StepReport SplittingSolver::step(SolverState& state) {
  space_.check_field(state.u, "step");
  space_.check_field(state.p, "step");
  StepReport report;
  report.previous_norm = lumped_norm(space_, state.u);

  const NodalField u_third = elliptic_step(space_, state.p, state.u, spec_.eps, spec_.tau);
  report.elliptic_norm = lumped_norm(space_, u_third);
  SymTensorField p_next = relax_p(state.p, hessian_(u_third), spec_.gamma, spec_.tau);

  NodalField u_proj;
  const SqpOptions sqp{spec_.sqp_tol, spec_.sqp_max_iters, spec_.sqp_damping};
  switch (spec_.kind) {
    case ProblemKind::Linear: {
      auto projected = project_linear(space_, u_third, spec_.tau, spec_.d);
      u_proj = std::move(projected.u);
      report.lambda_step = projected.lambda_step;
      break;
    }
    case ProblemKind::Power:
    case ProblemKind::Bratu: {
      const Eigen::VectorXd third = space_.restrict_to_interior(u_third);
      if (!warm_start_) warm_start_ = space_.restrict_to_interior(state.u);
      SqpResult r = spec_.kind == ProblemKind::Power
                        ? project_power_sqp(interior_weights_, third, *warm_start_, spec_.d, sqp)
                        : project_bratu_sqp(interior_weights_, third, *warm_start_, spec_.C,
                                            bratu_measure_, sqp);
      report.sqp_iterations = r.iterations;
      warm_start_ = r.u;
      u_proj = space_.extend_from_interior(r.u);
      break;
    }
  }

  NodalField u_next = u_proj;
  if (spec_.sign_fix_enabled && spec_.kind != ProblemKind::Linear) {
    u_next = spec_.kind == ProblemKind::Power ? sign_fix_power(u_proj) : sign_fix_bratu(u_proj);
    report.sign_fix_change = (u_next - u_proj).cwiseAbs().maxCoeff();
  }

  report.increment = lumped_norm(space_, u_next - state.u);
  state.u = std::move(u_next);
  state.p = std::move(p_next);
  return report;
}

SolveResult SplittingSolver::solve(SolverState init) {
  SolveResult result;
  result.kind = spec_.kind;
  warm_start_.reset();
  SolverState state = std::move(init);
  long long sqp_total = 0;
  for (int n = 1; n <= spec_.max_steps; ++n) {
    StepReport report;
    try {
      report = step(state);
    } catch (const ConvergenceError& e) {
      result.failure = e.what();
      break;
    }
    result.steps = n;
    result.final_increment = report.increment;
    result.residual_history.push_back(report.increment);
    result.lambda_step = report.lambda_step;
    result.max_sign_fix_change = std::max(result.max_sign_fix_change, report.sign_fix_change);
    if (report.previous_norm > 0.0)
      result.max_norm_ratio =
          std::max(result.max_norm_ratio, report.elliptic_norm / report.previous_norm);
    sqp_total += report.sqp_iterations;
    if (!std::isfinite(report.increment)) {
      result.failure = "non-finite increment";
      break;
    }
    if (report.increment <= spec_.stop_tol) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged && result.failure.empty())
    result.failure = "max_steps reached without meeting stop_tol";
  if (result.steps > 0) result.mean_sqp_iterations = static_cast<double>(sqp_total) / result.steps;

  result.min_u = state.u.minCoeff();
  result.constraint_residual = constraint_residual(space_, spec_, state.u);
  try {
    result.lambda_rayleigh = rayleigh_quotient(space_, spec_.kind, state.u, state.p, spec_.eps, spec_.d);
  } catch (const InvalidArgument&) {
    result.lambda_rayleigh = std::numeric_limits<double>::quiet_NaN();
  }
  result.u = std::move(state.u);
  result.p = std::move(state.p);
  return result;
}

}  // namespace mae
