#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mae/fem.hpp"
#include "mae/hessian.hpp"

namespace mae {

/// The three eigenvalue problems for det D^2 u:
///   Linear:  det D^2 u = lambda |u|,      int |u|^2 = 1
///   Power:   det D^2 u = lambda |u|^d,    int |u|^{d+1} = 1
///   Bratu:   det D^2 u = lambda e^{-u},   int (e^{-u} - 1) = C
enum class ProblemKind { Linear, Power, Bratu };

std::string_view to_string(ProblemKind kind);
/// Accepts "linear", "power", "bratu".
ProblemKind parse_problem_kind(std::string_view name);

struct ProblemSpec {
  ProblemKind kind = ProblemKind::Linear;
  int d = 2;
  /// Constraint constant. Fixed to 1 for Linear and Power.
  double C = 1.0;

  double eps = 0.0;
  double tau = 0.0;
  /// Relaxation rate of p; default_spec sets beta * lambda0.
  double gamma = 0.0;
  double beta = 1.0;
  double lambda0 = 0.0;

  double stop_tol = 1e-9;
  int max_steps = 50000;

  double sqp_tol = 1e-10;
  int sqp_max_iters = 50;
  /// Damping beta_k of the SQP update, in (0, 1]; 1 is undamped.
  double sqp_damping = 1.0;

  bool sign_fix_enabled = true;
  /// Regularization constant of the discrete Hessian.
  double hessian_c = 1.0;
  /// Use the polygon area instead of the lumped interior measure in the
  /// Bratu SQP. Shifts the enforced constraint by the boundary patch mass.
  bool bratu_polygon_area = false;

  /// Dirichlet Monge-Ampere initialization: det D^2 psi = init_f.
  double init_f = 1.0;
  double init_tol = 1e-8;
  int init_max_steps = 20000;

  /// Throws InvalidArgument when a parameter is out of range.
  void validate() const;
};

/// Scheme defaults: eps = tau = h^2 (tau = h^2/4 for Bratu when h >= 0.1),
/// gamma = beta lambda0, stopping tolerance 1e-9 (1e-7 for Bratu).
ProblemSpec default_spec(ProblemKind kind, double h, double lambda0);

struct SolverState {
  NodalField u;
  SymTensorField p;
};

struct SqpOptions {
  double tol = 1e-10;
  int max_iters = 50;
  double damping = 1.0;
};

struct SqpResult {
  Eigen::VectorXd u;
  int iterations = 0;
  double constraint_residual = 0.0;
};

/// Normalization onto the unit sphere of (.,.)_h. The returned multiplier
/// estimate is (1 - ||u_half||) / (d tau).
struct LinearProjection {
  NodalField u;
  double lambda_step = 0.0;
};
LinearProjection project_linear(const FemSpace& space, const NodalField& u_half, double tau, int d);

/// Discrete SQP projection onto sum_l w_l |u_l|^{d+1} = 1. All vectors are
/// over the same degrees of freedom; `weights` are their lumped weights.
SqpResult project_power_sqp(const Eigen::VectorXd& weights, const Eigen::VectorXd& u_third,
                            const Eigen::VectorXd& warm_start, int d, const SqpOptions& options);

/// Discrete SQP projection onto sum_l w_l (e^{-u_l} - 1) = C, where
/// `measure` stands in for the domain area in the update.
SqpResult project_bratu_sqp(const Eigen::VectorXd& weights, const Eigen::VectorXd& u_third,
                            const Eigen::VectorXd& warm_start, double C, double measure,
                            const SqpOptions& options);

/// u -> -|u|.
NodalField sign_fix_power(const NodalField& u);
/// u -> min(0, u).
NodalField sign_fix_bratu(const NodalField& u);

/// int (eps I + cof p) grad u . grad u, with the per-triangle coefficient
/// rule used by the assembly.
double energy(const FemSpace& space, const NodalField& u, const SymTensorField& p, double eps);

/// Generalized Rayleigh quotient giving the eigenvalue of a converged state.
double rayleigh_quotient(const FemSpace& space, ProblemKind kind, const NodalField& u,
                         const SymTensorField& p, double eps, int d);

/// Constraint defect of u for the problem's constraint manifold.
double constraint_residual(const FemSpace& space, const ProblemSpec& spec, const NodalField& u);

/// Discrete L^q norm (sum_k w_k |u_k|^q)^{1/q} with lumped weights.
double lumped_lq_norm(const FemSpace& space, const NodalField& u, double q);

/// Initial state from the convex solution psi of det D^2 psi = f, psi = 0 on
/// the boundary, computed by the same splitting without the eigenvalue
/// constraint. psi is normalized for Linear (L2) and Power (L^{d+1}) and
/// left unscaled for Bratu; p0 = P+(D2_h u0).
SolverState init_ma_dirichlet(const FemSpace& space, const HessianRecovery& hessian,
                              const ProblemSpec& spec);

/// Unnormalized convex Dirichlet solution psi and its iteration count.
struct DirichletSolution {
  NodalField psi;
  SymTensorField p;
  int steps = 0;
  double final_increment = 0.0;
};
DirichletSolution solve_ma_dirichlet(const FemSpace& space, const HessianRecovery& hessian,
                                     const ProblemSpec& spec);

struct StepReport {
  double increment = 0.0;       // ||u^{n+1} - u^n||_0h
  double elliptic_norm = 0.0;   // ||u^{n+1/3}||_0h
  double previous_norm = 0.0;   // ||u^n||_0h
  double lambda_step = 0.0;     // Linear multiplier estimate
  int sqp_iterations = 0;
  double sign_fix_change = 0.0;  // max |u^{n+1} - u^{n+2/3}|
};

struct SolveResult {
  ProblemKind kind = ProblemKind::Linear;
  NodalField u;
  SymTensorField p;
  double lambda_rayleigh = 0.0;
  int steps = 0;
  double final_increment = 0.0;
  double constraint_residual = 0.0;
  double min_u = 0.0;
  std::vector<double> residual_history;
  bool converged = false;
  std::string failure;  // why the run stopped early, empty otherwise

  double lambda_step = 0.0;
  double max_sign_fix_change = 0.0;
  double mean_sqp_iterations = 0.0;
  /// Largest ||u^{n+1/3}|| / ||u^n|| seen; at most 1 in exact arithmetic.
  double max_norm_ratio = 0.0;
};

/// Operator-splitting time stepping for one problem on one mesh:
///   u^{n+1/3}: (u, v)_h + tau int (eps I + cof p^n) grad u . grad v = (u^n, v)_h
///   p^{n+1}:   P+[ e^{-gamma tau} p^n + (1 - e^{-gamma tau}) D2_h u^{n+1/3} ]
///   u^{n+2/3}: projection onto the constraint manifold
///   u^{n+1}:   optional sign fix (Power, Bratu)
class SplittingSolver {
 public:
  SplittingSolver(const FemSpace& space, const HessianRecovery& hessian, ProblemSpec spec);

  const ProblemSpec& spec() const { return spec_; }

  /// Advances `state` by one step.
  StepReport step(SolverState& state);

  /// Iterates from `init` until the increment drops to stop_tol. A run that
  /// hits max_steps or fails inside a projection is returned with
  /// converged = false.
  SolveResult solve(SolverState init);

 private:
  const FemSpace& space_;
  const HessianRecovery& hessian_;
  ProblemSpec spec_;
  Eigen::VectorXd interior_weights_;
  double bratu_measure_ = 0.0;
  std::optional<Eigen::VectorXd> warm_start_;
};

}  // namespace mae
