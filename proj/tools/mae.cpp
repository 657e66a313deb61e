// Command-line front end: mesh generation, single solves, radial oracles,
// continuation sweeps and convergence studies.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mae/continuation.hpp"
#include "mae/error.hpp"
#include "mae/io.hpp"
#include "mae/mesh.hpp"
#include "mae/oracles.hpp"

namespace {

using namespace mae;

constexpr int kExitUsage = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitInternal = 1;

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct MeshArgs {
  std::string domain = "disk";
  double exponent = 2.0;
  double radius = 1.0;
  std::vector<double> center{0.0, 0.0};
  double h = 0.05;
  std::string out;
};

int run_mesh(const MeshArgs& a) {
  DomainSpec domain = a.domain == "disk" ? DomainSpec::unit_disk()
                                         : DomainSpec::superellipse(a.exponent);
  if (a.domain == "disk" && a.exponent != 2.0) throw InvalidArgument("--exponent applies to superellipse domains");
  domain.radius = a.radius;
  domain.center = Point(a.center[0], a.center[1]);
  domain.validate();
  const TriMesh mesh = generate_mesh(domain, a.h);
  save_mesh(mesh, a.out);
  std::cout << "vertices=" << mesh.num_vertices() << " triangles=" << mesh.num_triangles()
            << " h=" << g17(mesh.h()) << "\n";
  return 0;
}

struct SolveArgs {
  std::string problem;
  std::string mesh;
  std::optional<double> C, eps, tau, stop_tol;
  std::optional<int> max_steps;
  double dC = 0.5;
  bool no_sign_fix = false;
  std::string out;
  std::string profile;
  double line = 0.0;
};

int run_solve(const SolveArgs& a) {
  const ProblemKind kind = parse_problem_kind(a.problem);
  const TriMesh mesh = load_mesh(a.mesh);
  const FemSpace space(mesh);
  ProblemSpec spec = spec_for_mesh(space, kind);
  if (a.C) {
    if (kind != ProblemKind::Bratu) throw InvalidArgument("--C applies to the bratu problem only");
    spec.C = *a.C;
  }
  if (a.eps) spec.eps = *a.eps;
  if (a.tau) spec.tau = *a.tau;
  if (a.stop_tol) spec.stop_tol = *a.stop_tol;
  if (a.max_steps) spec.max_steps = *a.max_steps;
  spec.sign_fix_enabled = !a.no_sign_fix;
  spec.validate();

  const HessianRecovery hessian(space, spec.hessian_c);
  const SolveResult result = solve_problem(space, hessian, spec, a.dC);

  auto out = open_output(a.out);
  out << result_json(result, spec, mesh.h());
  if (!a.profile.empty()) {
    auto csv = open_output(a.profile);
    write_profile_csv(centerline_profile(mesh, result.u, a.line), csv);
  }
  std::cout << "lambda=" << g17(result.lambda_rayleigh) << " min_u=" << g17(result.min_u)
            << " steps=" << result.steps << " converged=" << (result.converged ? "true" : "false") << "\n";
  if (!result.converged) {
    std::cerr << "not converged: " << result.failure << "\n";
    return kExitNotConverged;
  }
  return 0;
}

struct OracleArgs {
  std::string problem;
  std::optional<double> u0;
  std::vector<double> sweep;
  std::string out;
};

void write_radial_csv(const RadialSolution& s, const std::string& path) {
  auto out = open_output(path);
  out << "r,u\n";
  for (std::size_t i = 0; i < s.r.size(); ++i) out << g17(s.r[i]) << ',' << g17(s.u[i]) << '\n';
}

int run_oracle(const OracleArgs& a) {
  const ProblemKind kind = parse_problem_kind(a.problem);
  if (kind != ProblemKind::Bratu && (a.u0 || !a.sweep.empty()))
    throw InvalidArgument("--u0 and --sweep apply to the bratu problem only");
  if (a.u0 && !a.sweep.empty()) throw InvalidArgument("--u0 and --sweep are mutually exclusive");

  if (!a.sweep.empty()) {
    const double n = a.sweep[2];
    if (n < 2 || n != std::floor(n)) throw InvalidArgument("--sweep count must be an integer >= 2");
    if (!(a.sweep[0] < a.sweep[1]) || a.sweep[1] >= 0.0)
      throw InvalidArgument("--sweep needs u0_min < u0_max < 0");
    const auto rows = bratu_sweep(a.sweep[0], a.sweep[1], static_cast<int>(n));
    if (!a.out.empty()) {
      auto out = open_output(a.out);
      write_oracle_csv(rows, out);
    }
    const BratuPoint turning = bratu_turning_point(a.sweep[0], a.sweep[1]);
    std::cout << "turning_point u0=" << g17(turning.u0) << " lambda=" << g17(turning.lambda)
              << " C=" << g17(turning.C) << "\n";
    return 0;
  }

  RadialSolution s;
  switch (kind) {
    case ProblemKind::Linear: s = shoot_maev(); break;
    case ProblemKind::Power: s = shoot_maevd(); break;
    case ProblemKind::Bratu: s = shoot_bratu(a.u0.value_or(bratu_turning_point().u0)); break;
  }
  if (!a.out.empty()) write_radial_csv(s, a.out);
  std::cout << "lambda=" << g17(s.lambda) << " u0=" << g17(s.u0);
  if (kind == ProblemKind::Bratu) std::cout << " C=" << g17(s.constraint_value);
  std::cout << "\n";
  return 0;
}

struct ContinueArgs {
  std::string mesh;
  double dC = 0.5;
  double C_max = 12.0;
  std::optional<double> tau;
  std::string out;
};

int run_continue(const ContinueArgs& a) {
  const TriMesh mesh = load_mesh(a.mesh);
  const FemSpace space(mesh);
  ProblemSpec spec = spec_for_mesh(space, ProblemKind::Bratu);
  if (a.tau) spec.tau = *a.tau;
  spec.validate();
  const HessianRecovery hessian(space, spec.hessian_c);
  const auto steps = continue_in_C(space, hessian, spec, a.dC, a.C_max, [](const ContinuationStep& s) {
    std::cerr << "C=" << g17(s.C) << " lambda=" << g17(s.result.lambda_rayleigh)
              << " min_u=" << g17(s.result.min_u) << " steps=" << s.result.steps << "\n";
  });
  emit_bifurcation(bifurcation_rows(steps), a.out);
  const bool lost = !steps.empty() && !steps.back().result.converged;
  std::cout << (lost ? "convergence lost at C=" + g17(steps.back().C) : "all solves converged") << "\n";
  return 0;
}

struct StudyArgs {
  std::string problem = "linear";
  std::vector<double> h{0.1, 0.05, 0.025};
  bool pretty = false;
  std::string out;
};

// Solves on a sequence of disk meshes and reports the error against the
// radial oracle together with the observed rates.
int run_study(const StudyArgs& a) {
  const ProblemKind kind = parse_problem_kind(a.problem);
  if (kind == ProblemKind::Bratu) throw InvalidArgument("study supports linear and power");
  const RadialSolution oracle = kind == ProblemKind::Linear ? shoot_maev() : shoot_maevd();

  struct Row {
    double target, h, lambda, min_u, l2, l2_rate, lambda_rate;
    int steps;
    bool converged;
  };
  std::vector<Row> rows;
  for (double target : a.h) {
    const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), target);
    const FemSpace space(mesh);
    const ProblemSpec spec = spec_for_mesh(space, kind);
    const HessianRecovery hessian(space, spec.hessian_c);
    const SolveResult r = solve_problem(space, hessian, spec);
    Row row{target, mesh.h(), r.lambda_rayleigh, r.min_u, radial_l2_error(space, r.u, oracle), NAN, NAN,
            r.steps, r.converged};
    if (!rows.empty()) {
      const Row& prev = rows.back();
      const double ratio = std::log(prev.h / row.h);
      row.l2_rate = std::log(prev.l2 / row.l2) / ratio;
      row.lambda_rate = std::log(std::abs(oracle.lambda - prev.lambda) / std::abs(oracle.lambda - row.lambda)) / ratio;
    }
    rows.push_back(row);
  }

  bool all = true;
  std::string csv = "target_h,h,lambda,min_u,l2_error,l2_rate,lambda_rate,steps,converged\n";
  for (const Row& r : rows) {
    csv += g17(r.target) + ',' + g17(r.h) + ',' + g17(r.lambda) + ',' + g17(r.min_u) + ',' + g17(r.l2) + ',' +
           g17(r.l2_rate) + ',' + g17(r.lambda_rate) + ',' + std::to_string(r.steps) + ',' +
           (r.converged ? "1" : "0") + '\n';
    all = all && r.converged;
  }
  if (!a.out.empty()) open_output(a.out) << csv;
  if (a.pretty) {
    std::printf("%8s %8s %10s %10s %10s %8s %8s %7s\n", "target", "h", "lambda", "min u", "L2 err", "L2 rate",
                "lam rate", "steps");
    for (const Row& r : rows)
      std::printf("%8.4f %8.4f %10.5f %10.5f %10.3e %8.3f %8.3f %7d\n", r.target, r.h, r.lambda, r.min_u, r.l2,
                  r.l2_rate, r.lambda_rate, r.steps);
    std::printf("oracle lambda %.5f\n", oracle.lambda);
  } else if (a.out.empty()) {
    std::cout << csv;
  }
  return all ? 0 : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monge-Ampere eigenvalue solver"};
  // --h is the mesh size, so help is long-form only.
  app.set_help_flag("--help", "print this help");
  app.require_subcommand(1);
  const auto positive = CLI::PositiveNumber;

  MeshArgs mesh_args;
  auto* mesh_cmd = app.add_subcommand("mesh", "generate a triangulation of a convex domain");
  mesh_cmd->set_help_flag("--help", "print this help");
  mesh_cmd->add_option("--domain", mesh_args.domain)->check(CLI::IsMember({"disk", "superellipse"}));
  mesh_cmd->add_option("--exponent", mesh_args.exponent, "superellipse exponent, > 1");
  mesh_cmd->add_option("--radius", mesh_args.radius)->check(positive);
  mesh_cmd->add_option("--center", mesh_args.center)->expected(2);
  mesh_cmd->add_option("--h", mesh_args.h, "target edge length")->check(positive);
  mesh_cmd->add_option("--out", mesh_args.out)->required();

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "solve one eigenvalue problem on a mesh");
  solve_cmd->set_help_flag("--help", "print this help");
  solve_cmd->add_option("--problem", solve_args.problem)->required()->check(CLI::IsMember({"linear", "power", "bratu"}));
  solve_cmd->add_option("--mesh", solve_args.mesh)->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--C", solve_args.C, "bratu constraint constant")->check(positive);
  solve_cmd->add_option("--eps", solve_args.eps)->check(positive);
  solve_cmd->add_option("--tau", solve_args.tau)->check(positive);
  solve_cmd->add_option("--stop-tol", solve_args.stop_tol)->check(positive);
  solve_cmd->add_option("--max-steps", solve_args.max_steps)->check(CLI::PositiveNumber);
  solve_cmd->add_option("--dC", solve_args.dC, "bratu continuation step toward C")->check(positive);
  solve_cmd->add_flag("--no-sign-fix", solve_args.no_sign_fix);
  solve_cmd->add_option("--out", solve_args.out)->required();
  solve_cmd->add_option("--profile", solve_args.profile, "centerline CSV");
  solve_cmd->add_option("--line", solve_args.line, "x2 level of the centerline");

  OracleArgs oracle_args;
  auto* oracle_cmd = app.add_subcommand("oracle", "radial shooting reference solutions");
  oracle_cmd->set_help_flag("--help", "print this help");
  oracle_cmd->add_option("--problem", oracle_args.problem)->required()->check(CLI::IsMember({"linear", "power", "bratu"}));
  oracle_cmd->add_option("--u0", oracle_args.u0, "bratu centre value, < 0");
  oracle_cmd->add_option("--sweep", oracle_args.sweep, "u0_min u0_max n")->expected(3);
  oracle_cmd->add_option("--out", oracle_args.out);

  ContinueArgs continue_args;
  auto* continue_cmd = app.add_subcommand("continue", "bratu continuation in C");
  continue_cmd->set_help_flag("--help", "print this help");
  continue_cmd->add_option("--mesh", continue_args.mesh)->required()->check(CLI::ExistingFile);
  continue_cmd->add_option("--dC", continue_args.dC)->check(positive);
  continue_cmd->add_option("--Cmax", continue_args.C_max)->check(positive);
  continue_cmd->add_option("--tau", continue_args.tau)->check(positive);
  continue_cmd->add_option("--out", continue_args.out)->required();

  StudyArgs study_args;
  auto* study_cmd = app.add_subcommand("study", "mesh-refinement study on the unit disk");
  study_cmd->set_help_flag("--help", "print this help");
  study_cmd->add_option("--problem", study_args.problem)->check(CLI::IsMember({"linear", "power"}));
  study_cmd->add_option("--h", study_args.h, "target edge lengths")->check(positive);
  study_cmd->add_flag("--pretty", study_args.pretty, "human-readable table");
  study_cmd->add_option("--out", study_args.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*mesh_cmd) return run_mesh(mesh_args);
    if (*solve_cmd) return run_solve(solve_args);
    if (*oracle_cmd) return run_oracle(oracle_args);
    if (*continue_cmd) return run_continue(continue_args);
    if (*study_cmd) return run_study(study_args);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
