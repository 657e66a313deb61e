#include "mae/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mae/error.hpp"

namespace mae {

namespace {

constexpr const char* kHeader = "C,lambda,min_u,converged";

std::string format17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

SolverState continuation_start(const FemSpace& space, double dC) {
  const double level = -dC / space.mesh().area();
  return {space.extend_from_interior(Eigen::VectorXd::Constant(space.num_interior(), level)),
          SymTensorField(space.num_vertices())};
}

std::vector<ContinuationStep> continue_in_C(const FemSpace& space, const HessianRecovery& hessian,
                                            const ProblemSpec& base, double dC, double C_max,
                                            const ContinuationObserver& observer) {
  if (base.kind != ProblemKind::Bratu) throw InvalidArgument("continuation applies to the Bratu problem only");
  if (!(dC > 0.0)) throw InvalidArgument("continuation step dC must be positive");
  if (!(C_max > dC)) throw InvalidArgument("C_max must exceed dC");

  std::vector<ContinuationStep> steps;
  SolverState state = continuation_start(space, dC);
  // Counting q avoids drift from repeated addition of dC.
  const int last = static_cast<int>(std::floor(C_max / dC * (1.0 + 1e-12)));
  for (int q = 1; q <= last; ++q) {
    ProblemSpec spec = base;
    spec.C = q * dC;
    SplittingSolver solver(space, hessian, spec);
    ContinuationStep step{spec.C, solver.solve(state)};
    if (observer) observer(step);
    const bool converged = step.result.converged;
    if (converged) state = {step.result.u, step.result.p};
    steps.push_back(std::move(step));
    if (!converged) break;
  }
  return steps;
}

ProblemSpec spec_for_mesh(const FemSpace& space, ProblemKind kind) {
  return default_spec(kind, space.mesh().h(), estimate_laplacian_eigenvalue(space));
}

SolveResult solve_problem(const FemSpace& space, const HessianRecovery& hessian, const ProblemSpec& spec,
                          double dC) {
  spec.validate();
  if (spec.kind != ProblemKind::Bratu) {
    SplittingSolver solver(space, hessian, spec);
    return solver.solve(init_ma_dirichlet(space, hessian, spec));
  }
  if (!(dC > 0.0)) throw InvalidArgument("continuation step dC must be positive");

  // Grid values below the target, then the target itself.
  SolverState state = continuation_start(space, std::min(dC, spec.C));
  const int below = static_cast<int>(std::ceil(spec.C / dC * (1.0 - 1e-12))) - 1;
  for (int q = 1; q <= below; ++q) {
    ProblemSpec step = spec;
    step.C = q * dC;
    SplittingSolver solver(space, hessian, step);
    SolveResult r = solver.solve(state);
    if (!r.converged) return r;
    state = {std::move(r.u), std::move(r.p)};
  }
  SplittingSolver solver(space, hessian, spec);
  return solver.solve(state);
}

std::vector<BifurcationRow> bifurcation_rows(const std::vector<ContinuationStep>& steps) {
  std::vector<BifurcationRow> rows;
  rows.reserve(steps.size());
  for (const auto& s : steps)
    rows.push_back({s.C, s.result.lambda_rayleigh, s.result.min_u, s.result.converged});
  return rows;
}

void emit_bifurcation(const std::vector<BifurcationRow>& rows, std::ostream& out) {
  out << kHeader << '\n';
  for (const auto& r : rows)
    out << format17(r.C) << ',' << format17(r.lambda) << ',' << format17(r.min_u) << ','
        << (r.converged ? 1 : 0) << '\n';
  if (!out) throw Error("failed to write bifurcation data");
}

void emit_bifurcation(const std::vector<BifurcationRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  emit_bifurcation(rows, out);
}

std::vector<BifurcationRow> read_bifurcation(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw ParseError("expected header " + std::string(kHeader), 1);
  std::vector<BifurcationRow> rows;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell[4];
    for (auto& c : cell)
      if (!std::getline(fields, c, ',')) throw ParseError("expected 4 comma-separated fields", number);
    std::string extra;
    if (std::getline(fields, extra)) throw ParseError("trailing fields", number);

    BifurcationRow row;
    double* targets[3] = {&row.C, &row.lambda, &row.min_u};
    for (int i = 0; i < 3; ++i) {
      std::size_t used = 0;
      try {
        *targets[i] = std::stod(cell[i], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell[i].size()) throw ParseError("malformed number '" + cell[i] + "'", number);
    }
    if (cell[3] != "0" && cell[3] != "1") throw ParseError("converged flag must be 0 or 1", number);
    row.converged = cell[3] == "1";
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mae
