#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include "mae/splitting.hpp"

namespace mae {

struct ContinuationStep {
  double C = 0.0;
  SolveResult result;
};

/// Called after each solve of a sweep, for progress output.
using ContinuationObserver = std::function<void(const ContinuationStep&)>;

/// Bratu continuation in the constraint constant: C_q = q dC for
/// q = 1, 2, ... while C_q <= C_max. The first solve starts from the constant
/// field -dC/|Omega| with p = 0; each later solve starts from the previous
/// converged state. The sweep stops after the first non-converged solve,
/// which is kept as the last entry.
std::vector<ContinuationStep> continue_in_C(const FemSpace& space, const HessianRecovery& hessian,
                                            const ProblemSpec& base, double dC, double C_max,
                                            const ContinuationObserver& observer = {});

/// The q = 1 starting state: -dC/|Omega| at interior vertices, zero tensors.
SolverState continuation_start(const FemSpace& space, double dC);

/// Default parameters for a mesh: default_spec at h = mesh.h() with the
/// discrete Laplacian eigenvalue as lambda0.
ProblemSpec spec_for_mesh(const FemSpace& space, ProblemKind kind);

/// One complete solve. Linear and Power start from the normalized convex
/// Dirichlet solution. Bratu walks up in C by dC from the constant start and
/// returns the solve at spec.C, or the first solve that failed on the way.
SolveResult solve_problem(const FemSpace& space, const HessianRecovery& hessian, const ProblemSpec& spec,
                          double dC = 0.5);

struct BifurcationRow {
  double C = 0.0;
  double lambda = 0.0;
  double min_u = 0.0;
  bool converged = false;
};

std::vector<BifurcationRow> bifurcation_rows(const std::vector<ContinuationStep>& steps);

/// CSV with header `C,lambda,min_u,converged`, doubles at 17 significant
/// digits, converged as 0/1.
void emit_bifurcation(const std::vector<BifurcationRow>& rows, std::ostream& out);
void emit_bifurcation(const std::vector<BifurcationRow>& rows, const std::filesystem::path& path);

/// Reads a file written by emit_bifurcation. Throws ParseError.
std::vector<BifurcationRow> read_bifurcation(std::istream& in);

}  // namespace mae
