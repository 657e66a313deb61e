#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include "mae/oracles.hpp"
#include "mae/splitting.hpp"

namespace mae {

/// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

/// Result document with the keys problem, h, eps, tau, gamma, C,
/// lambda_rayleigh, min_u, steps, final_increment, constraint_residual and
/// converged. C is 1 for the linear and power problems.
std::string result_json(const SolveResult& result, const ProblemSpec& spec, double h);

struct ProfilePoint {
  double x = 0.0;
  double u = 0.0;
};

/// Restriction of u to the horizontal line x2 = level: one sample at every
/// mesh edge crossing (and vertex on the line), sorted by x1, duplicates
/// within 1e-12 merged.
std::vector<ProfilePoint> centerline_profile(const TriMesh& mesh, const NodalField& u, double level = 0.0);

/// CSV with header `x,u`.
void write_profile_csv(const std::vector<ProfilePoint>& profile, std::ostream& out);

/// CSV with header `u0,lambda,C`.
void write_oracle_csv(const std::vector<BratuPoint>& rows, std::ostream& out);

/// Opens `path` for writing or throws Error.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace mae
