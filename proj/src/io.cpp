#include "mae/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "mae/error.hpp"

namespace mae {

namespace {

std::string format17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, end);
}

std::string result_json(const SolveResult& result, const ProblemSpec& spec, double h) {
  // nlohmann serializes doubles in shortest round-trip form.
  nlohmann::ordered_json doc;
  doc["problem"] = std::string(to_string(result.kind));
  doc["h"] = h;
  doc["eps"] = spec.eps;
  doc["tau"] = spec.tau;
  doc["gamma"] = spec.gamma;
  doc["C"] = result.kind == ProblemKind::Bratu ? spec.C : 1.0;
  doc["lambda_rayleigh"] = result.lambda_rayleigh;
  doc["min_u"] = result.min_u;
  doc["steps"] = result.steps;
  doc["final_increment"] = result.final_increment;
  doc["constraint_residual"] = result.constraint_residual;
  doc["converged"] = result.converged;
  return doc.dump(2) + "\n";
}

std::vector<ProfilePoint> centerline_profile(const TriMesh& mesh, const NodalField& u, double level) {
  if (u.size() != mesh.num_vertices()) throw InvalidArgument("centerline_profile: field length mismatch");
  std::vector<ProfilePoint> points;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangle(t);
    for (int e = 0; e < 3; ++e) {
      const int i = tri[e], j = tri[(e + 1) % 3];
      // Each interior edge appears twice; the duplicate is merged below.
      const Point& a = mesh.vertex(i);
      const Point& b = mesh.vertex(j);
      const double da = a.y() - level, db = b.y() - level;
      if (da == 0.0) points.push_back({a.x(), u[i]});
      if (da * db < 0.0) {
        const double s = da / (da - db);
        points.push_back({a.x() + s * (b.x() - a.x()), u[i] + s * (u[j] - u[i])});
      }
    }
  }
  std::sort(points.begin(), points.end(), [](const ProfilePoint& p, const ProfilePoint& q) { return p.x < q.x; });
  std::vector<ProfilePoint> merged;
  for (const auto& p : points)
    if (merged.empty() || p.x - merged.back().x > 1e-12) merged.push_back(p);
  return merged;
}

void write_profile_csv(const std::vector<ProfilePoint>& profile, std::ostream& out) {
  out << "x,u\n";
  for (const auto& p : profile) out << format17(p.x) << ',' << format17(p.u) << '\n';
  if (!out) throw Error("failed to write profile");
}

void write_oracle_csv(const std::vector<BratuPoint>& rows, std::ostream& out) {
  out << "u0,lambda,C\n";
  for (const auto& r : rows) out << format17(r.u0) << ',' << format17(r.lambda) << ',' << format17(r.C) << '\n';
  if (!out) throw Error("failed to write oracle table");
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace mae
