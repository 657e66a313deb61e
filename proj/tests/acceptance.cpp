// Desk-scale acceptance runs. Prints one PASS/FAIL line per criterion with the
// measured values. Criteria listed with --known-failure are expected to fail;
// the exit status is zero exactly when the set of failures matches that list.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mae/continuation.hpp"
#include "mae/oracles.hpp"

namespace {

using namespace mae;

bool within_rel(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

bool within_abs(double value, double target, double tol) { return std::abs(value - target) <= tol; }

// Accumulates sub-checks and a readable detail string.
class Criterion {
 public:
  void check(bool ok, const std::string& label) {
    ok_ = ok_ && ok;
    if (!detail_.empty()) detail_ += "; ";
    detail_ += label + (ok ? "" : " [miss]");
  }
  void note(const std::string& text) {
    if (!detail_.empty()) detail_ += "; ";
    detail_ += text;
  }
  bool ok() const { return ok_; }
  const std::string& detail() const { return detail_; }

 private:
  bool ok_ = true;
  std::string detail_;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

struct Run {
  double h;
  SolveResult result;
  double l2 = 0.0;
};

Run disk_run(ProblemKind kind, double target, const std::function<void(ProblemSpec&)>& adjust = {}) {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), target);
  const FemSpace space(mesh);
  ProblemSpec spec = spec_for_mesh(space, kind);
  if (adjust) adjust(spec);
  const HessianRecovery hessian(space, spec.hessian_c);
  Run run{mesh.h(), solve_problem(space, hessian, spec)};
  if (kind == ProblemKind::Linear) run.l2 = radial_l2_error(space, run.result.u, shoot_maev());
  return run;
}

// The residual history is eventually monotone: over the last 100 steps, or
// the second half of a shorter run.
bool tail_monotone(const std::vector<double>& history) {
  const std::size_t n = history.size();
  const std::size_t start = n - std::min<std::size_t>(100, n / 2);
  for (std::size_t i = start + 1; i < n; ++i)
    if (history[i] > history[i - 1]) return false;
  return true;
}

void solve_diagnostics(Criterion& c, const SolveResult& r) {
  c.check(r.converged, "converged in " + std::to_string(r.steps) + " steps");
  c.check(r.max_sign_fix_change <= 1e-12, fmt("sign fix change %.1e", r.max_sign_fix_change));
  c.check(tail_monotone(r.residual_history), "residual tail monotone");
}

Criterion radial_oracles() {
  Criterion c;
  const RadialSolution linear = shoot_maev();
  c.check(within_abs(linear.lambda, 5.7183, 1e-3) && within_abs(linear.u0, -1.0238, 1e-3),
          fmt("linear lambda %.5f u0 %.5f", linear.lambda, linear.u0));
  const RadialSolution power = shoot_maevd();
  c.check(within_abs(power.lambda, 7.4897, 1e-3) && within_abs(power.u0, -1.1585, 1e-3),
          fmt("power lambda %.5f u0 %.5f", power.lambda, power.u0));
  const BratuPoint fold = bratu_turning_point();
  c.check(within_abs(fold.lambda, 3.7617, 2e-3) && within_abs(fold.u0, -2.5950, 5e-3),
          fmt("bratu turning point lambda %.5f at u0 %.5f", fold.lambda, fold.u0));
  c.check(within_abs(fold.C, 10.228, 0.05), fmt("fold C %.4f", fold.C));
  return c;
}

Criterion linear_table(const Run& coarse, const Run& fine) {
  Criterion c;
  const struct {
    const Run& run;
    double lambda, min_u, l2;
  } rows[] = {{coarse, 3.64, -0.9639, 6.18e-2}, {fine, 4.52, -0.9857, 4.74e-2}};
  for (const auto& row : rows) {
    const SolveResult& r = row.run.result;
    c.note(fmt("h %.4f", row.run.h));
    c.check(within_rel(r.lambda_rayleigh, row.lambda, 0.05), fmt("lambda %.4f vs %.2f", r.lambda_rayleigh, row.lambda));
    c.check(within_rel(r.min_u, row.min_u, 0.02), fmt("min u %.4f vs %.4f", r.min_u, row.min_u));
    c.check(within_rel(row.run.l2, row.l2, 0.25), fmt("L2 error %.3e vs %.2e", row.run.l2, row.l2));
    solve_diagnostics(c, r);
  }
  return c;
}

Criterion linear_rates(const std::vector<Run>& runs) {
  Criterion c;
  std::vector<double> rates;
  for (std::size_t i = 1; i < runs.size(); ++i)
    rates.push_back(std::log(runs[i - 1].l2 / runs[i].l2) / std::log(runs[i - 1].h / runs[i].h));
  for (double r : rates) c.note(fmt("L2 rate %.3f", r));
  bool increasing = true;
  for (std::size_t i = 1; i < rates.size(); ++i) increasing = increasing && rates[i] > rates[i - 1];
  c.check(increasing, "rates increase");
  c.check(rates.back() >= 0.6 && rates.back() <= 1.2, "finest rate in [0.6, 1.2]");

  // lambda_h = lambda - a h through the two finest levels.
  const Run& a = runs[runs.size() - 2];
  const Run& b = runs.back();
  const double slope = (b.result.lambda_rayleigh - a.result.lambda_rayleigh) / (a.h - b.h);
  const double extrapolated = b.result.lambda_rayleigh + slope * b.h;
  c.check(within_abs(extrapolated, 5.7183, 0.3), fmt("extrapolated lambda %.4f (slope %.1f)", extrapolated, slope));
  c.check(b.result.converged, "finest run converged");
  return c;
}

Criterion power_table() {
  Criterion c;
  const Run run = disk_run(ProblemKind::Power, 0.05, [](ProblemSpec& s) { s.stop_tol = 1e-6; });
  const SolveResult& r = run.result;
  c.note(fmt("h %.4f", run.h));
  c.check(within_rel(r.lambda_rayleigh, 6.13, 0.05), fmt("lambda %.4f vs 6.13", r.lambda_rayleigh));
  c.check(within_rel(r.min_u, -1.1405, 0.02), fmt("min u %.4f vs -1.1405", r.min_u));
  c.check(r.mean_sqp_iterations <= 20.0, fmt("mean SQP iterations %.2f", r.mean_sqp_iterations));
  solve_diagnostics(c, r);
  return c;
}

Criterion bratu_table() {
  Criterion c;
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.05);
  const FemSpace space(mesh);
  const ProblemSpec spec = spec_for_mesh(space, ProblemKind::Bratu);
  const HessianRecovery hessian(space, spec.hessian_c);
  const auto steps = continue_in_C(space, hessian, spec, 0.5, 12.0);
  c.note(fmt("h %.4f tau/h^2 %.2f", mesh.h(), spec.tau / (mesh.h() * mesh.h())));

  const auto at = std::find_if(steps.begin(), steps.end(), [](const auto& s) { return std::abs(s.C - 10.5) < 1e-9; });
  if (at == steps.end() || !at->result.converged) {
    c.check(false, "no converged solve at C = 10.5");
  } else {
    const SolveResult& r = at->result;
    c.check(within_rel(r.lambda_rayleigh, 2.92, 0.07), fmt("lambda %.4f vs 2.92", r.lambda_rayleigh));
    c.check(within_rel(r.min_u, -2.6043, 0.02), fmt("min u %.4f vs -2.6043", r.min_u));
    c.note(fmt("sign fix change %.1e", r.max_sign_fix_change));
  }
  const bool lost = !steps.back().result.converged;
  c.check(lost && steps.back().C <= 12.0,
          lost ? fmt("convergence lost at C %.1f", steps.back().C)
               : fmt("sweep converged through C %.1f (lambda %.4f)", steps.back().C,
                     steps.back().result.lambda_rayleigh));
  return c;
}

Criterion superellipse() {
  Criterion c;
  const TriMesh mesh = generate_mesh(DomainSpec::superellipse(2.5), 0.1);
  const FemSpace space(mesh);
  const ProblemSpec spec = spec_for_mesh(space, ProblemKind::Linear);
  const HessianRecovery hessian(space, spec.hessian_c);
  const SolveResult r = solve_problem(space, hessian, spec);
  c.note(fmt("h %.4f", mesh.h()));
  c.check(within_rel(r.lambda_rayleigh, 3.07, 0.07), fmt("lambda %.4f vs 3.07", r.lambda_rayleigh));
  c.check(within_rel(r.min_u, -0.9286, 0.03), fmt("min u %.4f vs -0.9286", r.min_u));
  solve_diagnostics(c, r);
  return c;
}

NodalField random_interior(const FemSpace& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd x(space.num_interior());
  for (auto& v : x) v = uni(rng);
  return space.extend_from_interior(x);
}

double rms_identity_defect(const FemSpace& space) {
  const TriMesh& mesh = space.mesh();
  NodalField u(mesh.num_vertices());
  for (int k = 0; k < mesh.num_vertices(); ++k)
    u[k] = mesh.is_boundary(k) ? 0.0 : 0.5 * (mesh.vertex(k).squaredNorm() - 1.0);
  const SymTensorField hess = HessianRecovery(space)(u);
  double sum = 0.0;
  for (int k = 0; k < mesh.num_vertices(); ++k) {
    const double e = (hess[k] - Sym2::identity()).frobenius_norm();
    sum += space.lumped_weights()[k] * e * e;
  }
  return std::sqrt(sum);
}

Criterion property_suites() {
  Criterion c;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-5.0, 5.0);

  int bad_psd = 0, bad_cof = 0;
  for (int i = 0; i < 10000; ++i) {
    const Sym2 t{uni(rng), uni(rng), uni(rng)};
    const Sym2 p = project_psd(t);
    const double scale = 1.0 + t.frobenius_norm();
    if (p.min_eigenvalue() < -1e-14 * scale || (project_psd(p) - p).frobenius_norm() > 1e-13 * scale) ++bad_psd;
    const Eigen::Matrix2d defect = cofactor(t).matrix() * t.matrix() - t.det() * Eigen::Matrix2d::Identity();
    if (defect.cwiseAbs().maxCoeff() > 1e-13 * scale * scale) ++bad_cof;
  }
  c.check(bad_psd == 0, "P+ on 1e4 tensors");
  c.check(bad_cof == 0, "cofactor identity");

  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.1);
  const FemSpace space(mesh);
  double worst_norm = 0.0;
  int grew = 0;
  const double h2 = mesh.h() * mesh.h();
  for (int trial = 0; trial < 100; ++trial) {
    const NodalField u = random_interior(space, rng);
    worst_norm = std::max(worst_norm, std::abs(lumped_norm(space, project_linear(space, u, h2, 2).u) - 1.0));
    SymTensorField p(mesh.num_vertices());
    for (auto& t : p) t = project_psd(Sym2{uni(rng), uni(rng), uni(rng)});
    if (lumped_norm(space, elliptic_step(space, p, u, h2, h2)) > lumped_norm(space, u)) ++grew;
  }
  c.check(worst_norm <= 1e-12, fmt("lumped normalization error %.1e", worst_norm));
  c.check(grew == 0, "elliptic step norm monotone on 100 fields");

  const Eigen::VectorXd w = Eigen::VectorXd::Constant(10, 0.1);
  const Eigen::VectorXd on = Eigen::VectorXd::Constant(10, -1.0);
  const SqpResult fixed = project_power_sqp(w, on, on, 2, {});
  const Eigen::VectorXd bw = Eigen::VectorXd::Constant(8, 0.125);
  const Eigen::VectorXd level = Eigen::VectorXd::Constant(8, -std::log(3.0));
  const SqpResult bratu = project_bratu_sqp(bw, level, level, 2.0, 1.0, {});
  c.check(fixed.iterations == 1 && (fixed.u - on).norm() < 1e-15 && bratu.iterations == 1 &&
              (bratu.u - level).cwiseAbs().maxCoeff() < 1e-15,
          "SQP fixed points");

  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> size(2, 8);
  double worst_eig = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = size(rng);
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) = unit(rng);
    const Eigen::MatrixXd a = 0.5 * (b + b.transpose());
    Eigen::VectorXd x0(n);
    for (auto& v : x0) v = unit(rng);
    double lower = 0.0;
    for (int i = 0; i < n; ++i) lower = std::min(lower, a(i, i) - (a.row(i).cwiseAbs().sum() - std::abs(a(i, i))));
    const auto r = linear_eigen_split(a, x0.normalized(), lower < 0.0 ? 0.5 / -lower : 1.0, 2000000);
    const double exact = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues()[0];
    worst_eig = std::max(worst_eig, r.converged ? std::abs(r.lambda - exact) : INFINITY);
  }
  c.check(worst_eig <= 1e-10, fmt("eigen split vs dense max error %.1e", worst_eig));

  const TriMesh m20 = generate_mesh(DomainSpec::unit_disk(), 0.05);
  const TriMesh m40 = generate_mesh(DomainSpec::unit_disk(), 0.025);
  const double e20 = rms_identity_defect(FemSpace(m20));
  const double e40 = rms_identity_defect(FemSpace(m40));
  c.check(e40 < e20, fmt("paraboloid Hessian RMS defect %.3f -> %.3f", e20, e40));
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--known-failure") == 0 && i + 1 < argc) {
      known.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--known-failure N]...\n", argv[0]);
      return 2;
    }
  }

  std::set<int> failed;
  auto report = [&](int id, const char* title, const std::function<Criterion()>& run) {
    const auto start = std::chrono::steady_clock::now();
    const Criterion c = run();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!c.ok()) failed.insert(id);
    std::printf("%s %d %s (%.1fs): %s\n", c.ok() ? "PASS" : "FAIL", id, title, seconds, c.detail().c_str());
    std::fflush(stdout);
  };

  std::vector<Run> linear;
  report(1, "radial oracles", radial_oracles);
  report(2, "linear disk h=1/10, 1/20", [&] {
    for (double target : {0.1, 0.05}) linear.push_back(disk_run(ProblemKind::Linear, target));
    return linear_table(linear[0], linear[1]);
  });
  report(3, "linear convergence rates", [&] {
    linear.push_back(disk_run(ProblemKind::Linear, 0.025));
    return linear_rates(linear);
  });
  report(4, "power disk h=1/20", power_table);
  report(5, "bratu disk C=10.5 h=1/20 and sweep", bratu_table);
  report(6, "linear superellipse h=1/10", superellipse);
  report(7, "property suites", property_suites);

  for (int id : failed)
    if (!known.count(id)) std::printf("unexpected failure of criterion %d\n", id);
  for (int id : known)
    if (!failed.count(id)) std::printf("criterion %d was listed as a known failure but passed\n", id);
  return failed == known ? 0 : 1;
}
