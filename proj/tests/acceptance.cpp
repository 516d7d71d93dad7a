// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "steklov/dtn.hpp"
#include "steklov/fem.hpp"
#include "steklov/geometry.hpp"
#include "steklov/parabolic.hpp"
#include "steklov/semigroup.hpp"
#include "steklov/verify.hpp"

using namespace steklov;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Setup {
  Mesh mesh;
  DiscreteForms forms;
  DtnOperator op;
  double build_seconds = 0.0;
};

Setup build(const SmoothDomain& domain, double h, const CoefficientField& coeff, double boundary_h = 0.0) {
  const auto start = Clock::now();
  Setup s;
  s.mesh = triangulate(domain, h, boundary_h);
  s.forms = assemble(s.mesh, coeff);
  s.op = build_dtn(s.forms);
  s.build_seconds = seconds_since(start);
  return s;
}

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail, double secs) {
  std::printf("[%s] criterion %2d  %-34s %s  (%.1fs)\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str(),
              secs);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

}  // namespace

int main() {
  const auto suite_start = Clock::now();
  const SmoothDomain disk = make_disk(1.0);
  const CoefficientField laplace = identity_coefficients();

  // 1. disk spectrum
  auto start = Clock::now();
  const Setup coarse = build(disk, 0.04, laplace);
  {
    const double expected[9] = {0, 1, 1, 2, 2, 3, 3, 4, 4};
    const auto& ev = coarse.op.eigenvalues();
    double worst = 0.0;
    for (int n = 1; n < 9; ++n) worst = std::max(worst, std::abs(ev[n] - expected[n]) / expected[n]);
    const bool lambda1_ok = std::abs(ev[0]) <= 1e-6 * ev[1];
    const bool pass = worst <= 0.02 && lambda1_ok && coarse.build_seconds <= 30.0;
    report(1, "disk DtN spectrum", pass,
           fmt("m=%ld max rel err=%.3e |lambda1|=%.1e build=%.1fs", static_cast<long>(coarse.op.size()), worst,
               std::abs(ev[0]), coarse.build_seconds),
           seconds_since(start));
  }

  // 2. stochasticity
  start = Clock::now();
  {
    double worst = 0.0;
    for (double t : {1e-3, 1e-2, 1e-1, 1.0}) {
      const Eigen::VectorXd rows = real_kernel(coarse.op, t) * coarse.op.weights();
      worst = std::max(worst, (rows.array() - 1.0).abs().maxCoeff());
    }
    report(2, "kernel stochasticity", worst <= 1e-8, fmt("max |row sum - 1|=%.2e", worst), seconds_since(start));
  }

  // 3. real-time Poisson bound
  start = Clock::now();
  const Setup fine = build(disk, 0.02, laplace);
  const Setup graded = build(disk, 0.04, laplace, 0.005);
  const std::vector<double> t_grid = log_grid(1e-2, 10.0, 24);
  const BoundReport real_coarse = poisson_real(coarse.op, t_grid);
  {
    const BoundReport real_fine = poisson_real(fine.op, t_grid);
    const BoundReport slope_report = poisson_real(graded.op, log_grid(1e-3, 1e-1, 24));
    const double slope = slope_report.fitted_decay.at("on_diagonal_slope");
    const double drift = relative_drift(real_coarse.fitted_c, real_fine.fitted_c);
    const bool pass = std::abs(slope + 1.0) <= 0.15 && std::isfinite(real_coarse.fitted_c) && drift < 0.25;
    report(3, "real-time Poisson bound", pass,
           fmt("slope=%.3f (graded m=%ld) c=%.4f/%.4f drift=%.1f%%", slope, static_cast<long>(graded.op.size()),
               real_coarse.fitted_c, real_fine.fitted_c, 100 * drift),
           seconds_since(start));
  }

  // 4. sector Poisson bound
  start = Clock::now();
  {
    const double theta = std::numbers::pi / 3.0;
    const SectorGrid grid = make_sector_grid(theta, 5, 0.95, t_grid);
    const BoundReport sector = poisson_sector(coarse.op, theta, grid);
    bool finite = true;
    for (const auto& ray : sector.rays) finite = finite && std::isfinite(ray.fitted_c) && ray.fitted_c > 0.0;
    // the arg z = 0 ray against the real-time report
    double agreement = 0.0;
    const std::size_t nr = grid.moduli.size();
    for (std::size_t a = 0; a < grid.args.size(); ++a) {
      if (grid.args[a] != 0.0) continue;
      for (std::size_t k = 0; k < nr; ++k) {
        const double x = sector.rows[a * nr + k].max_ratio, y = real_coarse.rows[k].max_ratio;
        agreement = std::max(agreement, std::abs(x - y) / std::abs(y));
      }
    }
    const SectorGrid sub = restrict_grid(grid, theta / 2.0);
    const BoundReport nested = poisson_sector(coarse.op, theta / 2.0, sub);
    const bool nested_ok = nested.fitted_c <= sector.fitted_c;
    const bool weak_ok = sector.fitted_decay.at("weak_exponent_c") <= sector.fitted_decay.at("weak_exponent_bound");
    const bool pass = finite && agreement <= 1e-12 && sector.violation_fraction == 0.0 && nested_ok && weak_ok;
    std::string rays;
    for (const auto& ray : sector.rays) rays += fmt("%.3f ", ray.fitted_c);
    report(4, "sector Poisson bound", pass,
           fmt("c per ray=[%s] arg0 diff=%.1e nested c=%.4f<=%.4f monotone=%s", rays.c_str(), agreement,
               nested.fitted_c, sector.fitted_c, sector.monotone_in_arg ? "yes" : "no"),
           seconds_since(start));
  }

  // 5. strong continuity
  start = Clock::now();
  {
    auto fns = polynomial_test_functions(coarse.op);
    fns.erase(fns.begin());  // drop the constant
    const ContinuityReport cont = strong_continuity(coarse.op, fns, log_grid(1e-3, 1e-1, 24));
    std::string slopes;
    for (const auto& c : cont.curves) slopes += fmt("%s:%.3f ", c.name.c_str(), c.slope);
    report(5, "strong continuity rate", cont.min_slope >= 0.45, fmt("slopes %s", slopes.c_str()),
           seconds_since(start));
  }

  // 6. perturbation identity
  start = Clock::now();
  {
    double worst = 0.0;
    for (const Setup* s : {&coarse, &fine}) {
      for (const CoefficientField& c : {with_constant_potential(laplace, 1.0), with_random_potential(laplace, 7, 2.0)}) {
        const DiscreteForms forms_v = assemble(s->mesh, c);
        worst = std::max(worst, perturbation_identity(s->forms, forms_v).residual);
      }
    }
    report(6, "perturbation identity", worst <= 1e-10, fmt("max residual=%.2e (h=0.04, 0.02)", worst),
           seconds_since(start));
  }

  // 7. commutator bound
  start = Clock::now();
  {
    auto family_c = commutator_family(coarse.op);
    family_c.emplace_back("constant", Eigen::VectorXd::Constant(coarse.op.size(), 2.5));
    const CommutatorReport rc = commutator_bound(coarse.op, family_c);
    const CommutatorReport rf = commutator_bound(fine.op, commutator_family(fine.op));
    const double drift = relative_drift(rc.c_l2, rf.c_l2);
    const bool pass = std::isfinite(rc.c_l2) && drift < 0.30 && rc.constant_defect == 0.0;
    report(7, "commutator bound", pass,
           fmt("c=%.4f/%.4f drift=%.1f%% const defect=%.1e", rc.c_l2, rf.c_l2, 100 * drift, rc.constant_defect),
           seconds_since(start));
  }

  // 8. Schwartz kernel
  start = Clock::now();
  {
    const BoundReport sc = schwartz_kernel_bound(coarse.op);
    const BoundReport sf = schwartz_kernel_bound(fine.op);
    const double exponent = sc.fitted_decay.at("distance_exponent");
    const double drift = relative_drift(sc.fitted_c, sf.fitted_c);
    const bool pass = exponent >= -2.4 && exponent <= -1.6 && drift < 0.30;
    report(8, "Schwartz kernel bound", pass,
           fmt("exponent=%.4f c=%.4f/%.4f drift=%.1f%%", exponent, sc.fitted_c, sf.fitted_c, 100 * drift),
           seconds_since(start));
  }

  // 9. holomorphy and semigroup law
  start = Clock::now();
  {
    const double theta = std::numbers::pi / 3.0;
    const HolomorphyReport cr = cauchy_riemann(coarse.op, random_sector_points(theta, 20, 11, 0.05, 2.0), 12);
    const std::vector<Complex> a = random_sector_points(theta, 50, 21, 0.01, 2.0);
    const std::vector<Complex> b = random_sector_points(theta, 50, 22, 0.01, 2.0);
    double law = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) law = std::max(law, semigroup_law_defect(coarse.op, a[k], b[k]));
    const bool pass = cr.min_order >= 1.9 && law <= 1e-10;
    report(9, "holomorphy and semigroup law", pass, fmt("min CR order=%.3f max law defect=%.2e", cr.min_order, law),
           seconds_since(start));
  }

  // 10. imaginary powers
  start = Clock::now();
  {
    const ImaginaryPowerReport ip = imaginary_power_report(coarse.op, 1.0, {1.0, 2.0, 4.0, 8.0});
    double worst = 0.0;
    for (double n : ip.norms_l2) worst = std::max(worst, std::abs(n - 1.0));
    const bool pass = worst <= 1e-10 && std::isfinite(ip.nu);
    report(10, "imaginary powers", pass,
           fmt("max |norm_2 - 1|=%.1e nu=%.4f linf norms=%.2f..%.2f", worst, ip.nu, ip.norms_linf.front(),
               ip.norms_linf.back()),
           seconds_since(start));
  }

  // 11. maximal regularity
  start = Clock::now();
  {
    const DtnOperator& op = coarse.op;
    const Eigen::Index m = op.size();
    Eigen::VectorXd x(m);
    for (Eigen::Index i = 0; i < m; ++i) x[i] = op.boundary_points()[static_cast<std::size_t>(i)].x();
    const Eigen::VectorXd g = apply_dtn(op, x) - x;

    // manufactured solution e^{-t} x
    EvolutionProblem manufactured;
    manufactured.op = &op;
    manufactured.tau = 1.0;
    manufactured.initial = x;
    manufactured.forcing = sample_forcing([&](double t) { return Eigen::VectorXd(std::exp(-t) * g); }, m, 1.0, 4096);
    const Trajectory traj = solve(manufactured);
    double manufactured_err = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k)
      manufactured_err = std::max(
          manufactured_err,
          (traj.values.col(static_cast<Eigen::Index>(k)) - std::exp(-traj.times[k]) * x).cwiseAbs().maxCoeff());

    // single mode e^{i omega t} phi_n against the scalar closed form
    const int n = 3;
    const double omega = 2.0, lambda = op.eigenvalues()[n];
    const Eigen::VectorXd mode = op.eigenvectors().col(n);
    EvolutionProblem cos_problem;
    cos_problem.op = &op;
    cos_problem.initial = Eigen::VectorXd::Zero(m);
    cos_problem.forcing = sample_forcing([&](double t) { return Eigen::VectorXd(std::cos(omega * t) * mode); }, m, 1.0,
                                         16384);
    EvolutionProblem sin_problem = cos_problem;
    sin_problem.forcing = sample_forcing([&](double t) { return Eigen::VectorXd(std::sin(omega * t) * mode); }, m, 1.0,
                                         16384);
    const Trajectory tc = solve(cos_problem), ts = solve(sin_problem);
    double mode_err = 0.0;
    for (std::size_t k = 0; k < tc.times.size(); ++k) {
      const double t = tc.times[k];
      const Complex exact = (std::exp(Complex(0.0, omega * t)) - std::exp(-lambda * t)) / Complex(lambda, omega);
      const auto col = static_cast<Eigen::Index>(k);
      mode_err = std::max(mode_err, (tc.values.col(col) - exact.real() * mode).cwiseAbs().maxCoeff());
      mode_err = std::max(mode_err, (ts.values.col(col) - exact.imag() * mode).cwiseAbs().maxCoeff());
    }

    // c_emp(2,2) under time-step and mesh halving
    const auto c_emp = [](const DtnOperator& o, int steps) {
      std::vector<EvolutionProblem> family;
      for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        EvolutionProblem p;
        p.op = &o;
        p.initial = Eigen::VectorXd::Zero(o.size());
        p.forcing = random_forcing(o, seed, 1.0, steps);
        family.push_back(std::move(p));
      }
      return max_regularity_report(family).c_emp;
    };
    std::vector<double> by_steps;
    for (int steps : {200, 400, 800, 1600}) by_steps.push_back(c_emp(op, steps));
    double time_drift = 0.0;
    for (std::size_t k = 1; k < by_steps.size(); ++k)
      time_drift = std::max(time_drift, relative_drift(by_steps[k - 1], by_steps[k]));
    const double mesh_drift = relative_drift(by_steps.front(), c_emp(fine.op, 200));
    const bool pass = manufactured_err <= 1e-8 && mode_err <= 1e-8 && std::isfinite(by_steps.front()) &&
                      time_drift < 0.30 && mesh_drift < 0.30;
    report(11, "maximal regularity", pass,
           fmt("manufactured err=%.1e mode err=%.1e c(2,2)=%.4f dt drift=%.2f%% mesh drift=%.2f%%", manufactured_err,
               mode_err, by_steps.front(), 100 * time_drift, 100 * mesh_drift),
           seconds_since(start));
  }

  // 12. sector schedule
  start = Clock::now();
  {
    const int d = 2;
    const SectorSchedule schedule = sector_schedule(d, 1.5);
    const double half_pi = std::numbers::pi / 2.0;
    bool exact = schedule.thetas.front() == std::numbers::pi / (2.0 * d);
    double recurrence = 0.0;
    for (std::size_t k = 1; k < schedule.thetas.size(); ++k) {
      const double lhs = half_pi - schedule.thetas[k];
      const double rhs = (1.0 - 1.0 / d) * (half_pi - schedule.thetas[k - 1]);
      recurrence = std::max(recurrence, std::abs(lhs - rhs));
    }
    // recurrence evaluated in floating point: a few ulps of pi/2
    exact = exact && recurrence <= 4.0 * std::numeric_limits<double>::epsilon() * half_pi;
    const int steps = static_cast<int>(schedule.thetas.size()) - 1;
    const bool pass = exact && steps == schedule.predicted_steps;
    report(12, "sector schedule", pass,
           fmt("theta_1=%.6f steps=%d predicted=%d recurrence defect=%.1e", schedule.thetas.front(), steps,
               schedule.predicted_steps, recurrence),
           seconds_since(start));
  }

  std::printf("acceptance: %d failure(s), total %.1fs\n", failures, seconds_since(suite_start));
  return failures == 0 ? 0 : 1;
}
