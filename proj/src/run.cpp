#include "steklov/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "steklov/parabolic.hpp"
#include "steklov/semigroup.hpp"
#include "steklov/verify.hpp"

namespace steklov {

namespace {

constexpr double kPi = std::numbers::pi;

template <typename... Args>
std::string fmt(const char* format, Args... args) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

// Runs a stage and prefixes any failure with the module it came from.
template <typename F>
auto stage(const char* module, F&& f) {
  try {
    return f();
  } catch (const MeshingError& e) {
    throw std::runtime_error(std::string(module) + ": " + e.what() +
                             fmt(" near (%g, %g)", e.location().x(), e.location().y()));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(module) + ": " + e.what());
  }
}

bool has_potential(const RunConfig& config) { return config.potential.kind != "none"; }

double theta_rad(const RunConfig& config) { return config.sweeps.theta_deg * kPi / 180.0; }

SweepOptions sweep_options(const RunConfig& config) {
  SweepOptions options;
  options.time_floor = config.sweeps.time_floor;
  options.max_pairs = config.sweeps.max_pairs;
  options.seed = config.sweeps.seed;
  options.decay_window_lo = config.sweeps.decay_lo;
  options.decay_window_hi = config.sweeps.decay_hi;
  return options;
}

std::vector<double> short_times(const RunConfig& config) { return log_grid(1e-3, 1e-1, config.sweeps.per_decade); }

std::string dat_columns(const std::vector<double>& x, const std::vector<double>& y) {
  std::ostringstream out;
  for (std::size_t k = 0; k < x.size(); ++k) out << format_double(x[k]) << ' ' << format_double(y[k]) << '\n';
  return out.str();
}

struct Context {
  const Pipeline& pipe;
  const RunConfig& config;
  CheckResult result;

  const DtnOperator& op() const { return pipe.op; }
  void gate(std::string name, bool pass, std::string detail) {
    result.gates.push_back({std::move(name), pass, std::move(detail)});
  }
};

void check_spectrum(Context& ctx) {
  const DtnOperator& op = ctx.op();
  const Eigen::VectorXd& ev = op.eigenvalues();
  const Eigen::Index count = std::min<Eigen::Index>(9, op.size());
  ctx.result.report = {{"boundary_dof", op.size()},
                       {"lambda1", op.lambda1()},
                       {"first", std::vector<double>(ev.data(), ev.data() + count)}};
  if (!has_potential(ctx.config) && op.size() > 1)
    ctx.gate("lambda1_zero", std::abs(op.lambda1()) <= 1e-6 * ev[1], fmt("|lambda1| = %.2e", std::abs(op.lambda1())));
  if (ctx.config.domain.kind == "disk" && ctx.config.coefficients == "identity" && !has_potential(ctx.config)) {
    // Unit conductivity on a disk of radius R: eigenvalues 0, 1/R, 1/R, 2/R, 2/R, ...
    double worst = 0.0;
    for (Eigen::Index n = 1; n < count; ++n) {
      const double expected = static_cast<double>((n + 1) / 2) / ctx.config.domain.radius;
      worst = std::max(worst, std::abs(ev[n] - expected) / expected);
    }
    ctx.result.report["disk_max_relative_error"] = worst;
    ctx.gate("disk_spectrum", worst <= 0.02, fmt("max relative error %.3e", worst));
  }
  if (has_potential(ctx.config)) {
    // Lower-boundedness: phi^T N phi >= int V u^2 >= -max|V| (E phi)^T M (E phi).
    const PotentialSpec& v = ctx.config.potential;
    const double max_v = v.kind == "constant" ? std::abs(v.value) : v.amplitude;
    const double c_mesh = stage("dtn", [&] { return lifting_mass_constant(ctx.pipe.forms, DirichletSolver(ctx.pipe.forms)); });
    const double bound = -max_v * c_mesh;
    ctx.result.report["lifting_mass_constant"] = c_mesh;
    ctx.result.report["lambda1_lower_bound"] = bound;
    ctx.gate("lambda1_lower_bound", op.lambda1() >= bound * (1.0 + 1e-10),
             fmt("lambda1 = %.4f >= %.4f", op.lambda1(), bound));
  }
  std::vector<double> index, values;
  for (Eigen::Index n = 0; n < op.size(); ++n) {
    index.push_back(static_cast<double>(n + 1));
    values.push_back(ev[n]);
  }
  ctx.result.files["spectrum.csv"] = spectrum_csv(op, op.size());
  ctx.result.files["spectrum.dat"] = dat_columns(index, values);
}

void check_stochasticity(Context& ctx) {
  const DtnOperator& op = ctx.op();
  const std::vector<double> times{1e-3, 1e-2, 1e-1, 1.0, 10.0};
  std::vector<double> defects;
  std::ostringstream csv;
  csv << "t,max_row_sum_defect\n";
  for (double t : times) {
    const Eigen::VectorXd rows = real_kernel(op, t) * op.weights();
    defects.push_back((rows.array() - 1.0).abs().maxCoeff());
    csv << format_double(t) << ',' << format_double(defects.back()) << '\n';
  }
  const double worst = *std::max_element(defects.begin(), defects.end());
  ctx.result.report = {{"times", times}, {"defects", defects}, {"max_row_sum_defect", worst}};
  ctx.result.files["stochasticity.csv"] = csv.str();
  ctx.gate("stochasticity", worst <= 1e-8, fmt("max |row sum - 1| = %.2e", worst));
}

void check_poisson_real(Context& ctx) {
  const RunConfig& config = ctx.config;
  const std::vector<double> grid = sweep_grid(config);
  const BoundReport real = stage("verify", [&] { return poisson_real(ctx.op(), grid, sweep_options(config)); });

  // The on-diagonal decay exponent is resolved only where the boundary spacing
  // is well below the time scale, so it is fitted on a boundary-graded mesh.
  DtnOperator graded;
  const DtnOperator* decay_op = &ctx.op();
  const double main_boundary_h = config.boundary_h > 0.0 ? config.boundary_h : config.h;
  if (config.sweeps.decay_boundary_h > 0.0 && config.sweeps.decay_boundary_h < main_boundary_h) {
    graded = stage("dtn", [&] {
      const Mesh mesh = triangulate(make_domain(config.domain), config.h, config.sweeps.decay_boundary_h);
      return build_dtn(assemble(mesh, make_coefficients(config)));
    });
    decay_op = &graded;
  }
  const std::vector<double> window = log_grid(config.sweeps.decay_lo, config.sweeps.decay_hi, config.sweeps.per_decade);
  const std::vector<double> sup = on_diagonal_sup(*decay_op, window);
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < window.size(); ++k) {
    lx.push_back(std::log(window[k]));
    ly.push_back(std::log(sup[k]));
  }
  const double slope = fit_slope(lx, ly);

  Json& rep = ctx.result.report;
  rep = to_json(real);
  rep["fitted_decay"]["on_diagonal_slope"] = slope;
  rep["decay_fit"] = {{"boundary_dof", decay_op->size()}, {"graded", decay_op != &ctx.op()}};
  std::vector<double> ratio;
  for (const auto& row : real.rows) ratio.push_back(row.max_ratio);
  ctx.result.files["poisson-real.csv"] = ratio_table_csv(real);
  ctx.result.files["poisson_real.dat"] = dat_columns(grid, ratio);
  ctx.result.files["on_diagonal.dat"] = dat_columns(window, sup);
  ctx.gate("poisson_real_slope", std::abs(slope + 1.0) <= 0.15, fmt("on-diagonal slope %.3f", slope));
  ctx.gate("poisson_real_fit", std::isfinite(real.fitted_c) && real.violation_fraction == 0.0,
           fmt("c = %.4f", real.fitted_c));
}

void check_poisson_sector(Context& ctx) {
  const RunConfig& config = ctx.config;
  const DtnOperator& op = ctx.op();
  const double theta = theta_rad(config);
  const SweepOptions options = sweep_options(config);
  const std::vector<double> grid = sweep_grid(config);
  const SectorGrid sgrid = make_sector_grid(theta, config.sweeps.rays, 0.95, grid);
  const BoundReport sector = stage("verify", [&] { return poisson_sector(op, theta, sgrid, options); });
  const BoundReport real = stage("verify", [&] { return poisson_real(op, grid, options); });

  // The arg z = 0 ray must reproduce the real-time sweep.
  double agreement = 0.0;
  const std::size_t nr = grid.size();
  for (std::size_t a = 0; a < sgrid.args.size(); ++a) {
    if (sgrid.args[a] != 0.0) continue;
    for (std::size_t k = 0; k < nr; ++k)
      agreement = std::max(agreement, std::abs(sector.rows[a * nr + k].max_ratio - real.rows[k].max_ratio) /
                                          real.rows[k].max_ratio);
  }
  const SectorGrid sub = restrict_grid(sgrid, 0.5 * theta);
  const double nested_c = sub.args.empty() ? 0.0 : poisson_sector(op, 0.5 * theta, sub, options).fitted_c;

  Json& rep = ctx.result.report;
  rep = to_json(sector);
  rep["arg0_agreement"] = agreement;
  rep["nested_theta"] = 0.5 * theta;
  rep["nested_fitted_c"] = nested_c;
  ctx.result.files["poisson-sector.csv"] = ratio_table_csv(sector);
  bool finite = true;
  for (const auto& ray : sector.rays) finite = finite && std::isfinite(ray.fitted_c);
  ctx.gate("poisson_sector_fit", finite && sector.violation_fraction == 0.0, fmt("c = %.4f", sector.fitted_c));
  ctx.gate("poisson_sector_arg0", agreement <= 1e-12, fmt("arg 0 ray vs real sweep %.1e", agreement));
  ctx.gate("poisson_sector_nested", nested_c <= sector.fitted_c,
           fmt("c(theta/2) = %.4f <= c(theta) = %.4f", nested_c, sector.fitted_c));
  const double weak_c = sector.fitted_decay.at("weak_exponent_c");
  const double weak_bound = sector.fitted_decay.at("weak_exponent_bound");
  ctx.gate("poisson_sector_weak_exponent", weak_c <= weak_bound, fmt("weak c = %.4f <= %.4f", weak_c, weak_bound));
}

void check_continuity(Context& ctx) {
  const std::vector<double> times = short_times(ctx.config);
  std::ostringstream csv;
  if (ctx.pipe.reference_op) {
    // General potential: bounded-perturbation rate against the V = 0 semigroup.
    const DuhamelRate rate = stage("verify", [&] { return duhamel_rate(ctx.op(), *ctx.pipe.reference_op, times); });
    ctx.result.report = {{"mode", "perturbation_rate"}, {"rate", to_json(rate)}};
    csv << "t,difference\n";
    for (std::size_t k = 0; k < rate.times.size(); ++k)
      csv << format_double(rate.times[k]) << ',' << format_double(rate.differences[k]) << '\n';
    ctx.result.files["continuity.csv"] = csv.str();
    ctx.result.files["continuity.dat"] = "t \"difference\"\n" + dat_columns(rate.times, rate.differences);
    ctx.gate("perturbation_rate", std::isfinite(rate.constant) && rate.slope >= 0.9,
             fmt("C = %.4f, slope %.3f", rate.constant, rate.slope));
    return;
  }
  const ContinuityReport report =
      stage("verify", [&] { return strong_continuity(ctx.op(), polynomial_test_functions(ctx.op()), times); });
  ctx.result.report = {{"mode", "strong_continuity"}, {"report", to_json(report)}};
  std::ostringstream dat;
  csv << "t";
  dat << "t";
  for (const auto& c : report.curves) {
    csv << ',' << c.name;
    dat << " \"" << c.name << '"';
  }
  csv << '\n';
  dat << '\n';
  for (std::size_t k = 0; k < times.size(); ++k) {
    csv << format_double(times[k]);
    dat << format_double(times[k]);
    for (const auto& c : report.curves) {
      csv << ',' << format_double(c.errors[k]);
      dat << ' ' << format_double(c.errors[k]);
    }
    csv << '\n';
    dat << '\n';
  }
  ctx.result.files["continuity.csv"] = csv.str();
  ctx.result.files["continuity.dat"] = dat.str();
  bool constant_zero = false;
  for (const auto& c : report.curves)
    if (c.name == "1") constant_zero = c.identically_zero;
  ctx.gate("continuity_rate", report.min_slope >= 0.45, fmt("min slope %.3f", report.min_slope));
  ctx.gate("continuity_constant", constant_zero, constant_zero ? "S_t 1 = 1" : "S_t 1 != 1");
}

void check_perturbation(Context& ctx) {
  const DiscreteForms& reference = ctx.pipe.reference_forms ? *ctx.pipe.reference_forms : ctx.pipe.forms;
  const PerturbationReport report = stage("verify", [&] { return perturbation_identity(reference, ctx.pipe.forms); });
  ctx.result.report = to_json(report);
  ctx.result.files["perturbation.csv"] = "quantity,value\nresidual," + format_double(report.residual) +
                                         "\nq_norm," + format_double(report.q_norm) + "\nschur_norm," +
                                         format_double(report.schur_norm) + "\n";
  ctx.gate("perturbation_identity", report.residual <= 1e-10, fmt("residual %.2e", report.residual));
}

void check_commutator(Context& ctx) {
  const DtnOperator& op = ctx.op();
  auto family = commutator_family(op);
  family.emplace_back("constant", Eigen::VectorXd::Constant(op.size(), 1.0));
  const CommutatorReport report = stage("verify", [&] { return commutator_bound(op, family); });
  ctx.result.report = to_json(report);
  std::ostringstream csv;
  csv << "name,lipschitz,norm_l2,norm_linf,ratio_l2,ratio_linf\n";
  for (const auto& e : report.entries)
    csv << e.name << ',' << format_double(e.lipschitz) << ',' << format_double(e.norm_l2) << ','
        << format_double(e.norm_linf) << ',' << format_double(e.ratio_l2) << ',' << format_double(e.ratio_linf)
        << '\n';
  ctx.result.files["commutator.csv"] = csv.str();
  ctx.gate("commutator", std::isfinite(report.c_l2) && std::isfinite(report.c_linf) && report.constant_defect == 0.0,
           fmt("c = %.4f, constant defect %.1e", report.c_l2, report.constant_defect));
}

void check_schwartz(Context& ctx) {
  const BoundReport report = stage("verify", [&] { return schwartz_kernel_bound(ctx.op()); });
  ctx.result.report = to_json(report);
  ctx.result.files["schwartz.csv"] = ratio_table_csv(report);
  ctx.gate("schwartz_fit", std::isfinite(report.fitted_c), fmt("c = %.4f", report.fitted_c));
  double exponent = report.fitted_decay.at("distance_exponent");
  if (ctx.pipe.reference_op) {
    // A potential adds a smooth kernel that can dominate at O(1) distances and
    // flatten a global fit; the singular exponent is that of the V = 0 operator,
    // and the difference of the two kernels must stay bounded.
    const BoundReport reference = stage("verify", [&] { return schwartz_kernel_bound(*ctx.pipe.reference_op); });
    exponent = reference.fitted_decay.at("distance_exponent");
    const Eigen::MatrixXd difference = schwartz_kernel(ctx.op()) - schwartz_kernel(*ctx.pipe.reference_op);
    const double bounded = difference.cwiseAbs().maxCoeff();
    ctx.result.report["reference_distance_exponent"] = exponent;
    ctx.result.report["max_abs_kernel_difference"] = bounded;
    ctx.gate("schwartz_difference_bounded", std::isfinite(bounded),
             fmt("max |K_V - K_0| = %.4f", bounded));
  }
  ctx.gate("schwartz_exponent", exponent >= -2.4 && exponent <= -1.6, fmt("distance exponent %.3f", exponent));
}

void check_holomorphy(Context& ctx) {
  const RunConfig& config = ctx.config;
  const DtnOperator& op = ctx.op();
  const double theta = theta_rad(config);
  const std::uint64_t seed = config.sweeps.seed;
  const auto count = static_cast<std::size_t>(config.sweeps.holomorphy_points);
  const HolomorphyReport cr = stage("verify", [&] {
    return cauchy_riemann(op, random_sector_points(theta, count, seed + 10, 0.05, 2.0), seed + 11);
  });
  const auto pairs = static_cast<std::size_t>(config.sweeps.semigroup_pairs);
  const auto a = random_sector_points(theta, pairs, seed + 20, 0.01, 2.0);
  const auto b = random_sector_points(theta, pairs, seed + 21, 0.01, 2.0);
  double law = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) law = std::max(law, semigroup_law_defect(op, a[k], b[k]));
  ctx.result.report = {{"cauchy_riemann", to_json(cr)}, {"semigroup_law", {{"pairs", pairs}, {"max_defect", law}}}};
  std::ostringstream csv;
  csv << "re_z,im_z,residual_coarse,residual_fine,order\n";
  for (const auto& p : cr.points)
    csv << format_double(p.z.real()) << ',' << format_double(p.z.imag()) << ',' << format_double(p.residual_coarse)
        << ',' << format_double(p.residual_fine) << ',' << format_double(p.order) << '\n';
  ctx.result.files["holomorphy.csv"] = csv.str();
  ctx.gate("holomorphy", cr.min_order >= 1.9, fmt("min Cauchy-Riemann order %.3f", cr.min_order));
  ctx.gate("semigroup_law", law <= 1e-10, fmt("max defect %.2e", law));
}

void check_imaginary_powers(Context& ctx) {
  const DtnOperator& op = ctx.op();
  const double shift = 1.0 - op.lambda1();
  const ImaginaryPowerReport report = imaginary_power_report(op, shift, {0.5, 1.0, 2.0, 4.0, 8.0});
  double worst = 0.0;
  for (double n : report.norms_l2) worst = std::max(worst, std::abs(n - 1.0));
  ctx.result.report = to_json(report);
  ctx.result.report["max_unitarity_defect"] = worst;
  std::ostringstream csv;
  csv << "s,norm_l2,norm_linf\n";
  for (std::size_t k = 0; k < report.s_values.size(); ++k)
    csv << format_double(report.s_values[k]) << ',' << format_double(report.norms_l2[k]) << ','
        << format_double(report.norms_linf[k]) << '\n';
  ctx.result.files["imaginary-powers.csv"] = csv.str();
  ctx.gate("imaginary_powers", worst <= 1e-10 && std::isfinite(report.nu),
           fmt("max |norm - 1| %.1e, nu %.3f", worst, report.nu));
}

void check_max_regularity(Context& ctx) {
  const ParabolicSpec& ps = ctx.config.parabolic;
  const DtnOperator& op = ctx.op();
  std::vector<EvolutionProblem> family;
  for (int k = 0; k < ps.forcings; ++k) {
    EvolutionProblem p;
    p.op = &op;
    p.tau = ps.tau;
    p.r = ps.r;
    p.p = ps.p;
    p.initial = Eigen::VectorXd::Zero(op.size());
    p.forcing = random_forcing(op, ps.seed + static_cast<std::uint64_t>(k), ps.tau, ps.steps);
    family.push_back(std::move(p));
  }
  const MaxRegularityReport mr = stage("parabolic", [&] { return max_regularity_report(family); });

  // Manufactured solution e^{-t} x restricted to the boundary. The solver is
  // exact for piecewise-linear forcing, so the only error is the O(dt^2)
  // interpolation of the sampled forcing, amplified by e^{-lambda1 tau} when
  // lambda1 < 0; the step count is doubled until the tolerance is met.
  Eigen::VectorXd x(op.size());
  for (Eigen::Index i = 0; i < op.size(); ++i) x[i] = op.boundary_points()[static_cast<std::size_t>(i)].x();
  const Eigen::VectorXd g = apply_dtn(op, x) - x;
  const auto manufactured_error = [&](int steps) {
    EvolutionProblem manufactured;
    manufactured.op = &op;
    manufactured.tau = ps.tau;
    manufactured.r = ps.r;
    manufactured.p = ps.p;
    manufactured.initial = x;
    manufactured.forcing =
        sample_forcing([&](double t) { return Eigen::VectorXd(std::exp(-t) * g); }, op.size(), ps.tau, steps);
    const Trajectory traj = stage("parabolic", [&] { return solve(manufactured); });
    double err = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k)
      err = std::max(err, (traj.values.col(static_cast<Eigen::Index>(k)) - std::exp(-traj.times[k]) * x)
                              .cwiseAbs()
                              .maxCoeff());
    return err;
  };
  constexpr double tolerance = 1e-8;
  constexpr int max_steps = 32768;
  std::vector<int> step_history{4096};
  std::vector<double> error_history{manufactured_error(step_history.back())};
  while (error_history.back() > tolerance && step_history.back() < max_steps) {
    step_history.push_back(2 * step_history.back());
    error_history.push_back(manufactured_error(step_history.back()));
  }
  const double err = error_history.back();
  const std::size_t n = error_history.size();
  const double order = n >= 2 && error_history[n - 1] > 0.0 ? std::log2(error_history[n - 2] / error_history[n - 1])
                                                            : std::numeric_limits<double>::quiet_NaN();

  ctx.result.report = to_json(mr);
  ctx.result.report["manufactured_error"] = err;
  ctx.result.report["manufactured_steps"] = step_history;
  ctx.result.report["manufactured_errors"] = error_history;
  if (std::isfinite(order)) ctx.result.report["manufactured_observed_order"] = order;
  std::ostringstream csv;
  csv << "forcing,ratio\n";
  for (std::size_t k = 0; k < mr.ratios.size(); ++k) csv << k << ',' << format_double(mr.ratios[k]) << '\n';
  ctx.result.files["max-regularity.csv"] = csv.str();
  ctx.gate("max_regularity", std::isfinite(mr.c_emp) && mr.max_relative_residual <= 1e-8,
           fmt("c_emp(%g,%g) = %.4f, residual %.1e", ps.r, ps.p, mr.c_emp, mr.max_relative_residual));
  ctx.gate("manufactured_solution", err <= tolerance,
           fmt("max error %.1e with %d steps", err, step_history.back()));
}

void check_schedule(Context& ctx) {
  // Sector widening from the Gaussian-bound start pi/(2d) up to the configured sweep sector.
  constexpr int d = 2;
  const SectorSchedule schedule = sector_schedule(d, theta_rad(ctx.config));
  ctx.result.report = to_json(schedule);
  std::ostringstream csv;
  csv << "n,theta,theta_next,z2_bound,alpha,z1_arg,z2_arg\n";
  for (const auto& s : schedule.steps)
    csv << s.n << ',' << format_double(s.theta) << ',' << format_double(s.theta_next) << ','
        << format_double(s.z2_bound) << ',' << format_double(s.alpha) << ',' << format_double(s.z1_arg) << ','
        << format_double(s.z2_arg) << '\n';
  ctx.result.files["schedule.csv"] = csv.str();

  const double half_pi = kPi / 2.0;
  double recurrence = 0.0;
  for (std::size_t k = 1; k < schedule.thetas.size(); ++k)
    recurrence = std::max(recurrence, std::abs((half_pi - schedule.thetas[k]) -
                                               (1.0 - 1.0 / d) * (half_pi - schedule.thetas[k - 1])));
  const int steps = static_cast<int>(schedule.thetas.size()) - 1;
  const bool ok = schedule.thetas.front() == kPi / (2.0 * d) && steps == schedule.predicted_steps &&
                  recurrence <= 4.0 * std::numeric_limits<double>::epsilon() * half_pi;
  ctx.result.report["recurrence_defect"] = recurrence;
  ctx.gate("sector_schedule", ok,
           fmt("%d steps, predicted %d, recurrence defect %.1e", steps, schedule.predicted_steps, recurrence));
}

using CheckFn = void (*)(Context&);

const std::vector<std::pair<std::string, CheckFn>>& registry() {
  static const std::vector<std::pair<std::string, CheckFn>> checks{
      {"spectrum", check_spectrum},
      {"stochasticity", check_stochasticity},
      {"poisson-real", check_poisson_real},
      {"poisson-sector", check_poisson_sector},
      {"continuity", check_continuity},
      {"perturbation", check_perturbation},
      {"commutator", check_commutator},
      {"schwartz", check_schwartz},
      {"holomorphy", check_holomorphy},
      {"imaginary-powers", check_imaginary_powers},
      {"max-regularity", check_max_regularity},
      {"schedule", check_schedule},
  };
  return checks;
}

}  // namespace

bool RunResult::all_pass() const {
  return std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.pass; });
}

std::vector<double> sweep_grid(const RunConfig& config) {
  return log_grid(config.sweeps.t_lo, config.sweeps.t_hi, config.sweeps.per_decade);
}

Pipeline build_pipeline(const RunConfig& config, bool with_operator) {
  validate(config);
  Pipeline p;
  const SmoothDomain domain = stage("geometry", [&] { return make_domain(config.domain); });
  p.mesh = stage("geometry", [&] { return triangulate(domain, config.h, config.boundary_h); });
  const MeshCheck check = check_mesh(p.mesh, domain);
  if (!check.ok()) throw std::runtime_error("geometry: invalid mesh: " + check.message);
  p.forms = stage("fem_core", [&] { return assemble(p.mesh, make_coefficients(config)); });
  p.wellposedness = stage("fem_core", [&] { return check_wellposedness(p.forms); });
  if (!p.wellposedness.well_posed)
    throw std::runtime_error(fmt("fem_core: Dirichlet problem is not well posed (sigma_min = %.3e)",
                                 p.wellposedness.sigma_min));
  if (!with_operator) return p;
  p.op = stage("dtn", [&] { return build_dtn(p.forms); });
  if (has_potential(config)) {
    auto reference = std::make_shared<DiscreteForms>(
        stage("fem_core", [&] { return assemble(p.mesh, make_reference_coefficients(config)); }));
    p.reference_op = std::make_shared<DtnOperator>(stage("dtn", [&] { return build_dtn(*reference); }));
    p.reference_forms = std::move(reference);
  }
  return p;
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& entry : registry()) out.push_back(entry.first);
    return out;
  }();
  return names;
}

bool check_applies(const std::string& name, const RunConfig& config) {
  if (name == "stochasticity") return !has_potential(config);
  if (name == "perturbation") return has_potential(config);
  return true;
}

CheckResult run_check(const std::string& name, const Pipeline& pipe, const RunConfig& config) {
  for (const auto& [key, fn] : registry()) {
    if (key != name) continue;
    Context ctx{pipe, config, {}};
    fn(ctx);
    return std::move(ctx.result);
  }
  throw std::invalid_argument("unknown check '" + name + "'");
}

std::string gnuplot_template() {
  return R"(# Plots the data files written by `steklov run`; usage: gnuplot plots.gp
set terminal pngcairo size 900,600
set key left bottom

set output 'spectrum.png'
set title 'DtN eigenvalues'
plot 'spectrum.dat' using 1:2 with points title 'lambda_n'

set logscale xy
set output 'on_diagonal.png'
set title 'sup_w K_t(w,w)'
plot 'on_diagonal.dat' using 1:2 with linespoints title 'kernel diagonal'

set output 'poisson_real.png'
set title 'worst Poisson ratio per t'
plot 'poisson_real.dat' using 1:2 with linespoints title 'max ratio'

set output 'continuity.png'
set title 'short-time continuity'
plot for [i=2:*] 'continuity.dat' using 1:i with linespoints title columnhead(i)
)";
}

void write_files(const std::filesystem::path& dir, const std::map<std::string, std::string>& files) {
  for (const auto& [name, content] : files) atomic_write(dir / name, content);
}

RunResult run(const RunConfig& config, bool write) {
  const Pipeline pipe = build_pipeline(config);

  RunResult result;
  Json& rep = result.report;
  rep["schema_version"] = kReportSchemaVersion;
  rep["config_hash"] = config_hash(config);
  rep["config"] = to_json(config);
  rep["mesh"] = {{"vertices", pipe.mesh.vertices.size()},
                 {"triangles", pipe.mesh.triangles.size()},
                 {"boundary_dof", pipe.mesh.boundary_size()},
                 {"h", pipe.mesh.h}};
  rep["wellposedness"] = to_json(pipe.wellposedness);

  std::map<std::string, std::string> files;
  Json checks = Json::object();
  for (const std::string& name : check_names()) {
    if (!check_applies(name, config)) continue;
    CheckResult check = run_check(name, pipe, config);
    checks[name] = std::move(check.report);
    for (auto& g : check.gates) result.gates.push_back(std::move(g));
    files.merge(check.files);
  }
  rep["checks"] = std::move(checks);

  Json gates = Json::array();
  for (const auto& g : result.gates) gates.push_back({{"name", g.name}, {"pass", g.pass}, {"detail", g.detail}});
  rep["gates"] = std::move(gates);
  rep["all_pass"] = result.all_pass();

  if (write) {
    const std::filesystem::path dir(config.output_dir);
    files["config.json"] = to_json(config).dump(2) + "\n";
    files["plots.gp"] = gnuplot_template();
    write_files(dir, files);
    atomic_write(dir / "report.json", rep.dump(2) + "\n");
  }
  return result;
}

}  // namespace steklov
