#include "steklov/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

#include "steklov/parallel.hpp"

namespace steklov {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

double distance(const DtnOperator& op, Eigen::Index i, Eigen::Index j) {
  return (op.boundary_points()[static_cast<std::size_t>(i)] - op.boundary_points()[static_cast<std::size_t>(j)]).norm();
}

// Per-grid-point worst ratio over the pair sample. The kernel entry is the
// dot product of row i of Phi diag(e) with row j of Phi, split into real and
// imaginary parts exactly as in kernel().
struct PairSweep {
  const DtnOperator& op;
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> distances;
  Eigen::MatrixXd phi_t;  // Phi^T: column i holds the modal values at vertex i

  PairSweep(const DtnOperator& op_in, const SweepOptions& options)
      : op(op_in), pairs(sample_pairs(op_in.size(), options.max_pairs, options.seed)),
        phi_t(op_in.eigenvectors().transpose()) {
    distances.reserve(pairs.size());
    for (const auto& [i, j] : pairs) distances.push_back(distance(op, i, j));
  }

  struct Result {
    RatioRow row;
    double weak_max = 0.0;       // max ratio with the weakened distance exponent
    double weak_factor = 0.0;    // max (1 + |w1-w2|/|z|)^{d eps} over the sample
  };

  Result evaluate(Complex z, const SweepOptions& options, double weak_exponent) const {
    const Eigen::Index m = op.size();
    Eigen::VectorXd er(m), ei(m);
    for (Eigen::Index n = 0; n < m; ++n) {
      const Complex e = decay_factor(op.eigenvalues()[n], z);
      er[n] = e.real();
      ei[n] = e.imag();
    }
    const Eigen::MatrixXd scaled_r = er.asDiagonal() * phi_t;
    const Eigen::MatrixXd scaled_i = ei.asDiagonal() * phi_t;
    const double re_z = z.real();
    const double modulus = std::abs(z);
    const double prefactor = std::pow(std::min(1.0, re_z), -1.0) * std::exp(-op.lambda1() * re_z);

    Result out;
    out.row.z = z;
    out.row.max_ratio = -1.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto [i, j] = pairs[k];
      const double kr = scaled_r.col(i).dot(phi_t.col(j));
      const double ki = scaled_i.col(i).dot(phi_t.col(j));
      const double kabs = std::abs(Complex(kr, ki));
      const double spread = 1.0 + distances[k] / modulus;
      const double bound = prefactor / std::pow(spread, options.distance_exponent);
      const double ratio = kabs / bound;
      if (ratio > out.row.max_ratio) {
        out.row.max_ratio = ratio;
        out.row.i = i;
        out.row.j = j;
        out.row.kernel_abs = kabs;
        out.row.bound = bound;
      }
      if (weak_exponent > 0.0) {
        out.weak_max = std::max(out.weak_max, kabs * std::pow(spread, weak_exponent) / prefactor);
        out.weak_factor = std::max(out.weak_factor, std::pow(spread, options.distance_exponent - weak_exponent));
      }
    }
    return out;
  }
};

void finalize(BoundReport& report, const SweepOptions& options) {
  report.fitted_c = 0.0;
  for (const auto& row : report.rows) report.fitted_c = std::max(report.fitted_c, row.max_ratio);
  report.max_ratio = report.fitted_c;
  report.slack = options.slack;
  report.time_floor = options.time_floor;
  std::size_t violations = 0;
  for (const auto& row : report.rows)
    if (row.max_ratio > report.fitted_c * (1.0 + options.slack)) ++violations;
  report.violation_fraction =
      report.rows.empty() ? 0.0 : static_cast<double>(violations) / static_cast<double>(report.rows.size());
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(hi >= lo) || per_decade <= 0) throw std::invalid_argument("log_grid: need 0 < lo <= hi");
  std::vector<double> out;
  const double span = std::log10(hi / lo) * per_decade;
  const int count = static_cast<int>(std::floor(span + 1e-9));
  for (int k = 0; k <= count; ++k) out.push_back(lo * std::pow(10.0, static_cast<double>(k) / per_decade));
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  return sxy / sxx;
}

std::vector<std::pair<int, int>> sample_pairs(Eigen::Index m, std::size_t max_pairs, std::uint64_t seed) {
  std::vector<std::pair<int, int>> out;
  const auto mm = static_cast<std::size_t>(m);
  const std::size_t total = mm * (mm + 1) / 2;
  if (total <= max_pairs) {
    out.reserve(total);
    for (int i = 0; i < static_cast<int>(m); ++i)
      for (int j = i; j < static_cast<int>(m); ++j) out.emplace_back(i, j);
    return out;
  }
  if (max_pairs < mm) throw std::invalid_argument("sample_pairs: max_pairs smaller than the diagonal");
  out.reserve(max_pairs);
  std::unordered_set<std::uint64_t> seen;
  for (int i = 0; i < static_cast<int>(m); ++i) {
    out.emplace_back(i, i);
    seen.insert(static_cast<std::uint64_t>(i) * mm + static_cast<std::uint64_t>(i));
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(m) - 1);
  while (out.size() < max_pairs) {
    int i = pick(rng), j = pick(rng);
    if (i > j) std::swap(i, j);
    if (seen.insert(static_cast<std::uint64_t>(i) * mm + static_cast<std::uint64_t>(j)).second) out.emplace_back(i, j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> on_diagonal_sup(const DtnOperator& op, const std::vector<double>& times) {
  const Eigen::MatrixXd squares = op.eigenvectors().cwiseAbs2();
  std::vector<double> out(times.size());
  parallel_for(times.size(), [&](std::size_t k) {
    Eigen::VectorXd e(op.size());
    for (Eigen::Index n = 0; n < op.size(); ++n) e[n] = std::exp(-op.eigenvalues()[n] * times[k]);
    out[k] = (squares * e).maxCoeff();
  });
  return out;
}

BoundReport poisson_real(const DtnOperator& op, const std::vector<double>& t_grid, const SweepOptions& options) {
  if (t_grid.empty()) throw std::invalid_argument("poisson_real: empty grid");
  for (double t : t_grid)
    if (!(t >= options.time_floor)) throw std::invalid_argument("poisson_real: grid point below the time floor");
  const PairSweep sweep(op, options);
  BoundReport report;
  report.bound_id = "poisson_real";
  report.lambda1_used = op.lambda1();
  report.pair_count = sweep.pairs.size();
  report.rows.resize(t_grid.size());
  parallel_for(t_grid.size(), [&](std::size_t k) {
    report.rows[k] = sweep.evaluate(Complex(t_grid[k], 0.0), options, 0.0).row;
  });
  finalize(report, options);

  std::vector<double> window, diag_times;
  for (double t : t_grid)
    if (t >= options.decay_window_lo * (1 - 1e-12) && t <= options.decay_window_hi * (1 + 1e-12)) window.push_back(t);
  if (window.size() >= 2) {
    const std::vector<double> sup = on_diagonal_sup(op, window);
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < window.size(); ++k) {
      lx.push_back(std::log(window[k]));
      ly.push_back(std::log(sup[k]));
    }
    report.fitted_decay["on_diagonal_slope"] = fit_slope(lx, ly);
  } else {
    report.fitted_decay["on_diagonal_slope"] = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

SectorGrid make_sector_grid(double theta, int rays, double fraction, const std::vector<double>& moduli) {
  if (rays < 1) throw std::invalid_argument("make_sector_grid: need at least one ray");
  SectorGrid grid;
  grid.moduli = moduli;
  if (rays == 1) {
    grid.args.push_back(0.0);
    return grid;
  }
  const double edge = fraction * theta;
  for (int r = 0; r < rays; ++r) grid.args.push_back(-edge + 2.0 * edge * r / (rays - 1));
  // exact zero for the central ray of an odd count
  if (rays % 2 == 1) grid.args[static_cast<std::size_t>(rays / 2)] = 0.0;
  return grid;
}

SectorGrid restrict_grid(const SectorGrid& grid, double theta_sub) {
  SectorGrid out;
  out.moduli = grid.moduli;
  for (double a : grid.args)
    if (std::abs(a) < theta_sub) out.args.push_back(a);
  return out;
}

BoundReport poisson_sector(const DtnOperator& op, double theta, const SectorGrid& grid, const SweepOptions& options) {
  if (!(theta > 0.0 && theta < kHalfPi)) throw std::invalid_argument("poisson_sector: theta must lie in (0, pi/2)");
  if (grid.args.empty() || grid.moduli.empty()) throw std::invalid_argument("poisson_sector: empty grid");
  for (double a : grid.args)
    if (!(std::abs(a) < theta)) throw std::invalid_argument("poisson_sector: grid point outside the sector");
  for (double r : grid.moduli)
    if (!(r >= options.time_floor)) throw std::invalid_argument("poisson_sector: grid point below the time floor");

  const PairSweep sweep(op, options);
  const double dim = options.distance_exponent;
  const double eps = 1.0 / (2.0 * dim);
  const double weak_exponent = dim * (1.0 - eps);

  const std::size_t nr = grid.moduli.size();
  const std::size_t total = grid.args.size() * nr;
  std::vector<PairSweep::Result> results(total);
  parallel_for(total, [&](std::size_t k) {
    const double arg = grid.args[k / nr];
    const double r = grid.moduli[k % nr];
    const Complex z = arg == 0.0 ? Complex(r, 0.0) : std::polar(r, arg);
    results[k] = sweep.evaluate(z, options, weak_exponent);
  });

  BoundReport report;
  report.bound_id = "poisson_sector";
  report.theta = theta;
  report.lambda1_used = op.lambda1();
  report.pair_count = sweep.pairs.size();
  double weak_c = 0.0, weak_factor = 0.0;
  for (std::size_t a = 0; a < grid.args.size(); ++a) {
    RayFit fit{grid.args[a], 0.0};
    for (std::size_t k = 0; k < nr; ++k) {
      const auto& res = results[a * nr + k];
      report.rows.push_back(res.row);
      fit.fitted_c = std::max(fit.fitted_c, res.row.max_ratio);
      weak_c = std::max(weak_c, res.weak_max);
      weak_factor = std::max(weak_factor, res.weak_factor);
    }
    report.rays.push_back(fit);
  }
  finalize(report, options);
  report.fitted_decay["weak_exponent"] = weak_exponent;
  report.fitted_decay["weak_exponent_c"] = weak_c;
  report.fitted_decay["weak_exponent_bound"] = report.fitted_c * weak_factor;

  std::vector<RayFit> by_arg = report.rays;
  std::stable_sort(by_arg.begin(), by_arg.end(),
                   [](const RayFit& a, const RayFit& b) { return std::abs(a.arg) < std::abs(b.arg); });
  report.monotone_in_arg = true;
  for (std::size_t k = 1; k < by_arg.size(); ++k)
    if (by_arg[k].fitted_c < by_arg[k - 1].fitted_c * (1.0 - 1e-12)) report.monotone_in_arg = false;
  return report;
}

std::vector<std::pair<std::string, Eigen::VectorXd>> polynomial_test_functions(const DtnOperator& op) {
  const Eigen::Index m = op.size();
  Eigen::VectorXd one = Eigen::VectorXd::Ones(m), x(m), y(m), xx(m), xy(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Point& w = op.boundary_points()[static_cast<std::size_t>(i)];
    x[i] = w.x();
    y[i] = w.y();
    xx[i] = w.x() * w.x();
    xy[i] = w.x() * w.y();
  }
  return {{"1", one}, {"x", x}, {"y", y}, {"x^2", xx}, {"xy", xy}};
}

ContinuityReport strong_continuity(const DtnOperator& op,
                                   const std::vector<std::pair<std::string, Eigen::VectorXd>>& test_fns,
                                   const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("strong_continuity: empty grid");
  ContinuityReport report;
  report.min_slope = std::numeric_limits<double>::infinity();
  for (const auto& [name, phi] : test_fns) {
    if (phi.size() != op.size()) throw std::invalid_argument("strong_continuity: dimension mismatch");
    ContinuityCurve curve;
    curve.name = name;
    curve.times = t_grid;
    curve.errors.resize(t_grid.size());
    parallel_for(t_grid.size(), [&](std::size_t k) {
      curve.errors[k] = (apply_semigroup(op, t_grid[k], phi) - phi).cwiseAbs().maxCoeff();
    });
    const double scale = std::max(1.0, phi.cwiseAbs().maxCoeff());
    const double worst = *std::max_element(curve.errors.begin(), curve.errors.end());
    // roundoff of the eigen-expansion is the only source of error for an invariant function
    curve.identically_zero = worst <= 1e-11 * scale;
    if (curve.identically_zero) {
      curve.slope = std::numeric_limits<double>::infinity();
    } else {
      std::vector<double> lx, ly;
      for (std::size_t k = 0; k < t_grid.size(); ++k) {
        lx.push_back(std::log(t_grid[k]));
        ly.push_back(std::log(curve.errors[k]));
      }
      curve.slope = fit_slope(lx, ly);
      report.min_slope = std::min(report.min_slope, curve.slope);
    }
    report.curves.push_back(std::move(curve));
  }
  return report;
}

DuhamelRate duhamel_rate(const DtnOperator& op_v, const DtnOperator& op_0, const std::vector<double>& t_grid) {
  if (op_v.size() != op_0.size()) throw std::invalid_argument("duhamel_rate: operators on different meshes");
  DuhamelRate out;
  out.times = t_grid;
  out.differences.resize(t_grid.size());
  parallel_for(t_grid.size(), [&](std::size_t k) {
    const Complex z(t_grid[k], 0.0);
    out.differences[k] = mass_operator_norm(op_v, semigroup_matrix(op_v, z) - semigroup_matrix(op_0, z));
  });
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    out.constant = std::max(out.constant, out.differences[k] / t_grid[k]);
    lx.push_back(std::log(t_grid[k]));
    ly.push_back(std::log(out.differences[k]));
  }
  out.slope = fit_slope(lx, ly);
  return out;
}

PerturbationReport perturbation_identity(const DiscreteForms& forms_0, const DiscreteForms& forms_v) {
  if (forms_0.vertex_count() != forms_v.vertex_count() || forms_0.boundary != forms_v.boundary ||
      forms_0.interior != forms_v.interior)
    throw std::invalid_argument("perturbation_identity: mesh mismatch");
  const double a_scale = forms_0.stiffness.norm();
  if ((forms_0.stiffness - forms_v.stiffness).norm() > 1e-12 * a_scale)
    throw std::invalid_argument("perturbation_identity: conductivity mismatch");
  if (forms_0.has_potential) throw std::invalid_argument("perturbation_identity: reference forms carry a potential");

  const DirichletSolver solver_0(forms_0), solver_v(forms_v);
  const Eigen::MatrixXd n_0 = schur_complement(forms_0, solver_0);
  const Eigen::MatrixXd n_v = schur_complement(forms_v, solver_v);
  const Eigen::MatrixXd e_0 = solver_0.lifting_matrix();
  const Eigen::MatrixXd e_v = solver_v.lifting_matrix();
  const Eigen::MatrixXd q = e_0.transpose() * (forms_v.potential * e_v);

  PerturbationReport out;
  out.q_norm = q.norm();
  out.schur_norm = n_v.norm();
  out.residual = (n_v - (n_0 + q)).norm() / out.schur_norm;
  return out;
}

double boundary_lipschitz(const DtnOperator& op, const Eigen::VectorXd& g) {
  if (g.size() != op.size()) throw std::invalid_argument("boundary_lipschitz: dimension mismatch");
  double lip = 0.0;
  for (Eigen::Index i = 0; i < op.size(); ++i)
    for (Eigen::Index j = i + 1; j < op.size(); ++j) lip = std::max(lip, std::abs(g[i] - g[j]) / distance(op, i, j));
  return lip;
}

Eigen::MatrixXd commutator(const DtnOperator& op, const Eigen::VectorXd& g) {
  if (g.size() != op.size()) throw std::invalid_argument("commutator: dimension mismatch");
  const Eigen::MatrixXd nodal = op.nodal_operator();
  return nodal * g.asDiagonal() - g.asDiagonal() * nodal;
}

std::vector<std::pair<std::string, Eigen::VectorXd>> commutator_family(const DtnOperator& op) {
  const Eigen::Index m = op.size();
  Eigen::VectorXd x(m), y(m), sin_s(m), cos_2s(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Point& w = op.boundary_points()[static_cast<std::size_t>(i)];
    const double s = std::atan2(w.y(), w.x());
    x[i] = w.x();
    y[i] = w.y();
    sin_s[i] = std::sin(s);
    cos_2s[i] = std::cos(2.0 * s);
  }
  return {{"x", x}, {"y", y}, {"sin s", sin_s}, {"cos 2s", cos_2s}};
}

CommutatorReport commutator_bound(const DtnOperator& op,
                                  const std::vector<std::pair<std::string, Eigen::VectorXd>>& family) {
  if (family.empty()) throw std::invalid_argument("commutator_bound: empty family");
  const Eigen::MatrixXd nodal = op.nodal_operator();
  CommutatorReport report;
  report.entries.resize(family.size());
  parallel_for(family.size(), [&](std::size_t k) {
    const auto& [name, g] = family[k];
    if (g.size() != op.size()) throw std::invalid_argument("commutator_bound: dimension mismatch");
    CommutatorEntry entry;
    entry.name = name;
    const Eigen::MatrixXd c = nodal * g.asDiagonal() - g.asDiagonal() * nodal;
    entry.lipschitz = boundary_lipschitz(op, g);
    entry.constant = entry.lipschitz == 0.0;
    entry.norm_linf = linf_operator_norm(c.cast<Complex>());
    entry.norm_l2 = entry.constant ? c.cwiseAbs().maxCoeff() : mass_operator_norm(op, c.cast<Complex>());
    if (!entry.constant) {
      entry.ratio_l2 = entry.norm_l2 / entry.lipschitz;
      entry.ratio_linf = entry.norm_linf / entry.lipschitz;
    }
    report.entries[k] = entry;
  });
  for (const auto& e : report.entries) {
    if (e.constant) {
      report.constant_defect = std::max(report.constant_defect, e.norm_linf);
    } else {
      report.c_l2 = std::max(report.c_l2, e.ratio_l2);
      report.c_linf = std::max(report.c_linf, e.ratio_linf);
    }
  }
  return report;
}

BoundReport schwartz_kernel_bound(const DtnOperator& op, double exclusion_factor) {
  const Eigen::MatrixXd k = schwartz_kernel(op);
  const double exclusion = exclusion_factor * op.mesh_size();
  BoundReport report;
  report.bound_id = "schwartz_kernel";
  report.lambda1_used = op.lambda1();
  RatioRow worst;
  std::vector<double> lx, ly;
  for (Eigen::Index i = 0; i < op.size(); ++i) {
    for (Eigen::Index j = i + 1; j < op.size(); ++j) {
      const double d = distance(op, i, j);
      if (d < exclusion) continue;
      ++report.pair_count;
      const double value = std::abs(k(i, j));
      const double ratio = value * d * d;
      if (ratio > worst.max_ratio) {
        worst.max_ratio = ratio;
        worst.i = static_cast<int>(i);
        worst.j = static_cast<int>(j);
        worst.kernel_abs = value;
        worst.bound = 1.0 / (d * d);
      }
      if (value > 0.0) {
        lx.push_back(std::log(d));
        ly.push_back(std::log(value));
      }
    }
  }
  if (report.pair_count == 0) throw std::invalid_argument("schwartz_kernel_bound: mesh too coarse for admissible pairs");
  report.rows.push_back(worst);
  report.fitted_c = report.max_ratio = worst.max_ratio;
  report.fitted_decay["distance_exponent"] = fit_slope(lx, ly);
  report.fitted_decay["exclusion_radius"] = exclusion;
  return report;
}

SectorSchedule sector_schedule(int dimension, double theta_target) {
  if (dimension < 2) throw std::invalid_argument("sector_schedule: dimension must be at least 2");
  if (!(theta_target > 0.0 && theta_target < kHalfPi))
    throw std::invalid_argument("sector_schedule: theta_target must lie in (0, pi/2)");
  const double d = dimension;
  SectorSchedule out;
  out.dimension = dimension;
  out.theta_target = theta_target;
  const double theta_1 = kHalfPi / d;
  out.thetas.push_back(theta_1);
  while (out.thetas.back() <= theta_target) {
    const double theta = out.thetas.back();
    const double next = theta + (kHalfPi - theta) / d;
    ScheduleStep step;
    step.n = static_cast<int>(out.thetas.size());
    step.theta = theta;
    step.theta_next = next;
    step.z2_bound = (kHalfPi - theta) / d;
    step.alpha = 0.99 * next;
    std::tie(step.z1_arg, step.z2_arg) = split_rotation(step.alpha, theta, dimension);
    out.steps.push_back(step);
    out.thetas.push_back(next);
  }
  out.predicted_steps =
      theta_1 > theta_target
          ? 0
          : static_cast<int>(std::ceil(std::log((kHalfPi - theta_1) / (kHalfPi - theta_target)) / std::log(d / (d - 1.0))));
  return out;
}

std::pair<double, double> split_rotation(double alpha, double theta_n, int dimension) {
  const double z2_bound = (kHalfPi - theta_n) / dimension;
  const double a = std::abs(alpha);
  if (!(a < theta_n + z2_bound)) throw std::invalid_argument("split_rotation: angle outside the next sector");
  if (a < theta_n) return {alpha, 0.0};
  const double excess = a - theta_n;
  const double a2 = excess + 0.5 * (z2_bound - excess);
  const double sign = alpha < 0.0 ? -1.0 : 1.0;
  return {sign * (a - a2), sign * a2};
}

std::vector<Complex> random_sector_points(double theta, std::size_t count, std::uint64_t seed, double r_lo,
                                          double r_hi, double fraction) {
  if (!(theta > 0.0 && theta < kHalfPi)) throw std::invalid_argument("random_sector_points: theta out of range");
  if (!(r_lo > 0.0 && r_hi >= r_lo)) throw std::invalid_argument("random_sector_points: bad modulus range");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> arg(-fraction * theta, fraction * theta);
  std::uniform_real_distribution<double> log_r(std::log(r_lo), std::log(r_hi));
  std::vector<Complex> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double a = arg(rng);
    out.push_back(std::polar(std::exp(log_r(rng)), a));
  }
  return out;
}

Complex kernel_entry(const DtnOperator& op, Complex z, Eigen::Index i, Eigen::Index j) {
  double re = 0.0, im = 0.0;
  const Eigen::MatrixXd& phi = op.eigenvectors();
  for (Eigen::Index n = 0; n < op.size(); ++n) {
    const Complex e = decay_factor(op.eigenvalues()[n], z);
    const double p = phi(i, n) * phi(j, n);
    re += e.real() * p;
    im += e.imag() * p;
  }
  return {re, im};
}

HolomorphyReport cauchy_riemann(const DtnOperator& op, const std::vector<Complex>& points, std::uint64_t seed,
                                double step_fraction, int pairs_per_point) {
  if (points.empty()) throw std::invalid_argument("cauchy_riemann: no points");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, op.size() - 1);
  std::vector<std::vector<std::pair<Eigen::Index, Eigen::Index>>> pairs(points.size());
  for (auto& list : pairs)
    for (int k = 0; k < pairs_per_point; ++k) list.emplace_back(pick(rng), pick(rng));

  const auto residual = [&](Complex z, double step, const std::vector<std::pair<Eigen::Index, Eigen::Index>>& list) {
    double worst = 0.0;
    const Complex i_unit(0.0, 1.0);
    for (const auto& [a, b] : list) {
      const Complex dx = (kernel_entry(op, z + step, a, b) - kernel_entry(op, z - step, a, b)) / (2.0 * step);
      const Complex dy =
          (kernel_entry(op, z + i_unit * step, a, b) - kernel_entry(op, z - i_unit * step, a, b)) / (2.0 * step);
      worst = std::max(worst, std::abs(dx + i_unit * dy));
    }
    return worst;
  };

  HolomorphyReport report;
  report.points.resize(points.size());
  parallel_for(points.size(), [&](std::size_t k) {
    const Complex z = points[k];
    if (!(z.real() > 0.0)) throw std::invalid_argument("cauchy_riemann: point outside the right half-plane");
    const double step = step_fraction * z.real();
    HolomorphyPoint p;
    p.z = z;
    p.residual_coarse = residual(z, step, pairs[k]);
    p.residual_fine = residual(z, 0.5 * step, pairs[k]);
    p.order = std::log2(p.residual_coarse / p.residual_fine);
    report.points[k] = p;
  });
  report.min_order = std::numeric_limits<double>::infinity();
  for (const auto& p : report.points) report.min_order = std::min(report.min_order, p.order);
  return report;
}

double semigroup_law_defect(const DtnOperator& op, Complex z1, Complex z2) {
  const ComplexMatrix s1 = semigroup_matrix(op, z1);
  const ComplexMatrix s2 = semigroup_matrix(op, z2);
  const ComplexMatrix s12 = semigroup_matrix(op, z1 + z2);
  return mass_operator_norm(op, s12 - s1 * s2);
}

ImaginaryPowerReport imaginary_power_report(const DtnOperator& op, double shift, const std::vector<double>& s_values) {
  if (s_values.empty()) throw std::invalid_argument("imaginary_power_report: no s values");
  ImaginaryPowerReport report;
  report.shift = shift;
  report.s_values = s_values;
  report.norms_l2.resize(s_values.size());
  report.norms_linf.resize(s_values.size());
  parallel_for(s_values.size(), [&](std::size_t k) {
    const ComplexMatrix power = imaginary_power(op, shift, s_values[k]);
    report.norms_l2[k] = mass_operator_norm(op, power);
    report.norms_linf[k] = linf_operator_norm(power);
  });
  std::vector<double> sx, ly;
  for (std::size_t k = 0; k < s_values.size(); ++k) {
    sx.push_back(std::abs(s_values[k]));
    ly.push_back(std::log(report.norms_linf[k]));
  }
  report.nu = s_values.size() >= 2 ? fit_slope(sx, ly) : 0.0;
  return report;
}

double relative_drift(double a, double b) { return std::abs(a - b) / std::abs(a); }

}  // namespace steklov
