#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "steklov/dtn.hpp"
#include "steklov/fem.hpp"
#include "steklov/semigroup.hpp"

namespace steklov {

/// Log-spaced samples from lo to hi (both included when hi is on the lattice)
/// with `per_decade` points per decade.
std::vector<double> log_grid(double lo, double hi, int per_decade);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

struct SweepOptions {
  double slack = 0.0;
  /// Sweeps reject grid points below this time (modulus for complex z).
  double time_floor = 1e-6;
  /// Boundary pairs are subsampled (deterministically, by seed) beyond this count.
  std::size_t max_pairs = 100000;
  std::uint64_t seed = 1;
  /// Exponent of (1 + |w1-w2|/|z|) in the bound denominator; the dimension d by default.
  double distance_exponent = 2.0;
  /// Window for the on-diagonal decay fit.
  double decay_window_lo = 1e-3;
  double decay_window_hi = 1e-1;
};

/// Worst ratio at one grid point.
struct RatioRow {
  Complex z;
  double max_ratio = 0.0;
  int i = 0;
  int j = 0;
  double kernel_abs = 0.0;
  double bound = 0.0;
};

struct RayFit {
  double arg = 0.0;
  double fitted_c = 0.0;
};

/// Outcome of a bound-verification sweep. The constant is fitted as the
/// largest observed ratio, so violation_fraction is zero by construction.
struct BoundReport {
  std::string bound_id;
  std::string fit_mode = "max_ratio";
  double fitted_c = 0.0;
  std::map<std::string, double> fitted_decay;
  double lambda1_used = 0.0;
  double violation_fraction = 0.0;
  double max_ratio = 0.0;
  double slack = 0.0;
  double time_floor = 0.0;
  double theta = 0.0;
  std::size_t pair_count = 0;
  std::vector<RatioRow> rows;
  std::vector<RayFit> rays;
  bool monotone_in_arg = false;
};

/// Boundary index pairs (i <= j) used by the sweeps: all of them when there are at
/// most max_pairs, otherwise a seeded sample that always contains the diagonal.
std::vector<std::pair<int, int>> sample_pairs(Eigen::Index m, std::size_t max_pairs, std::uint64_t seed);

/// sup_w K_t(w, w) for each t.
std::vector<double> on_diagonal_sup(const DtnOperator& op, const std::vector<double>& times);

/// Real-time Poisson bound |K_t| <= c min(t,1)^{-(d-1)} e^{-lambda1 t} / (1 + |w1-w2|/t)^d.
BoundReport poisson_real(const DtnOperator& op, const std::vector<double>& t_grid,
                         const SweepOptions& options = {});

/// Rays (arguments) times moduli; every point must lie in the open sector.
struct SectorGrid {
  std::vector<double> args;
  std::vector<double> moduli;
};

/// `rays` arguments spread symmetrically over [-fraction*theta, fraction*theta].
SectorGrid make_sector_grid(double theta, int rays, double fraction, const std::vector<double>& moduli);

/// The rays of `grid` with |arg| < theta_sub.
SectorGrid restrict_grid(const SectorGrid& grid, double theta_sub);

/// Complex-time Poisson bound on the sector |arg z| < theta:
/// |K_z| <= c min(1,Re z)^{-(d-1)} e^{-lambda1 Re z} / (1 + |w1-w2|/|z|)^d, fitted per ray.
BoundReport poisson_sector(const DtnOperator& op, double theta, const SectorGrid& grid,
                           const SweepOptions& options = {});

struct ContinuityCurve {
  std::string name;
  std::vector<double> times;
  std::vector<double> errors;  ///< ||S_t phi - phi||_inf
  double slope = 0.0;          ///< log-log slope; +inf when the error vanishes identically
  bool identically_zero = false;
};

struct ContinuityReport {
  std::vector<ContinuityCurve> curves;
  double min_slope = 0.0;
};

/// Named boundary test functions: restrictions of 1, x, y, x^2, xy.
std::vector<std::pair<std::string, Eigen::VectorXd>> polynomial_test_functions(const DtnOperator& op);

/// Sup-norm strong-continuity sweep ||S_t phi - phi||_inf over t_grid for each test function.
ContinuityReport strong_continuity(const DtnOperator& op,
                                   const std::vector<std::pair<std::string, Eigen::VectorXd>>& test_fns,
                                   const std::vector<double>& t_grid);

/// Bounded-perturbation rate for a general potential: ||S^V_t - S^0_t|| (M_Gamma
/// geometry) against t, with C = max ||.||/t and the log-log slope.
struct DuhamelRate {
  std::vector<double> times;
  std::vector<double> differences;
  double constant = 0.0;
  double slope = 0.0;
};
DuhamelRate duhamel_rate(const DtnOperator& op_v, const DtnOperator& op_0, const std::vector<double>& t_grid);

struct PerturbationReport {
  double residual = 0.0;  ///< ||N_V - (N_0 + Q)||_F / ||N_V||_F
  double q_norm = 0.0;
  double schur_norm = 0.0;
};

/// Discrete form of N_V = N + gamma_0^* M_V gamma_V with Q = E_0^T B E_V.
/// forms_0 and forms_v must share the mesh and conductivity.
PerturbationReport perturbation_identity(const DiscreteForms& forms_0, const DiscreteForms& forms_v);

struct CommutatorEntry {
  std::string name;
  double lipschitz = 0.0;
  double norm_l2 = 0.0;
  double norm_linf = 0.0;
  double ratio_l2 = 0.0;
  double ratio_linf = 0.0;
  bool constant = false;
};

struct CommutatorReport {
  std::vector<CommutatorEntry> entries;
  double c_l2 = 0.0;
  double c_linf = 0.0;
  /// Largest |[N, M_g]| entry seen for constant g (expected exactly 0).
  double constant_defect = 0.0;
};

/// Lip_Gamma(g): max over boundary pairs of |g_i - g_j| / |w_i - w_j|.
double boundary_lipschitz(const DtnOperator& op, const Eigen::VectorXd& g);

/// [M_Gamma^{-1} N, diag(g)] as a nodal operator.
Eigen::MatrixXd commutator(const DtnOperator& op, const Eigen::VectorXd& g);

/// Disk family x, y, sin s, cos 2s evaluated at the boundary vertices (s the polar angle).
std::vector<std::pair<std::string, Eigen::VectorXd>> commutator_family(const DtnOperator& op);

CommutatorReport commutator_bound(const DtnOperator& op,
                                  const std::vector<std::pair<std::string, Eigen::VectorXd>>& family);

/// Off-diagonal Schwartz kernel bound |K_N(w1,w2)| <= c / |w1-w2|^d over pairs
/// at distance >= exclusion_factor * h.
BoundReport schwartz_kernel_bound(const DtnOperator& op, double exclusion_factor = 4.0);

struct ScheduleStep {
  int n = 0;
  double theta = 0.0;       ///< theta_n
  double theta_next = 0.0;  ///< theta_{n+1}
  double z2_bound = 0.0;    ///< (1/d)(pi/2 - theta_n)
  /// Factorization of z0 = e^{i alpha}, alpha = 0.99 theta_{n+1}, as z1 z2.
  double alpha = 0.0;
  double z1_arg = 0.0;
  double z2_arg = 0.0;
};

struct SectorSchedule {
  int dimension = 2;
  double theta_target = 0.0;
  std::vector<double> thetas;  ///< theta_1 .. theta_N with theta_N the first > target
  std::vector<ScheduleStep> steps;
  int predicted_steps = 0;
};

/// theta_1 = pi/(2d), theta_{n+1} = theta_n + (pi/2 - theta_n)/d, up to the first theta_n > target.
SectorSchedule sector_schedule(int dimension, double theta_target);

/// Splits arg alpha (|alpha| < theta_{n+1}) into alpha1 + alpha2 with
/// |alpha1| < theta_n and |alpha2| < (1/d)(pi/2 - theta_n).
std::pair<double, double> split_rotation(double alpha, double theta_n, int dimension);

/// Cauchy-Riemann residual |dK/dx + i dK/dy| of z -> K_z(w1, w2) by central
/// differences at step `step_fraction * Re z` and half of it.
struct HolomorphyPoint {
  Complex z;
  double residual_coarse = 0.0;
  double residual_fine = 0.0;
  double order = 0.0;
};
struct HolomorphyReport {
  std::vector<HolomorphyPoint> points;
  double min_order = 0.0;
};

/// Seeded points strictly inside the sector: |arg z| <= fraction*theta, modulus log-uniform in [r_lo, r_hi].
std::vector<Complex> random_sector_points(double theta, std::size_t count, std::uint64_t seed,
                                          double r_lo, double r_hi, double fraction = 0.9);

/// Kernel entry K_z(w_i, w_j) evaluated directly from the eigen-expansion.
Complex kernel_entry(const DtnOperator& op, Complex z, Eigen::Index i, Eigen::Index j);

HolomorphyReport cauchy_riemann(const DtnOperator& op, const std::vector<Complex>& points,
                                std::uint64_t seed, double step_fraction = 0.01, int pairs_per_point = 3);

/// ||S_{z1+z2} - S_{z1} S_{z2}|| in the M_Gamma geometry.
double semigroup_law_defect(const DtnOperator& op, Complex z1, Complex z2);

struct ImaginaryPowerReport {
  double shift = 0.0;
  std::vector<double> s_values;
  std::vector<double> norms_l2;    ///< M_Gamma geometry (p = 2)
  std::vector<double> norms_linf;  ///< induced sup-norm
  double nu = 0.0;                 ///< slope of log ||.||_inf against |s|
};

ImaginaryPowerReport imaginary_power_report(const DtnOperator& op, double shift, const std::vector<double>& s_values);

/// Relative drift |a - b| / |a|.
double relative_drift(double a, double b);

}  // namespace steklov
