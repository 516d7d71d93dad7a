#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "steklov/dtn.hpp"

namespace steklov {

/// d/dt phi + N phi = f on (0, tau], phi(0) = phi0, posed on the boundary dof of
/// `op`. The forcing is sampled on the uniform time grid t_k = k tau / steps
/// (column k of `forcing`) and taken piecewise linear in between.
///
/// `op` is not owned and must outlive the problem.
struct EvolutionProblem {
  const DtnOperator* op = nullptr;
  Eigen::MatrixXd forcing;
  Eigen::VectorXd initial;
  double tau = 1.0;
  double r = 2.0;
  double p = 2.0;

  int steps() const { return static_cast<int>(forcing.cols()) - 1; }
  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

std::vector<double> time_grid(double tau, int steps);

/// Samples f(t) (a boundary vector) at every grid time.
Eigen::MatrixXd sample_forcing(const std::function<Eigen::VectorXd(double)>& f, Eigen::Index size, double tau,
                               int steps);

struct NormSummary {
  double derivative = 0.0;  ///< ||phi'||_{L_r(L_p)}
  double dtn = 0.0;         ///< ||N phi||_{L_r(L_p)}
  double forcing = 0.0;     ///< ||f||_{L_r(L_p)}
  double initial_surrogate = 0.0;  ///< ||phi0||_p + ||N phi0||_p
  double residual = 0.0;    ///< ||phi' + N phi - f||_{L_r(L_p)}
  /// residual / (||phi'|| + ||N phi|| + ||f||), zero when all data vanish.
  double relative_residual = 0.0;
};

/// Sampled solution. `derivative` is the time derivative of the computed
/// solution at the grid times, which is exact for piecewise-linear forcing.
struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd values;      ///< phi(t_k), one column per time
  Eigen::MatrixXd dtn_values;  ///< N phi(t_k)
  Eigen::MatrixXd derivative;  ///< phi'(t_k)
  NormSummary norms;
};

/// Spectral Duhamel solution: each eigenmode is integrated in closed form
/// against the piecewise-linear forcing.
Trajectory solve(const EvolutionProblem& problem);

/// (sum_i w_i |v_i|^p)^{1/p} with the arclength weights of the operator.
double lp_norm(const Eigen::VectorXd& v, const Eigen::Ref<const Eigen::VectorXd>& weights, double p);

/// L_r in time (composite trapezoid on `times`) of the L_p norms of the columns.
double lr_lp_norm(const Eigen::MatrixXd& columns, const Eigen::Ref<const Eigen::VectorXd>& weights,
                  const std::vector<double>& times, double r, double p);

/// Band-limited random forcing: sum over spatial frequencies k <= spatial_modes
/// and temporal frequencies q <= temporal_modes of seeded Gaussian amplitudes
/// times (cos ks, sin ks)(w) cos(2 pi q t / tau + beta), with s the polar angle
/// of the boundary point. Depends only on geometry and seed, so it is comparable
/// across meshes and time steps.
Eigen::MatrixXd random_forcing(const DtnOperator& op, std::uint64_t seed, double tau, int steps,
                               int spatial_modes = 4, int temporal_modes = 4);

struct MaxRegularityReport {
  double r = 2.0;
  double p = 2.0;
  double tau = 1.0;
  std::vector<double> ratios;  ///< (||phi'|| + ||N phi||) / ||f|| per problem
  double c_emp = 0.0;
  double max_relative_residual = 0.0;
};

/// Empirical maximal-regularity constant over a family of pure-forcing
/// problems (phi0 = 0) sharing r, p and tau.
MaxRegularityReport max_regularity_report(const std::vector<EvolutionProblem>& problems);

/// Same ratio for pure initial-data problems (f = 0) against the surrogate
/// ||phi0||_p + ||N phi0||_p.
MaxRegularityReport initial_data_report(const std::vector<EvolutionProblem>& problems);

}  // namespace steklov
