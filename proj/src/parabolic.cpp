#include "steklov/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "steklov/parallel.hpp"

namespace steklov {

namespace {

// Weights of the exact step a(t+dt) = e^{-x} a(t) + dt (psi f_k + (phi1 - psi) f_{k+1}),
// x = lambda dt, for forcing linear on the step:
//   phi1(x) = (1 - e^{-x}) / x,  psi(x) = (1 - e^{-x}(1 + x)) / x^2.
struct StepWeights {
  double decay;
  double left;
  double right;
};

StepWeights step_weights(double lambda, double dt) {
  const double x = lambda * dt;
  double phi1, psi;
  if (std::abs(x) < 0.1) {
    // Taylor series: phi1 = sum (-x)^k/(k+1)!, psi = sum (-x)^k/(k! (k+2))
    phi1 = 0.0;
    psi = 0.0;
    double term = 1.0;  // (-x)^k / k!
    for (int k = 0; k < 14; ++k) {
      phi1 += term / (k + 1);
      psi += term / (k + 2);
      term *= -x / (k + 1);
    }
  } else {
    const double em1 = -std::expm1(-x);  // 1 - e^{-x}
    phi1 = em1 / x;
    psi = (em1 - x * std::exp(-x)) / (x * x);
  }
  return {std::exp(-x), dt * psi, dt * (phi1 - psi)};
}

}  // namespace

void EvolutionProblem::validate() const {
  if (op == nullptr) throw std::invalid_argument("EvolutionProblem: missing operator");
  if (!(tau > 0.0)) throw std::invalid_argument("EvolutionProblem: tau must be positive");
  if (!(r > 1.0 && std::isfinite(r)) || !(p > 1.0 && std::isfinite(p)))
    throw std::invalid_argument("EvolutionProblem: r and p must lie in (1, inf)");
  if (forcing.cols() < 2) throw std::invalid_argument("EvolutionProblem: forcing needs at least one time step");
  if (forcing.rows() != op->size() || initial.size() != op->size())
    throw std::invalid_argument("EvolutionProblem: dimension mismatch");
}

std::vector<double> time_grid(double tau, int steps) {
  if (steps < 1) throw std::invalid_argument("time_grid: need at least one step");
  std::vector<double> t(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) t[static_cast<std::size_t>(k)] = tau * k / steps;
  return t;
}

Eigen::MatrixXd sample_forcing(const std::function<Eigen::VectorXd(double)>& f, Eigen::Index size, double tau,
                               int steps) {
  const std::vector<double> t = time_grid(tau, steps);
  Eigen::MatrixXd out(size, static_cast<Eigen::Index>(t.size()));
  for (std::size_t k = 0; k < t.size(); ++k) {
    const Eigen::VectorXd v = f(t[k]);
    if (v.size() != size) throw std::invalid_argument("sample_forcing: dimension mismatch");
    out.col(static_cast<Eigen::Index>(k)) = v;
  }
  return out;
}

double lp_norm(const Eigen::VectorXd& v, const Eigen::Ref<const Eigen::VectorXd>& weights, double p) {
  if (v.size() != weights.size()) throw std::invalid_argument("lp_norm: dimension mismatch");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) sum += weights[i] * std::pow(std::abs(v[i]), p);
  return std::pow(sum, 1.0 / p);
}

double lr_lp_norm(const Eigen::MatrixXd& columns, const Eigen::Ref<const Eigen::VectorXd>& weights,
                  const std::vector<double>& times, double r, double p) {
  if (static_cast<std::size_t>(columns.cols()) != times.size() || times.size() < 2)
    throw std::invalid_argument("lr_lp_norm: time grid does not match the samples");
  double integral = 0.0;
  double previous = std::pow(lp_norm(columns.col(0), weights, p), r);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double current = std::pow(lp_norm(columns.col(static_cast<Eigen::Index>(k)), weights, p), r);
    integral += 0.5 * (times[k] - times[k - 1]) * (previous + current);
    previous = current;
  }
  return std::pow(integral, 1.0 / r);
}

Trajectory solve(const EvolutionProblem& problem) {
  problem.validate();
  const DtnOperator& op = *problem.op;
  const Eigen::Index m = op.size();
  const int steps = problem.steps();
  const double dt = problem.tau / steps;
  const Eigen::MatrixXd& phi = op.eigenvectors();
  const Eigen::MatrixXd to_modes = phi.transpose() * op.boundary_mass();

  const Eigen::MatrixXd f_modes = to_modes * problem.forcing;
  const Eigen::VectorXd a0 = to_modes * problem.initial;
  Eigen::MatrixXd modes(m, steps + 1);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t idx) {
    const auto n = static_cast<Eigen::Index>(idx);
    const StepWeights w = step_weights(op.eigenvalues()[n], dt);
    double a = a0[n];
    modes(n, 0) = a;
    for (int k = 0; k < steps; ++k) {
      a = w.decay * a + w.left * f_modes(n, k) + w.right * f_modes(n, k + 1);
      modes(n, k + 1) = a;
    }
  });

  Trajectory out;
  out.times = time_grid(problem.tau, steps);
  const Eigen::MatrixXd lambda_modes = op.eigenvalues().asDiagonal() * modes;
  out.values = phi * modes;
  out.dtn_values = phi * lambda_modes;
  out.derivative = phi * (f_modes - lambda_modes);

  const auto w = op.weights();
  NormSummary& norms = out.norms;
  norms.derivative = lr_lp_norm(out.derivative, w, out.times, problem.r, problem.p);
  norms.dtn = lr_lp_norm(out.dtn_values, w, out.times, problem.r, problem.p);
  norms.forcing = lr_lp_norm(problem.forcing, w, out.times, problem.r, problem.p);
  norms.initial_surrogate = lp_norm(problem.initial, w, problem.p) + lp_norm(out.dtn_values.col(0), w, problem.p);
  const Eigen::MatrixXd defect = out.derivative + out.dtn_values - problem.forcing;
  norms.residual = lr_lp_norm(defect, w, out.times, problem.r, problem.p);
  const double scale = norms.derivative + norms.dtn + norms.forcing;
  norms.relative_residual = scale > 0.0 ? norms.residual / scale : 0.0;
  return out;
}

Eigen::MatrixXd random_forcing(const DtnOperator& op, std::uint64_t seed, double tau, int steps, int spatial_modes,
                               int temporal_modes) {
  if (spatial_modes < 0 || temporal_modes < 0) throw std::invalid_argument("random_forcing: negative band");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  struct Term {
    int k, q;
    double a, b, beta;
  };
  std::vector<Term> terms;
  for (int k = 0; k <= spatial_modes; ++k)
    for (int q = 0; q <= temporal_modes; ++q) {
      const double a = gauss(rng), b = gauss(rng), beta = phase(rng);
      terms.push_back({k, q, a, b, beta});
    }
  const std::vector<double> t = time_grid(tau, steps);
  const Eigen::Index m = op.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(t.size()));
  for (Eigen::Index i = 0; i < m; ++i) {
    const Point& w = op.boundary_points()[static_cast<std::size_t>(i)];
    const double s = std::atan2(w.y(), w.x());
    for (const Term& term : terms) {
      const double spatial = term.a * std::cos(term.k * s) + term.b * std::sin(term.k * s);
      for (std::size_t j = 0; j < t.size(); ++j)
        out(i, static_cast<Eigen::Index>(j)) +=
            spatial * std::cos(2.0 * std::numbers::pi * term.q * t[j] / tau + term.beta);
    }
  }
  return out;
}

namespace {

void check_family(const std::vector<EvolutionProblem>& problems, const char* who) {
  if (problems.empty()) throw std::invalid_argument(std::string(who) + ": empty family");
  for (const auto& p : problems) {
    p.validate();
    if (p.r != problems.front().r || p.p != problems.front().p || p.tau != problems.front().tau)
      throw std::invalid_argument(std::string(who) + ": problems must share r, p and tau");
  }
}

}  // namespace

MaxRegularityReport max_regularity_report(const std::vector<EvolutionProblem>& problems) {
  check_family(problems, "max_regularity_report");
  MaxRegularityReport report;
  report.r = problems.front().r;
  report.p = problems.front().p;
  report.tau = problems.front().tau;
  for (const auto& problem : problems) {
    if (problem.initial.cwiseAbs().maxCoeff() != 0.0)
      throw std::invalid_argument("max_regularity_report: initial data must vanish");
    const Trajectory traj = solve(problem);
    if (!(traj.norms.forcing > 0.0)) throw std::invalid_argument("max_regularity_report: zero forcing");
    const double ratio = (traj.norms.derivative + traj.norms.dtn) / traj.norms.forcing;
    report.ratios.push_back(ratio);
    report.c_emp = std::max(report.c_emp, ratio);
    report.max_relative_residual = std::max(report.max_relative_residual, traj.norms.relative_residual);
  }
  return report;
}

MaxRegularityReport initial_data_report(const std::vector<EvolutionProblem>& problems) {
  check_family(problems, "initial_data_report");
  MaxRegularityReport report;
  report.r = problems.front().r;
  report.p = problems.front().p;
  report.tau = problems.front().tau;
  for (const auto& problem : problems) {
    if (problem.forcing.cwiseAbs().maxCoeff() != 0.0)
      throw std::invalid_argument("initial_data_report: forcing must vanish");
    const Trajectory traj = solve(problem);
    if (!(traj.norms.initial_surrogate > 0.0)) throw std::invalid_argument("initial_data_report: zero initial data");
    const double ratio = (traj.norms.derivative + traj.norms.dtn) / traj.norms.initial_surrogate;
    report.ratios.push_back(ratio);
    report.c_emp = std::max(report.c_emp, ratio);
    report.max_relative_residual = std::max(report.max_relative_residual, traj.norms.relative_residual);
  }
  return report;
}

}  // namespace steklov
