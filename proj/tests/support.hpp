#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <utility>

#include <Eigen/Core>

#include "steklov/dtn.hpp"
#include "steklov/fem.hpp"
#include "steklov/geometry.hpp"

namespace steklov::testing {

inline constexpr double kPi = std::numbers::pi;

/// Mesh, forms and DtN operator of one configuration, built once per process.
struct Discretization {
  Mesh mesh;
  DiscreteForms forms;
  DtnOperator op;
};

inline Discretization make_setup(const SmoothDomain& domain, double h, const CoefficientField& coeff, double boundary_h = 0.0) {
  Discretization s;
  s.mesh = triangulate(domain, h, boundary_h);
  s.forms = assemble(s.mesh, coeff);
  s.op = build_dtn(s.forms);
  return s;
}

/// Unit disk with c = I, V = 0, cached by mesh size.
inline const Discretization& disk_laplace(double h) {
  static std::map<double, std::unique_ptr<Discretization>> cache;
  auto& slot = cache[h];
  if (!slot) slot = std::make_unique<Discretization>(make_setup(make_disk(1.0), h, identity_coefficients()));
  return *slot;
}

/// Smooth three-lobed star with variable coefficients, cached by mesh size.
inline const Discretization& star_variable(double h) {
  static std::map<double, std::unique_ptr<Discretization>> cache;
  auto& slot = cache[h];
  if (!slot) slot = std::make_unique<Discretization>(make_setup(make_smooth_star(1.0, 0.2, 3), h, variable_coefficients()));
  return *slot;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

/// Restriction of f(x, y) to the boundary points of an operator.
template <typename F>
Eigen::VectorXd on_boundary(const DtnOperator& op, F&& f) {
  Eigen::VectorXd v(op.size());
  for (Eigen::Index i = 0; i < op.size(); ++i) {
    const Point& p = op.boundary_points()[static_cast<std::size_t>(i)];
    v[i] = f(p.x(), p.y());
  }
  return v;
}

/// M_Gamma-weighted L2 norm.
inline double mass_norm(const DtnOperator& op, const Eigen::VectorXd& v) {
  return std::sqrt(v.dot(op.boundary_mass() * v));
}

}  // namespace steklov::testing
