#pragma once

#include <complex>

#include <Eigen/Core>

#include "steklov/dtn.hpp"

namespace steklov {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// A complex time certified to lie strictly inside the sector |arg z| < theta,
/// theta in (0, pi/2).
class SectorPoint {
 public:
  SectorPoint(Complex z, double theta);
  Complex z() const { return z_; }
  double theta() const { return theta_; }

  static bool contains(Complex z, double theta);

 private:
  Complex z_;
  double theta_;
};

/// Sampled kernel K_z(w_i, w_j) = sum_n e^{-lambda_n z} phi_n(w_i) phi_n(w_j).
struct KernelMatrix {
  Complex z;
  ComplexMatrix values;
  /// Arclength weights acting as the discrete boundary measure.
  Eigen::VectorXd weights;
};

/// e^{-lambda z} evaluated as e^{-lambda Re z} (cos, -sin)(lambda Im z).
Complex decay_factor(double lambda, Complex z);

/// Kernel of S_z over all boundary modes. Requires Re z > 0.
KernelMatrix kernel(const DtnOperator& op, Complex z);

/// Real-valued kernel for real t > 0.
Eigen::MatrixXd real_kernel(const DtnOperator& op, double t);

/// sum_n e^{-lambda_n z} (phi_n^T M_Gamma phi) phi_n. Allows Re z = 0 (unitary group).
ComplexVector apply_semigroup(const DtnOperator& op, Complex z, const ComplexVector& phi);
ComplexVector apply_semigroup(const DtnOperator& op, Complex z, const Eigen::VectorXd& phi);
Eigen::VectorXd apply_semigroup(const DtnOperator& op, double t, const Eigen::VectorXd& phi);

/// S_z as a dense matrix acting on nodal values. Requires Re z >= 0.
ComplexMatrix semigroup_matrix(const DtnOperator& op, Complex z);

/// Operator 2-norm in the M_Gamma geometry: ||M^{1/2} T M^{-1/2}||_2.
double mass_operator_norm(const DtnOperator& op, const ComplexMatrix& t);

/// Induced L_inf -> L_inf norm of a nodal operator (max absolute row sum).
double linf_operator_norm(const ComplexMatrix& t);

/// (N + shift)^{is} in the M_Gamma geometry, as a dense nodal operator.
/// Requires lambda_1 + shift > 0.
ComplexMatrix imaginary_power(const DtnOperator& op, double shift, double s);

/// Lambda_0 = z0 * N for unimodular z0 with Re z0 > 0.
class RotatedGenerator {
 public:
  RotatedGenerator(const DtnOperator& op, Complex z0);

  Complex rotation() const { return z0_; }
  /// z0 * lambda_n.
  ComplexVector eigenvalues() const;
  /// Kernel of e^{-t Lambda_0}, i.e. kernel(op, t z0).
  KernelMatrix kernel(double t) const;
  /// Off-diagonal Schwartz kernel z0 * N(i,j) / (w_i w_j).
  ComplexMatrix schwartz_kernel() const;

 private:
  const DtnOperator* op_;
  Complex z0_;
};

RotatedGenerator rotated_generator(const DtnOperator& op, Complex z0);

/// Discrete Schwartz kernel of N on the boundary: N(i,j) / (w_i w_j).
Eigen::MatrixXd schwartz_kernel(const DtnOperator& op);

}  // namespace steklov
