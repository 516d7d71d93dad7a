#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "steklov/fem.hpp"

namespace steklov {

/// Discrete Dirichlet-to-Neumann operator: the boundary Schur complement
/// N = K_GG - K_GI K_II^{-1} K_IG of K = A0 + B, together with the full
/// spectral decomposition of the pencil (N, M_Gamma).
///
/// N is the weak operator (a bilinear form on boundary vectors); the operator
/// acting on nodal values is M_Gamma^{-1} N. Eigenvectors are M_Gamma-orthonormal,
/// sorted by ascending eigenvalue, and sign-normalized so that their first
/// non-negligible entry is positive.
class DtnOperator {
 public:
  DtnOperator() = default;

  /// Builds from an already formed Schur complement. Used by build_dtn and by
  /// tests that feed synthetic matrices.
  static DtnOperator from_matrices(Eigen::MatrixXd schur, Eigen::MatrixXd boundary_mass,
                                   std::vector<Point> boundary_points,
                                   std::vector<double> boundary_weights, double mesh_size);

  const Eigen::MatrixXd& schur() const { return schur_; }
  const Eigen::MatrixXd& boundary_mass() const { return boundary_mass_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }
  double lambda1() const { return eigenvalues_[0]; }
  Eigen::Index size() const { return schur_.rows(); }
  const std::vector<Point>& boundary_points() const { return boundary_points_; }
  const std::vector<double>& boundary_weights() const { return boundary_weights_; }
  Eigen::Map<const Eigen::VectorXd> weights() const {
    return {boundary_weights_.data(), static_cast<Eigen::Index>(boundary_weights_.size())};
  }
  double mesh_size() const { return mesh_size_; }

  /// M_Gamma^{-1} N as a dense matrix on nodal values.
  Eigen::MatrixXd nodal_operator() const;

 private:
  Eigen::MatrixXd schur_;
  Eigen::MatrixXd boundary_mass_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  std::vector<Point> boundary_points_;
  std::vector<double> boundary_weights_;
  double mesh_size_ = 0.0;
};

/// K_GG - K_GI K_II^{-1} K_IG for K = A0 + B, as formed (not symmetrized).
Eigen::MatrixXd schur_complement(const DiscreteForms& forms, const DirichletSolver& solver);

/// Schur complement of A0 + B onto the boundary ring plus its spectrum.
DtnOperator build_dtn(const DiscreteForms& forms);
DtnOperator build_dtn(const DiscreteForms& forms, const DirichletSolver& solver);

/// First `count` eigenpairs, ascending.
std::vector<std::pair<double, Eigen::VectorXd>> spectrum(const DtnOperator& op, Eigen::Index count);

/// M_Gamma^{-1} N phi, evaluated through the eigen-expansion.
Eigen::VectorXd apply_dtn(const DtnOperator& op, const Eigen::VectorXd& phi);

/// Constant C_mesh in lambda1 >= -max|V| * C_mesh: the largest eigenvalue of
/// (E^T M E, M_Gamma), E the full lifting matrix. Bounds how far the potential
/// can pull the spectrum down on this mesh.
double lifting_mass_constant(const DiscreteForms& forms, const DirichletSolver& solver);

}  // namespace steklov
