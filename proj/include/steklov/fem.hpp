#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "steklov/geometry.hpp"

namespace steklov {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Raised when the coefficient matrix fails the ellipticity bound at a sample point.
class EllipticityError : public std::runtime_error {
 public:
  EllipticityError(const std::string& what, Point location)
      : std::runtime_error(what), location_(std::move(location)) {}
  const Point& location() const { return location_; }

 private:
  Point location_;
};

/// Symmetric coefficient field c_kl, potential V and ellipticity constant mu of
/// the operator -sum d_l(c_kl d_k) + V.
struct CoefficientField {
  std::string name = "identity";
  std::function<Eigen::Matrix2d(const Point&)> conductivity;
  /// Empty means V = 0.
  std::function<double(const Point&)> potential;
  double mu = 1.0;

  bool has_potential() const { return static_cast<bool>(potential); }
};

CoefficientField identity_coefficients();

/// Smooth, genuinely anisotropic symmetric field with mu = 0.5.
CoefficientField variable_coefficients();

/// Returns a copy of `base` with a potential attached.
CoefficientField with_potential(CoefficientField base, std::string label,
                                std::function<double(const Point&)> potential);
CoefficientField with_constant_potential(CoefficientField base, double value);

/// Smooth sign-changing potential: a seeded random combination of low Fourier modes,
/// scaled so that max |V| <= amplitude.
CoefficientField with_random_potential(CoefficientField base, unsigned seed, double amplitude);

/// Assembled P1 forms on a mesh. Vertices are split into interior and boundary
/// sets; the boundary set follows the mesh boundary ring order.
struct DiscreteForms {
  SparseMatrix stiffness;       ///< A0: sum int c_kl d_k u d_l v
  SparseMatrix potential;       ///< B: int V u v
  SparseMatrix mass;            ///< M: int u v
  SparseMatrix boundary_mass;   ///< M_Gamma on the boundary ring, arclength measure
  std::vector<int> interior;    ///< vertex ids of interior vertices
  std::vector<int> boundary;    ///< vertex ids of the boundary ring
  std::vector<Point> boundary_points;
  std::vector<double> boundary_weights;
  double mesh_size = 0.0;
  double max_abs_potential = 0.0;
  bool has_potential = false;

  Eigen::Index vertex_count() const { return stiffness.rows(); }
  Eigen::Index boundary_size() const { return static_cast<Eigen::Index>(boundary.size()); }
  Eigen::Index interior_size() const { return static_cast<Eigen::Index>(interior.size()); }

  /// A0 + B.
  SparseMatrix operator_matrix() const;
};

/// Assembles stiffness, potential and mass with 3-point Gauss quadrature.
/// Throws EllipticityError when c fails symmetry or the mu bound at a quadrature point.
DiscreteForms assemble(const Mesh& mesh, const CoefficientField& coeff);

/// Rows/cols of a sparse matrix restricted to index lists.
SparseMatrix extract_block(const SparseMatrix& a, const std::vector<int>& rows,
                           const std::vector<int>& cols);

struct WellposednessReport {
  double sigma_min = 0.0;   ///< smallest-magnitude eigenvalue of (A0+B)_II u = eta M_II u
  double sigma_max = 0.0;   ///< largest-magnitude eigenvalue estimate
  double tolerance = 0.0;   ///< 1e-8 * |sigma_max|
  bool well_posed = false;  ///< |sigma_min| >= tolerance
  bool near_singular = false;  ///< |sigma_min| < 1e-6 * |sigma_max|
};

/// Checks the standing invertibility assumption on the Dirichlet-restricted operator.
WellposednessReport check_wellposedness(const DiscreteForms& forms);

/// Factorization of the interior block (A0+B)_II, reused for every lift.
class DirichletSolver {
 public:
  explicit DirichletSolver(const DiscreteForms& forms);
  ~DirichletSolver();
  DirichletSolver(DirichletSolver&&) noexcept;
  DirichletSolver& operator=(DirichletSolver&&) noexcept;

  /// Solves interior rows of (A0+B)u = 0 with u = phi on the boundary.
  Eigen::VectorXd lift(const Eigen::VectorXd& boundary_values) const;

  /// Full lifting matrix E (vertices x boundary dof): column j lifts the j-th unit vector.
  Eigen::MatrixXd lifting_matrix() const;

  /// Interior part -K_II^{-1} K_IG of the lifting, one column per boundary dof.
  Eigen::MatrixXd interior_lifting() const;

  const DiscreteForms& forms() const { return *forms_; }

 private:
  struct Impl;
  const DiscreteForms* forms_;
  std::unique_ptr<Impl> impl_;
};

/// gamma_V phi: the discrete harmonic lifting of boundary data.
Eigen::VectorXd lift(const DiscreteForms& forms, const Eigen::VectorXd& boundary_values);

/// Weak conormal derivative psi of a full vector u: M_Gamma psi = ((A0+B)u)|_Gamma.
Eigen::VectorXd conormal(const DiscreteForms& forms, const Eigen::VectorXd& u);

/// Gathers boundary entries of a full vertex vector.
Eigen::VectorXd restrict_to_boundary(const DiscreteForms& forms, const Eigen::VectorXd& u);

}  // namespace steklov
