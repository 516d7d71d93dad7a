#include "steklov/dtn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace steklov {

namespace {

// First entry whose magnitude exceeds 1e-8 of the vector's max norm is made positive.
void normalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double cutoff = 1e-8 * v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > cutoff) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

bool lexicographic_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double tol = 1e-12 * std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - tol) return true;
    if (a[i] > b[i] + tol) return false;
  }
  return false;
}

}  // namespace

DtnOperator DtnOperator::from_matrices(Eigen::MatrixXd schur, Eigen::MatrixXd boundary_mass,
                                       std::vector<Point> boundary_points,
                                       std::vector<double> boundary_weights, double mesh_size) {
  const Eigen::Index m = schur.rows();
  if (schur.cols() != m || boundary_mass.rows() != m || boundary_mass.cols() != m)
    throw std::invalid_argument("DtnOperator: matrix dimensions do not match");
  if (static_cast<Eigen::Index>(boundary_points.size()) != m ||
      static_cast<Eigen::Index>(boundary_weights.size()) != m)
    throw std::invalid_argument("DtnOperator: boundary data does not match matrix size");

  DtnOperator op;
  // The Schur complement is symmetric in exact arithmetic; drop the roundoff skew.
  op.schur_ = 0.5 * (schur + schur.transpose());
  op.boundary_mass_ = 0.5 * (boundary_mass + boundary_mass.transpose());
  op.boundary_points_ = std::move(boundary_points);
  op.boundary_weights_ = std::move(boundary_weights);
  op.mesh_size_ = mesh_size;

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.schur_, op.boundary_mass_);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("DtnOperator: generalized eigensolver failed");

  Eigen::MatrixXd vectors = solver.eigenvectors();
  const Eigen::VectorXd values = solver.eigenvalues();
  for (Eigen::Index j = 0; j < m; ++j) {
    // re-normalize in the M_Gamma inner product; the solver's scaling is already close
    const double norm = std::sqrt(vectors.col(j).dot(op.boundary_mass_ * vectors.col(j)));
    vectors.col(j) /= norm;
    normalize_sign(vectors.col(j));
  }

  std::vector<Eigen::Index> order(m);
  std::iota(order.begin(), order.end(), 0);
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (std::abs(values[a] - values[b]) > 1e-10 * scale) return values[a] < values[b];
    return lexicographic_less(vectors.col(a), vectors.col(b));
  });
  op.eigenvalues_.resize(m);
  op.eigenvectors_.resize(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    op.eigenvalues_[j] = values[order[j]];
    op.eigenvectors_.col(j) = vectors.col(order[j]);
  }
  return op;
}

Eigen::MatrixXd DtnOperator::nodal_operator() const {
  return boundary_mass_.llt().solve(schur_);
}

Eigen::MatrixXd schur_complement(const DiscreteForms& forms, const DirichletSolver& solver) {
  const SparseMatrix k = forms.operator_matrix();
  Eigen::MatrixXd schur(extract_block(k, forms.boundary, forms.boundary));
  const SparseMatrix k_gi = extract_block(k, forms.boundary, forms.interior);
  if (forms.interior_size() > 0) schur.noalias() += k_gi * solver.interior_lifting();
  return schur;
}

DtnOperator build_dtn(const DiscreteForms& forms, const DirichletSolver& solver) {
  return DtnOperator::from_matrices(schur_complement(forms, solver), Eigen::MatrixXd(forms.boundary_mass),
                                    forms.boundary_points, forms.boundary_weights, forms.mesh_size);
}

DtnOperator build_dtn(const DiscreteForms& forms) {
  const DirichletSolver solver(forms);
  return build_dtn(forms, solver);
}

std::vector<std::pair<double, Eigen::VectorXd>> spectrum(const DtnOperator& op, Eigen::Index count) {
  if (count < 0 || count > op.size()) throw std::out_of_range("spectrum: requested count out of range");
  std::vector<std::pair<double, Eigen::VectorXd>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index j = 0; j < count; ++j) out.emplace_back(op.eigenvalues()[j], op.eigenvectors().col(j));
  return out;
}

Eigen::VectorXd apply_dtn(const DtnOperator& op, const Eigen::VectorXd& phi) {
  if (phi.size() != op.size()) throw std::invalid_argument("apply_dtn: dimension mismatch");
  const Eigen::VectorXd coeffs = op.eigenvectors().transpose() * (op.boundary_mass() * phi);
  return op.eigenvectors() * op.eigenvalues().cwiseProduct(coeffs);
}

double lifting_mass_constant(const DiscreteForms& forms, const DirichletSolver& solver) {
  const Eigen::MatrixXd e = solver.lifting_matrix();
  Eigen::MatrixXd energy = e.transpose() * (forms.mass * e);
  energy = 0.5 * (energy + energy.transpose()).eval();
  const Eigen::MatrixXd mg(forms.boundary_mass);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(energy, mg, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw std::runtime_error("lifting_mass_constant: eigensolver failed");
  return eig.eigenvalues().maxCoeff();
}

}  // namespace steklov
