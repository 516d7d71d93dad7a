#include "steklov/semigroup.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

namespace steklov {

SectorPoint::SectorPoint(Complex z, double theta) : z_(z), theta_(theta) {
  if (!(theta > 0.0 && theta < 0.5 * std::numbers::pi))
    throw std::invalid_argument("SectorPoint: theta must lie in (0, pi/2)");
  if (!contains(z, theta)) throw std::invalid_argument("SectorPoint: z outside the open sector");
}

bool SectorPoint::contains(Complex z, double theta) {
  return z.real() > 0.0 && std::abs(std::arg(z)) < theta;
}

Complex decay_factor(double lambda, Complex z) {
  const double magnitude = std::exp(-lambda * z.real());
  const double phase = lambda * z.imag();
  return {magnitude * std::cos(phase), -magnitude * std::sin(phase)};
}

namespace {

ComplexVector decay_vector(const DtnOperator& op, Complex z) {
  ComplexVector out(op.size());
  for (Eigen::Index n = 0; n < op.size(); ++n) out[n] = decay_factor(op.eigenvalues()[n], z);
  return out;
}

}  // namespace

KernelMatrix kernel(const DtnOperator& op, Complex z) {
  if (!(z.real() > 0.0)) throw std::invalid_argument("kernel: requires Re z > 0");
  const ComplexVector e = decay_vector(op, z);
  const Eigen::MatrixXd& phi = op.eigenvectors();
  // Real and imaginary parts separately keep K_{conj z} = conj(K_z) exact.
  const Eigen::MatrixXd re = phi * e.real().asDiagonal() * phi.transpose();
  const Eigen::MatrixXd im = phi * e.imag().asDiagonal() * phi.transpose();
  KernelMatrix out;
  out.z = z;
  out.values.resize(op.size(), op.size());
  out.values.real() = re;
  out.values.imag() = im;
  out.weights = op.weights();
  return out;
}

Eigen::MatrixXd real_kernel(const DtnOperator& op, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("real_kernel: requires t > 0");
  Eigen::VectorXd e(op.size());
  for (Eigen::Index n = 0; n < op.size(); ++n) e[n] = std::exp(-op.eigenvalues()[n] * t);
  const Eigen::MatrixXd& phi = op.eigenvectors();
  return phi * e.asDiagonal() * phi.transpose();
}

ComplexVector apply_semigroup(const DtnOperator& op, Complex z, const ComplexVector& phi) {
  if (z.real() < 0.0) throw std::invalid_argument("apply_semigroup: requires Re z >= 0");
  if (phi.size() != op.size()) throw std::invalid_argument("apply_semigroup: dimension mismatch");
  const Eigen::MatrixXd& vecs = op.eigenvectors();
  const ComplexVector coeffs = vecs.transpose().cast<Complex>() * (op.boundary_mass().cast<Complex>() * phi);
  return vecs.cast<Complex>() * decay_vector(op, z).cwiseProduct(coeffs);
}

ComplexVector apply_semigroup(const DtnOperator& op, Complex z, const Eigen::VectorXd& phi) {
  return apply_semigroup(op, z, ComplexVector(phi.cast<Complex>()));
}

Eigen::VectorXd apply_semigroup(const DtnOperator& op, double t, const Eigen::VectorXd& phi) {
  if (t < 0.0) throw std::invalid_argument("apply_semigroup: requires t >= 0");
  if (phi.size() != op.size()) throw std::invalid_argument("apply_semigroup: dimension mismatch");
  const Eigen::VectorXd coeffs = op.eigenvectors().transpose() * (op.boundary_mass() * phi);
  Eigen::VectorXd scaled(op.size());
  for (Eigen::Index n = 0; n < op.size(); ++n) scaled[n] = std::exp(-op.eigenvalues()[n] * t) * coeffs[n];
  return op.eigenvectors() * scaled;
}

ComplexMatrix semigroup_matrix(const DtnOperator& op, Complex z) {
  if (z.real() < 0.0) throw std::invalid_argument("semigroup_matrix: requires Re z >= 0");
  const ComplexVector e = decay_vector(op, z);
  const Eigen::MatrixXd right = op.eigenvectors().transpose() * op.boundary_mass();
  ComplexMatrix out(op.size(), op.size());
  out.real() = op.eigenvectors() * e.real().asDiagonal() * right;
  out.imag() = op.eigenvectors() * e.imag().asDiagonal() * right;
  return out;
}

double mass_operator_norm(const DtnOperator& op, const ComplexMatrix& t) {
  // M = L L^T; the M-geometry norm of T is ||L^T T L^{-T}||_2.
  const Eigen::LLT<Eigen::MatrixXd> llt(op.boundary_mass());
  const Eigen::MatrixXd lt = llt.matrixU();
  const ComplexMatrix left = lt.cast<Complex>() * t;
  // right-multiply by L^{-T}: solve X L^T = left  <=>  L X^T = left^T
  const ComplexMatrix x =
      llt.matrixL().toDenseMatrix().cast<Complex>().triangularView<Eigen::Lower>().solve(left.transpose()).transpose();
  Eigen::BDCSVD<ComplexMatrix> svd(x);
  return svd.singularValues()[0];
}

double linf_operator_norm(const ComplexMatrix& t) { return t.cwiseAbs().rowwise().sum().maxCoeff(); }

ComplexMatrix imaginary_power(const DtnOperator& op, double shift, double s) {
  const Eigen::Index m = op.size();
  ComplexVector factors(m);
  for (Eigen::Index n = 0; n < m; ++n) {
    const double base = op.eigenvalues()[n] + shift;
    if (!(base > 0.0)) throw std::invalid_argument("imaginary_power: shifted eigenvalue is not positive");
    const double phase = s * std::log(base);
    factors[n] = Complex(std::cos(phase), std::sin(phase));
  }
  const Eigen::MatrixXd right = op.eigenvectors().transpose() * op.boundary_mass();
  ComplexMatrix out(m, m);
  out.real() = op.eigenvectors() * factors.real().asDiagonal() * right;
  out.imag() = op.eigenvectors() * factors.imag().asDiagonal() * right;
  return out;
}

RotatedGenerator::RotatedGenerator(const DtnOperator& op, Complex z0) : op_(&op), z0_(z0) {
  if (std::abs(std::abs(z0) - 1.0) > 1e-12) throw std::invalid_argument("rotated_generator: |z0| must be 1");
  if (!(z0.real() > 0.0)) throw std::invalid_argument("rotated_generator: Re z0 must be positive");
}

ComplexVector RotatedGenerator::eigenvalues() const { return z0_ * op_->eigenvalues().cast<Complex>(); }

KernelMatrix RotatedGenerator::kernel(double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("RotatedGenerator::kernel: requires t > 0");
  return steklov::kernel(*op_, t * z0_);
}

ComplexMatrix RotatedGenerator::schwartz_kernel() const {
  return z0_ * steklov::schwartz_kernel(*op_).cast<Complex>();
}

RotatedGenerator rotated_generator(const DtnOperator& op, Complex z0) { return {op, z0}; }

Eigen::MatrixXd schwartz_kernel(const DtnOperator& op) {
  const Eigen::VectorXd w = op.weights();
  const Eigen::VectorXd inv = w.cwiseInverse();
  return inv.asDiagonal() * op.schur() * inv.asDiagonal();
}

}  // namespace steklov
