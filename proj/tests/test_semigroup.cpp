#include <gtest/gtest.h>

#include <cmath>

#include "steklov/semigroup.hpp"
#include "support.hpp"

namespace steklov {
namespace {

using testing::disk_laplace;
using testing::kPi;
using testing::mass_norm;
using testing::on_boundary;
using testing::random_vector;
using testing::star_variable;

TEST(DecayFactor, MatchesComplexExponential) {
  for (double lambda : {0.0, 0.5, 3.0, -2.0})
    for (Complex z : {Complex(0.3, 0.0), Complex(0.2, 0.7), Complex(1.0, -2.0)})
      EXPECT_LE(std::abs(decay_factor(lambda, z) - std::exp(-lambda * z)), 1e-15 * std::abs(std::exp(-lambda * z)));
}

TEST(SectorPoint, Validation) {
  EXPECT_NO_THROW(SectorPoint(Complex(1.0, 0.5), kPi / 4));
  EXPECT_THROW(SectorPoint(Complex(1.0, 2.0), kPi / 4), std::invalid_argument);
  EXPECT_THROW(SectorPoint(Complex(1.0, 0.0), kPi / 2), std::invalid_argument);
  EXPECT_THROW(SectorPoint(Complex(-1.0, 0.0), kPi / 4), std::invalid_argument);
  EXPECT_TRUE(SectorPoint::contains(Complex(1.0, 0.0), 0.1));
  EXPECT_FALSE(SectorPoint::contains(Complex(0.0, 1.0), kPi / 2));
}

TEST(Kernel, RequiresPositiveRealPart) {
  const DtnOperator& op = disk_laplace(0.1).op;
  EXPECT_THROW(kernel(op, Complex(0.0, 1.0)), std::invalid_argument);
  EXPECT_THROW(real_kernel(op, 0.0), std::invalid_argument);
  EXPECT_THROW(apply_semigroup(op, Complex(-0.1, 0.0), Eigen::VectorXd(Eigen::VectorXd::Ones(op.size()))), std::invalid_argument);
}

TEST(Kernel, ApproximateIdentityAsZTendsToZero) {
  const DtnOperator& op = disk_laplace(0.05).op;
  const Eigen::VectorXd phi = on_boundary(op, [](double x, double y) { return std::cos(std::atan2(y, x)) + x * y; });
  double previous = 1e9;
  for (double t : {1e-1, 1e-2, 1e-3}) {
    const KernelMatrix k = kernel(op, Complex(t, 0.3 * t));
    const Eigen::VectorXcd out = k.values * (k.weights.asDiagonal() * phi).cast<Complex>();
    const double err = (out - phi.cast<Complex>()).cwiseAbs().maxCoeff();
    EXPECT_LT(err, previous) << "t=" << t;
    previous = err;
  }
  EXPECT_LT(previous, 1e-2);
}

TEST(Kernel, RowIntegralsAreOne) {
  const DtnOperator& op = disk_laplace(0.05).op;
  for (double t : {1e-3, 1e-2, 1e-1, 1.0}) {
    const Eigen::VectorXd rows = real_kernel(op, t) * op.weights();
    EXPECT_LE((rows.array() - 1.0).abs().maxCoeff(), 1e-8) << "t=" << t;
  }
  const Eigen::VectorXd rows = real_kernel(star_variable(0.08).op, 0.1) * star_variable(0.08).op.weights();
  EXPECT_LE((rows.array() - 1.0).abs().maxCoeff(), 1e-8);
}

TEST(Kernel, DiskDiagonalAtUnitTime) {
  const DtnOperator& op = disk_laplace(0.04).op;
  const double expected = (1.0 + 2.0 / (std::exp(1.0) - 1.0)) / (2 * kPi);
  const Eigen::MatrixXd k = real_kernel(op, 1.0);
  for (Eigen::Index i = 0; i < op.size(); ++i) EXPECT_NEAR(k(i, i), expected, 0.02 * expected) << "i=" << i;
}

TEST(Kernel, RealKernelMatchesComplexKernel) {
  const DtnOperator& op = star_variable(0.08).op;
  const KernelMatrix k = kernel(op, Complex(0.2, 0.0));
  EXPECT_LE((k.values.real() - real_kernel(op, 0.2)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(k.values.imag().cwiseAbs().maxCoeff(), 0.0);
}

// Property: K_{conj z} = conj(K_z).
TEST(Property, ConjugateSymmetry) {
  const DtnOperator& op = star_variable(0.08).op;
  for (Complex z : {Complex(0.1, 0.05), Complex(0.7, -0.4), Complex(2.0, 1.0)}) {
    const ComplexMatrix a = kernel(op, std::conj(z)).values;
    const ComplexMatrix b = kernel(op, z).values.conjugate();
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-13 * b.cwiseAbs().maxCoeff());
  }
}

TEST(ApplySemigroup, EigenRelation) {
  const DtnOperator& op = star_variable(0.08).op;
  for (Eigen::Index n : {0, 2, 9}) {
    const Eigen::VectorXd phi = op.eigenvectors().col(n);
    for (Complex z : {Complex(0.3, 0.0), Complex(0.3, 0.2), Complex(0.0, 1.5)}) {
      const Eigen::VectorXcd out = apply_semigroup(op, z, phi);
      const Eigen::VectorXcd expected = decay_factor(op.eigenvalues()[n], z) * phi.cast<Complex>();
      EXPECT_LE((out - expected).cwiseAbs().maxCoeff(), 1e-12) << "n=" << n;
    }
  }
}

TEST(ApplySemigroup, ImaginaryTimeIsUnitary) {
  const DtnOperator& op = star_variable(0.08).op;
  const Eigen::VectorXd phi = random_vector(op.size(), 8);
  for (double s : {0.1, 1.0, 10.0}) {
    const Eigen::VectorXcd out = apply_semigroup(op, Complex(0.0, s), phi);
    const double out_norm = std::sqrt((out.adjoint() * op.boundary_mass() * out)(0, 0).real());
    EXPECT_NEAR(out_norm, mass_norm(op, phi), 1e-10 * mass_norm(op, phi)) << "s=" << s;
  }
}

TEST(ApplySemigroup, ConstantsAreInvariant) {
  for (const DtnOperator* op : {&disk_laplace(0.05).op, &star_variable(0.08).op}) {
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(op->size());
    for (double t : {1e-3, 0.1, 1.0, 10.0})
      EXPECT_LE((apply_semigroup(*op, t, one) - one).cwiseAbs().maxCoeff(), 1e-10) << "t=" << t;
  }
}

TEST(ApplySemigroup, ZeroTimeIsIdentity) {
  const DtnOperator& op = star_variable(0.08).op;
  const Eigen::VectorXd phi = random_vector(op.size(), 4);
  EXPECT_LE((apply_semigroup(op, 0.0, phi) - phi).cwiseAbs().maxCoeff(), 1e-11);
}

// Property: S_{z1+z2} = S_{z1} S_{z2}.
TEST(Property, SemigroupLaw) {
  const DtnOperator& op = star_variable(0.08).op;
  const Eigen::VectorXd phi = random_vector(op.size(), 12);
  for (auto [z1, z2] : {std::pair{Complex(0.1, 0.05), Complex(0.3, -0.2)}, std::pair{Complex(1.0, 0.5), Complex(0.02, 0.01)}}) {
    const Eigen::VectorXcd direct = apply_semigroup(op, z1 + z2, phi);
    const Eigen::VectorXcd composed = apply_semigroup(op, z1, apply_semigroup(op, z2, phi));
    EXPECT_LE((direct - composed).cwiseAbs().maxCoeff(), 1e-10 * phi.cwiseAbs().maxCoeff());
    const ComplexMatrix m = semigroup_matrix(op, z1 + z2) - semigroup_matrix(op, z1) * semigroup_matrix(op, z2);
    EXPECT_LE(mass_operator_norm(op, m), 1e-10);
  }
}

// Property: (S_{t+e} phi - S_t phi) / e -> -N S_t phi with first-order error.
TEST(Property, DerivativeConsistency) {
  const DtnOperator& op = disk_laplace(0.08).op;
  const Eigen::VectorXd phi = random_vector(op.size(), 6);
  const double t = 0.5;
  const Eigen::VectorXd st = apply_semigroup(op, t, phi);
  const Eigen::VectorXd target = -apply_dtn(op, st);
  std::vector<double> errors;
  for (double eps : {1e-3, 5e-4, 2.5e-4}) {
    const Eigen::VectorXd quotient = (apply_semigroup(op, t + eps, phi) - st) / eps;
    errors.push_back((quotient - target).cwiseAbs().maxCoeff());
  }
  for (std::size_t k = 1; k < errors.size(); ++k) {
    const double order = std::log2(errors[k - 1] / errors[k]);
    EXPECT_NEAR(order, 1.0, 0.1);
  }
}

TEST(SemigroupMatrix, MatchesApply) {
  const DtnOperator& op = star_variable(0.08).op;
  const Eigen::VectorXd phi = random_vector(op.size(), 2);
  const Complex z(0.4, 0.1);
  EXPECT_LE((semigroup_matrix(op, z) * phi.cast<Complex>() - apply_semigroup(op, z, phi)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Norms, IdentityHasUnitNorms) {
  const DtnOperator& op = star_variable(0.08).op;
  const ComplexMatrix id = ComplexMatrix::Identity(op.size(), op.size());
  EXPECT_NEAR(mass_operator_norm(op, id), 1.0, 1e-12);
  EXPECT_NEAR(linf_operator_norm(id), 1.0, 0.0);
}

TEST(ImaginaryPower, ZeroExponentIsIdentity) {
  const DtnOperator& op = disk_laplace(0.05).op;
  const ComplexMatrix a = imaginary_power(op, 1.0, 0.0);
  EXPECT_LE((a - ComplexMatrix::Identity(op.size(), op.size())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ImaginaryPower, UnitaryInMassGeometry) {
  const DtnOperator& op = star_variable(0.08).op;
  for (double s : {-3.0, 0.5, 1.0, 2.0, 4.0, 8.0}) EXPECT_NEAR(mass_operator_norm(op, imaginary_power(op, 1.0, s)), 1.0, 1e-10);
}

TEST(ImaginaryPower, GroupLaw) {
  const DtnOperator& op = disk_laplace(0.08).op;
  const ComplexMatrix lhs = imaginary_power(op, 1.0, 1.5);
  const ComplexMatrix rhs = imaginary_power(op, 1.0, 0.5) * imaginary_power(op, 1.0, 1.0);
  EXPECT_LE(mass_operator_norm(op, lhs - rhs), 1e-10);
}

TEST(ImaginaryPower, RejectsNonPositiveShift) {
  const DtnOperator& op = disk_laplace(0.1).op;
  EXPECT_THROW(imaginary_power(op, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(imaginary_power(op, -1.0, 1.0), std::invalid_argument);
}

TEST(RotatedGenerator, IdentityRotation) {
  const DtnOperator& op = star_variable(0.08).op;
  const RotatedGenerator gen = rotated_generator(op, Complex(1.0, 0.0));
  const ComplexVector ev = gen.eigenvalues();
  for (Eigen::Index k = 0; k < op.size(); ++k) EXPECT_EQ(ev[k], Complex(op.eigenvalues()[k], 0.0));
  EXPECT_LE((gen.schwartz_kernel().real() - schwartz_kernel(op)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(RotatedGenerator, KernelIsRotatedTime) {
  const DtnOperator& op = star_variable(0.08).op;
  const Complex z0 = std::polar(1.0, 0.6);
  const RotatedGenerator gen(op, z0);
  for (double t : {0.05, 0.5}) {
    const ComplexMatrix a = gen.kernel(t).values, b = kernel(op, t * z0).values;
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12 * b.cwiseAbs().maxCoeff());
  }
}

TEST(RotatedGenerator, SchwartzKernelScalesByModulus) {
  const DtnOperator& op = star_variable(0.08).op;
  const Complex z0 = std::polar(1.0, -0.9);
  const Eigen::MatrixXd a = RotatedGenerator(op, z0).schwartz_kernel().cwiseAbs();
  const Eigen::MatrixXd b = schwartz_kernel(op).cwiseAbs();
  EXPECT_LE((a - std::abs(z0) * b).cwiseAbs().maxCoeff(), 1e-12 * b.maxCoeff());
}

TEST(RotatedGenerator, RejectsInvalidRotation) {
  const DtnOperator& op = disk_laplace(0.1).op;
  EXPECT_THROW(RotatedGenerator(op, Complex(2.0, 0.0)), std::invalid_argument);
  EXPECT_THROW(RotatedGenerator(op, Complex(0.0, 1.0)), std::invalid_argument);
}

TEST(SchwartzKernel, SymmetricWithNegativeFarField) {
  const DtnOperator& op = disk_laplace(0.05).op;
  const Eigen::MatrixXd k = schwartz_kernel(op);
  EXPECT_LE((k - k.transpose()).cwiseAbs().maxCoeff(), 1e-12 * k.cwiseAbs().maxCoeff());
  // Antipodal points of the unit disk: the continuous kernel is -1/(4 pi sin^2(pi/2)) = -1/(4 pi).
  const Eigen::Index half = op.size() / 2;
  EXPECT_LT(k(0, half), 0.0);
}

}  // namespace
}  // namespace steklov
