#include "steklov/fem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "steklov/parallel.hpp"

namespace steklov {

namespace {

using Triplet = Eigen::Triplet<double>;

// Interior 3-point rule, exact for quadratics: barycentric (2/3,1/6,1/6) and permutations.
constexpr std::array<std::array<double, 3>, 3> kQuadBary = {{
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
    {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
}};

void check_conductivity(const Eigen::Matrix2d& c, double mu, const Point& x) {
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  if (!c.allFinite()) throw EllipticityError("coefficient is not finite", x);
  if (std::abs(c(0, 1) - c(1, 0)) > 1e-14 * scale) {
    std::ostringstream msg;
    msg << "coefficient not symmetric at (" << x.x() << ", " << x.y() << ")";
    throw EllipticityError(msg.str(), x);
  }
  const double mean = 0.5 * (c(0, 0) + c(1, 1));
  const double radius = std::hypot(0.5 * (c(0, 0) - c(1, 1)), c(0, 1));
  if (mean - radius < mu * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "ellipticity violated at (" << x.x() << ", " << x.y() << "): smallest eigenvalue "
        << mean - radius << " < mu = " << mu;
    throw EllipticityError(msg.str(), x);
  }
}

}  // namespace

CoefficientField identity_coefficients() {
  CoefficientField c;
  c.name = "identity";
  c.conductivity = [](const Point&) { return Eigen::Matrix2d::Identity().eval(); };
  c.mu = 1.0;
  return c;
}

CoefficientField variable_coefficients() {
  CoefficientField c;
  c.name = "variable";
  c.conductivity = [](const Point& x) {
    Eigen::Matrix2d m;
    const double c11 = 1.5 + 0.5 * std::sin(2.0 * x.x());
    const double c22 = 1.2 + 0.3 * std::cos(3.0 * x.y());
    const double c12 = 0.3 * std::sin(x.x() + x.y());
    m << c11, c12, c12, c22;
    return m;
  };
  c.mu = 0.5;
  return c;
}

CoefficientField with_potential(CoefficientField base, std::string label,
                                std::function<double(const Point&)> potential) {
  base.name += "+V:" + label;
  base.potential = std::move(potential);
  return base;
}

CoefficientField with_constant_potential(CoefficientField base, double value) {
  std::ostringstream label;
  label << value;
  return with_potential(std::move(base), label.str(), [value](const Point&) { return value; });
}

CoefficientField with_random_potential(CoefficientField base, unsigned seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  struct Mode {
    double a, kx, ky, phase;
  };
  std::vector<Mode> modes;
  double total = 0.0;
  for (int kx = 0; kx <= 2; ++kx)
    for (int ky = 0; ky <= 2; ++ky) {
      const Mode m{coef(rng), static_cast<double>(kx), static_cast<double>(ky),
                   std::numbers::pi * coef(rng)};
      total += std::abs(m.a);
      modes.push_back(m);
    }
  const double scale = amplitude / total;
  auto v = [modes, scale](const Point& x) {
    double sum = 0.0;
    for (const auto& m : modes) sum += m.a * std::cos(m.kx * x.x() + m.ky * x.y() + m.phase);
    return scale * sum;
  };
  return with_potential(std::move(base), "random:" + std::to_string(seed), v);
}

SparseMatrix DiscreteForms::operator_matrix() const {
  SparseMatrix k = stiffness + potential;
  k.makeCompressed();
  return k;
}

DiscreteForms assemble(const Mesh& mesh, const CoefficientField& coeff) {
  if (!coeff.conductivity) throw std::invalid_argument("assemble: coefficient field has no conductivity");
  if (!(coeff.mu > 0.0)) throw std::invalid_argument("assemble: ellipticity constant must be positive");
  const auto n = static_cast<Eigen::Index>(mesh.vertices.size());
  const std::size_t m = mesh.boundary_ring.size();
  if (m < 3 || mesh.segment_lengths.size() != m || mesh.boundary_weights.size() != m)
    throw std::invalid_argument("assemble: mesh boundary ring is incomplete");

  DiscreteForms forms;
  forms.has_potential = coeff.has_potential();
  std::vector<Triplet> a_trip, b_trip, m_trip;
  a_trip.reserve(9 * mesh.triangles.size());
  m_trip.reserve(9 * mesh.triangles.size());
  if (forms.has_potential) b_trip.reserve(9 * mesh.triangles.size());

  for (const auto& tri : mesh.triangles) {
    const Point& p0 = mesh.vertices[tri[0]];
    const Point& p1 = mesh.vertices[tri[1]];
    const Point& p2 = mesh.vertices[tri[2]];
    Eigen::Matrix2d jac;
    jac.col(0) = p1 - p0;
    jac.col(1) = p2 - p0;
    const double area = 0.5 * jac.determinant();
    if (!(area > 0.0)) throw std::invalid_argument("assemble: triangle with nonpositive area");
    const Eigen::Matrix2d inv_t = jac.inverse().transpose();
    Eigen::Matrix<double, 2, 3> grad;
    grad.col(1) = inv_t.col(0);
    grad.col(2) = inv_t.col(1);
    grad.col(0) = -grad.col(1) - grad.col(2);

    Eigen::Matrix3d ke = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d be = Eigen::Matrix3d::Zero();
    for (const auto& bary : kQuadBary) {
      const Point x = bary[0] * p0 + bary[1] * p1 + bary[2] * p2;
      const Eigen::Matrix2d c = coeff.conductivity(x);
      check_conductivity(c, coeff.mu, x);
      const double w = area / 3.0;
      ke.noalias() += w * grad.transpose() * c * grad;
      if (forms.has_potential) {
        const double v = coeff.potential(x);
        if (!std::isfinite(v)) throw std::invalid_argument("assemble: potential is not finite");
        forms.max_abs_potential = std::max(forms.max_abs_potential, std::abs(v));
        const Eigen::Vector3d phi(bary[0], bary[1], bary[2]);
        be.noalias() += w * v * phi * phi.transpose();
      }
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        a_trip.emplace_back(tri[i], tri[j], ke(i, j));
        m_trip.emplace_back(tri[i], tri[j], area / 12.0 * (i == j ? 2.0 : 1.0));
        if (forms.has_potential) b_trip.emplace_back(tri[i], tri[j], be(i, j));
      }
  }
  forms.stiffness.resize(n, n);
  forms.stiffness.setFromTriplets(a_trip.begin(), a_trip.end());
  forms.mass.resize(n, n);
  forms.mass.setFromTriplets(m_trip.begin(), m_trip.end());
  forms.potential.resize(n, n);
  forms.potential.setFromTriplets(b_trip.begin(), b_trip.end());

  // P1 mass on the closed boundary polygon, each piece measured by curve arclength.
  std::vector<Triplet> g_trip;
  for (std::size_t i = 0; i < m; ++i) {
    const int a = static_cast<int>(i), b = static_cast<int>((i + 1) % m);
    const double len = mesh.segment_lengths[i];
    g_trip.emplace_back(a, a, len / 3.0);
    g_trip.emplace_back(b, b, len / 3.0);
    g_trip.emplace_back(a, b, len / 6.0);
    g_trip.emplace_back(b, a, len / 6.0);
  }
  forms.boundary_mass.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  forms.boundary_mass.setFromTriplets(g_trip.begin(), g_trip.end());

  std::vector<char> on_boundary(mesh.vertices.size(), 0);
  for (int v : mesh.boundary_ring) on_boundary[v] = 1;
  forms.boundary = mesh.boundary_ring;
  for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v)
    if (!on_boundary[v]) forms.interior.push_back(v);
  forms.boundary_points = mesh.boundary_points();
  forms.boundary_weights = mesh.boundary_weights;
  forms.mesh_size = mesh.h;
  return forms;
}

SparseMatrix extract_block(const SparseMatrix& a, const std::vector<int>& rows,
                           const std::vector<int>& cols) {
  std::vector<int> row_map(a.rows(), -1), col_map(a.cols(), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) row_map[rows[i]] = static_cast<int>(i);
  for (std::size_t j = 0; j < cols.size(); ++j) col_map[cols[j]] = static_cast<int>(j);
  std::vector<Triplet> trip;
  for (Eigen::Index k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      const int r = row_map[it.row()], c = col_map[it.col()];
      if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
    }
  SparseMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

// Symmetric factorization of a possibly indefinite sparse matrix: LDL^T first,
// LU when a zero pivot shows up.
struct DirichletSolver::Impl {
  SparseMatrix k_ii;
  SparseMatrix k_ig;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  Eigen::SparseLU<SparseMatrix> lu;
  bool use_lu = false;

  explicit Impl(const DiscreteForms& forms) {
    const SparseMatrix k = forms.operator_matrix();
    k_ii = extract_block(k, forms.interior, forms.interior);
    k_ig = extract_block(k, forms.interior, forms.boundary);
    k_ii.makeCompressed();
    ldlt.compute(k_ii);
    bool ok = ldlt.info() == Eigen::Success;
    if (ok) {
      const auto& d = ldlt.vectorD();
      const double dmax = d.cwiseAbs().maxCoeff();
      ok = d.cwiseAbs().minCoeff() > 1e-14 * dmax;
    }
    if (!ok) {
      use_lu = true;
      lu.analyzePattern(k_ii);
      lu.factorize(k_ii);
      if (lu.info() != Eigen::Success)
        throw std::runtime_error("Dirichlet solve: interior block is singular");
    }
  }

  template <typename Rhs>
  Eigen::MatrixXd solve(const Rhs& rhs) const {
    Eigen::MatrixXd x = use_lu ? Eigen::MatrixXd(lu.solve(rhs)) : Eigen::MatrixXd(ldlt.solve(rhs));
    // one step of iterative refinement
    const Eigen::MatrixXd r = rhs - k_ii * x;
    x += use_lu ? Eigen::MatrixXd(lu.solve(r)) : Eigen::MatrixXd(ldlt.solve(r));
    return x;
  }
};

DirichletSolver::DirichletSolver(const DiscreteForms& forms)
    : forms_(&forms), impl_(std::make_unique<Impl>(forms)) {}
DirichletSolver::~DirichletSolver() = default;
DirichletSolver::DirichletSolver(DirichletSolver&&) noexcept = default;
DirichletSolver& DirichletSolver::operator=(DirichletSolver&&) noexcept = default;

Eigen::VectorXd DirichletSolver::lift(const Eigen::VectorXd& boundary_values) const {
  if (boundary_values.size() != forms_->boundary_size())
    throw std::invalid_argument("lift: boundary vector has the wrong size");
  Eigen::VectorXd u(forms_->vertex_count());
  if (forms_->interior_size() > 0) {
    const Eigen::VectorXd rhs = -(impl_->k_ig * boundary_values);
    const Eigen::VectorXd ui = impl_->solve(rhs);
    for (std::size_t i = 0; i < forms_->interior.size(); ++i) u[forms_->interior[i]] = ui[i];
  }
  for (std::size_t j = 0; j < forms_->boundary.size(); ++j) u[forms_->boundary[j]] = boundary_values[j];
  return u;
}

Eigen::MatrixXd DirichletSolver::interior_lifting() const {
  const Eigen::Index m = forms_->boundary_size();
  const Eigen::Index ni = forms_->interior_size();
  Eigen::MatrixXd out(ni, m);
  if (ni == 0) return out;
  // column blocks are independent solves
  constexpr Eigen::Index block = 16;
  const auto blocks = static_cast<std::size_t>((m + block - 1) / block);
  const Eigen::MatrixXd rhs = -Eigen::MatrixXd(impl_->k_ig);
  parallel_for(blocks, [&](std::size_t b) {
    const Eigen::Index c0 = static_cast<Eigen::Index>(b) * block;
    const Eigen::Index cols = std::min(block, m - c0);
    out.middleCols(c0, cols) = impl_->solve(rhs.middleCols(c0, cols));
  });
  return out;
}

Eigen::MatrixXd DirichletSolver::lifting_matrix() const {
  const Eigen::MatrixXd interior = interior_lifting();
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(forms_->vertex_count(), forms_->boundary_size());
  for (std::size_t i = 0; i < forms_->interior.size(); ++i) e.row(forms_->interior[i]) = interior.row(i);
  for (std::size_t j = 0; j < forms_->boundary.size(); ++j) e(forms_->boundary[j], j) = 1.0;
  return e;
}

Eigen::VectorXd lift(const DiscreteForms& forms, const Eigen::VectorXd& boundary_values) {
  return DirichletSolver(forms).lift(boundary_values);
}

Eigen::VectorXd restrict_to_boundary(const DiscreteForms& forms, const Eigen::VectorXd& u) {
  Eigen::VectorXd out(forms.boundary_size());
  for (std::size_t j = 0; j < forms.boundary.size(); ++j) out[j] = u[forms.boundary[j]];
  return out;
}

Eigen::VectorXd conormal(const DiscreteForms& forms, const Eigen::VectorXd& u) {
  if (u.size() != forms.vertex_count()) throw std::invalid_argument("conormal: vector has the wrong size");
  const Eigen::VectorXd ku = forms.operator_matrix() * u;
  const Eigen::VectorXd rhs = restrict_to_boundary(forms, ku);
  const Eigen::MatrixXd mg(forms.boundary_mass);
  return mg.llt().solve(rhs);
}

WellposednessReport check_wellposedness(const DiscreteForms& forms) {
  WellposednessReport report;
  const SparseMatrix k = forms.operator_matrix();
  const SparseMatrix k_ii = extract_block(k, forms.interior, forms.interior);
  const SparseMatrix m_ii = extract_block(forms.mass, forms.interior, forms.interior);
  const Eigen::Index n = k_ii.rows();
  if (n == 0) throw std::invalid_argument("check_wellposedness: mesh has no interior vertices");

  Eigen::SimplicialLLT<SparseMatrix> mass_llt(m_ii);
  if (mass_llt.info() != Eigen::Success) throw std::runtime_error("check_wellposedness: mass not definite");

  // Largest |eta| by power iteration on M^{-1}K.
  std::mt19937_64 rng(20170701);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = normal(rng);
  double rayleigh = 0.0;
  for (int it = 0; it < 300; ++it) {
    x = mass_llt.solve(k_ii * x);
    x /= std::sqrt(x.dot(m_ii * x));
    const double next = x.dot(k_ii * x);
    const bool converged = it > 10 && std::abs(next - rayleigh) <= 1e-8 * std::abs(next);
    rayleigh = next;
    if (converged) break;
  }
  report.sigma_max = std::abs(rayleigh);

  // Smallest |eta| by block inverse iteration with Rayleigh-Ritz.
  Eigen::SimplicialLDLT<SparseMatrix> k_ldlt(k_ii);
  Eigen::SparseLU<SparseMatrix> k_lu;
  bool use_lu = k_ldlt.info() != Eigen::Success ||
                k_ldlt.vectorD().cwiseAbs().minCoeff() <= 1e-14 * k_ldlt.vectorD().cwiseAbs().maxCoeff();
  if (use_lu) {
    k_lu.analyzePattern(k_ii);
    k_lu.factorize(k_ii);
    if (k_lu.info() != Eigen::Success) {
      report.sigma_min = 0.0;
      report.tolerance = 1e-8 * report.sigma_max;
      report.well_posed = false;
      report.near_singular = true;
      return report;
    }
  }
  const Eigen::Index p = std::min<Eigen::Index>(6, n);
  Eigen::MatrixXd block(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) block(i, j) = normal(rng);
  double previous = std::numeric_limits<double>::infinity();
  double sigma = 0.0;
  for (int it = 0; it < 500; ++it) {
    const Eigen::MatrixXd rhs = m_ii * block;
    Eigen::MatrixXd y = use_lu ? Eigen::MatrixXd(k_lu.solve(rhs)) : Eigen::MatrixXd(k_ldlt.solve(rhs));
    Eigen::MatrixXd kr = y.transpose() * (k_ii * y);
    Eigen::MatrixXd mr = y.transpose() * (m_ii * y);
    kr = 0.5 * (kr + kr.transpose()).eval();
    mr = 0.5 * (mr + mr.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(kr, mr);
    if (ritz.info() != Eigen::Success) throw std::runtime_error("check_wellposedness: Ritz step failed");
    std::vector<Eigen::Index> order(p);
    for (Eigen::Index j = 0; j < p; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return std::abs(ritz.eigenvalues()[a]) < std::abs(ritz.eigenvalues()[b]);
    });
    Eigen::MatrixXd q(p, p);
    for (Eigen::Index j = 0; j < p; ++j) q.col(j) = ritz.eigenvectors().col(order[j]);
    block = y * q;
    sigma = ritz.eigenvalues()[order[0]];
    const Eigen::VectorXd v = block.col(0);
    const double resid = (k_ii * v - sigma * (m_ii * v)).norm();
    const double scale = (k_ii * v).norm() + std::abs(sigma) * (m_ii * v).norm();
    if (resid <= 1e-10 * scale || std::abs(sigma - previous) <= 1e-14 * std::abs(sigma)) break;
    previous = sigma;
  }
  report.sigma_min = sigma;
  report.tolerance = 1e-8 * report.sigma_max;
  report.well_posed = std::abs(sigma) >= report.tolerance;
  report.near_singular = std::abs(sigma) < 1e-6 * report.sigma_max;
  return report;
}

}  // namespace steklov
