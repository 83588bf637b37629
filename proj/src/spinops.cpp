#include "nvsim/spinops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace nvsim {

int spin_dimension(double s) {
  const double twice = 2.0 * s;
  const long rounded = std::lround(twice);
  if (rounded < 1 || rounded > 3 || std::abs(twice - static_cast<double>(rounded)) > 1e-12) {
    throw UnsupportedSpin("unsupported spin quantum number s=" + std::to_string(s) +
                          " (supported: 1/2, 1, 3/2)");
  }
  return static_cast<int>(rounded) + 1;
}

SpinMatrices spin_matrices(double s) {
  const int dim = spin_dimension(s);
  // exact half-integer value
  const double spin = 0.5 * (dim - 1);
  Matrix raise = Matrix::Zero(dim, dim);
  for (int k = 1; k < dim; ++k) {
    // column k holds m = spin - k; S+ maps it to row k-1
    const double m = spin - k;
    raise(k - 1, k) = std::sqrt(spin * (spin + 1.0) - m * (m + 1.0));
  }
  const Matrix lower = raise.adjoint();
  SpinMatrices out;
  out.x = 0.5 * (raise + lower);
  out.y = Complex(0.0, -0.5) * (raise - lower);
  out.z = Matrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) out.z(k, k) = spin - k;
  return out;
}

SpinSystem::SpinSystem(std::vector<Spin> spins) : spins_(std::move(spins)) {
  for (std::size_t i = 0; i < spins_.size(); ++i) {
    for (std::size_t j = i + 1; j < spins_.size(); ++j) {
      if (spins_[i].label == spins_[j].label) {
        throw std::invalid_argument("duplicate spin label '" + spins_[i].label + "'");
      }
    }
  }
  total_dim_ = 1;
  for (const auto& spin : spins_) total_dim_ *= spin.dim();
  embedded_.reserve(spins_.size());
  for (std::size_t site = 0; site < spins_.size(); ++site) {
    const SpinMatrices local = spin_matrices(spins_[site].s);
    embedded_.push_back(
        {embed(local.x, site, *this), embed(local.y, site, *this), embed(local.z, site, *this)});
  }
}

int SpinSystem::site_dim(std::size_t site) const {
  if (site >= spins_.size()) {
    throw std::out_of_range("site index " + std::to_string(site) + " out of range (system has " +
                            std::to_string(spins_.size()) + " spins)");
  }
  return spins_[site].dim();
}

int SpinSystem::rest_dim(std::size_t site) const { return total_dim_ / site_dim(site); }

std::size_t SpinSystem::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < spins_.size(); ++i) {
    if (spins_[i].label == label) return i;
  }
  throw std::out_of_range("no spin labelled '" + label + "'");
}

bool SpinSystem::has(const std::string& label) const {
  return std::any_of(spins_.begin(), spins_.end(),
                     [&](const Spin& spin) { return spin.label == label; });
}

double SpinSystem::m_of(std::size_t site, int index) const {
  const int dim = site_dim(site);
  int stride = 1;
  for (std::size_t k = site + 1; k < spins_.size(); ++k) stride *= spins_[k].dim();
  const int local = (index / stride) % dim;
  return 0.5 * (dim - 1) - local;
}

const SpinMatrices& SpinSystem::cached(std::size_t site) const {
  if (site >= embedded_.size()) {
    throw std::out_of_range("site index " + std::to_string(site) + " out of range");
  }
  return embedded_[site];
}

Matrix embed(const Matrix& op, std::size_t site, const SpinSystem& system) {
  const int local = system.site_dim(site);
  if (op.rows() != local || op.cols() != local) {
    throw DimensionMismatch("operator is " + std::to_string(op.rows()) + "x" +
                            std::to_string(op.cols()) + " but site " + std::to_string(site) +
                            " has dimension " + std::to_string(local));
  }
  int before = 1;
  int after = 1;
  const auto& spins = system.spins();
  for (std::size_t k = 0; k < site; ++k) before *= spins[k].dim();
  for (std::size_t k = site + 1; k < spins.size(); ++k) after *= spins[k].dim();
  const Matrix left = Matrix::Identity(before, before);
  const Matrix right = Matrix::Identity(after, after);
  const Matrix partial = Eigen::kroneckerProduct(left, op).eval();
  return Eigen::kroneckerProduct(partial, right).eval();
}

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double hermiticity_error(const Matrix& a) { return max_abs(a - a.adjoint()); }

double unitarity_error(const Matrix& u) {
  return max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()));
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

void require_hermitian(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch(std::string(what) + ": matrix is not square");
  }
  const double tol = 1e-9 * std::max(1.0, max_abs(a));
  const double err = hermiticity_error(a);
  if (err > tol) {
    throw NotHermitian(std::string(what) + ": matrix is not Hermitian (||A - A^dag||_max = " +
                       std::to_string(err) + ")");
  }
}

Eigensystem eigensystem(const Matrix& h) {
  require_hermitian(h, "eigensystem");
  const Matrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigensystem: Hermitian eigensolver failed");
  }
  // SelfAdjointEigenSolver already returns ascending eigenvalues
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix expm_unitary(const Eigensystem& eig, double t_us) {
  const auto n = eig.values.size();
  Vector phases(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    phases(k) = std::polar(1.0, -kTwoPi * eig.values(k) * t_us);
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

Matrix expm_unitary(const Matrix& h, double t_us) { return expm_unitary(eigensystem(h), t_us); }

}  // namespace nvsim
