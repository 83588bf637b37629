#pragma once

// Spin-operator algebra on small dense Hilbert spaces.
//
// Units used throughout nvsim: frequencies and Hamiltonians in MHz (h is
// absorbed, so H is a frequency operator), time in us, magnetic field in
// gauss, gyromagnetic ratios in MHz/G. A propagator over time t is
// exp(-i 2 pi H t).
//
// Basis ordering: tensor factors follow the SpinSystem site order (first site
// is the most significant index); inside each factor the Sz eigenbasis is
// ordered m = +s, s-1, ..., -s.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nvsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

class UnsupportedSpin : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotHermitian : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SpinMatrices {
  Matrix x;
  Matrix y;
  Matrix z;
};

// Angular-momentum matrices for spin s (s = 1/2, 1, 3/2).
SpinMatrices spin_matrices(double s);

// Number of levels 2s+1 for a supported spin quantum number.
int spin_dimension(double s);

struct Spin {
  std::string label;
  double s = 0.5;
  double gamma_mhz_per_gauss = 0.0;

  int dim() const { return spin_dimension(s); }
};

// Composite Hilbert space of several spins, with the embedded single-site
// spin operators cached at construction. Immutable after construction.
class SpinSystem {
 public:
  SpinSystem() = default;
  explicit SpinSystem(std::vector<Spin> spins);

  const std::vector<Spin>& spins() const { return spins_; }
  std::size_t size() const { return spins_.size(); }
  int total_dim() const { return total_dim_; }
  int site_dim(std::size_t site) const;
  // Product of the dimensions of every site except `site`.
  int rest_dim(std::size_t site) const;
  std::size_t index_of(const std::string& label) const;
  bool has(const std::string& label) const;

  const Matrix& sx(std::size_t site) const { return cached(site).x; }
  const Matrix& sy(std::size_t site) const { return cached(site).y; }
  const Matrix& sz(std::size_t site) const { return cached(site).z; }

  // Magnetic quantum number of `site` in the product basis state `index`.
  double m_of(std::size_t site, int index) const;

  Matrix identity() const { return Matrix::Identity(total_dim_, total_dim_); }

 private:
  const SpinMatrices& cached(std::size_t site) const;

  std::vector<Spin> spins_;
  std::vector<SpinMatrices> embedded_;
  int total_dim_ = 1;
};

// Kronecker embedding of a single-site operator: identity on all other sites.
Matrix embed(const Matrix& op, std::size_t site, const SpinSystem& system);

struct Eigensystem {
  RealVector values;  // ascending
  Matrix vectors;     // columns are eigenvectors, unitary
};

Eigensystem eigensystem(const Matrix& h);

// exp(-i 2 pi H t) for Hermitian H in MHz and t in us.
Matrix expm_unitary(const Matrix& h, double t_us);
Matrix expm_unitary(const Eigensystem& eig, double t_us);

double hermiticity_error(const Matrix& a);
double unitarity_error(const Matrix& u);
double max_abs(const Matrix& a);
Matrix commutator(const Matrix& a, const Matrix& b);

// Throws NotHermitian when ||A - A^dag||_max exceeds a tolerance relative to
// the operator scale.
void require_hermitian(const Matrix& a, const char* what);

}  // namespace nvsim
