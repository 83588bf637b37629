#include <gtest/gtest.h>

#include <random>

#include "nvsim/spinops.hpp"

using namespace nvsim;

namespace {

Matrix random_hermitian(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

}  // namespace

TEST(SpinMatrices, SpinHalfSz) {
  const auto m = spin_matrices(0.5);
  EXPECT_NEAR(m.z(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(m.z(1, 1).real(), -0.5, 1e-15);
  EXPECT_NEAR(std::abs(m.z(0, 1)), 0.0, 1e-15);
}

TEST(SpinMatrices, SpinOneLadder) {
  const auto m = spin_matrices(1.0);
  EXPECT_NEAR(m.z(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(m.z(1, 1).real(), 0.0, 1e-15);
  EXPECT_NEAR(m.z(2, 2).real(), -1.0, 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(m.x(0, 1).real(), r, 1e-15);
  EXPECT_NEAR(m.x(1, 0).real(), r, 1e-15);
  EXPECT_NEAR(m.x(1, 2).real(), r, 1e-15);
  EXPECT_NEAR(m.x(2, 1).real(), r, 1e-15);
  EXPECT_NEAR(std::abs(m.x(0, 2)), 0.0, 1e-15);
}

TEST(SpinMatrices, CommutationAndCasimir) {
  for (double s : {0.5, 1.0, 1.5}) {
    const auto m = spin_matrices(s);
    const Complex i(0.0, 1.0);
    EXPECT_LT(max_abs(commutator(m.x, m.y) - i * m.z), 1e-12) << s;
    EXPECT_LT(max_abs(commutator(m.y, m.z) - i * m.x), 1e-12) << s;
    EXPECT_LT(max_abs(commutator(m.z, m.x) - i * m.y), 1e-12) << s;
    const int d = spin_dimension(s);
    const Matrix s2 = m.x * m.x + m.y * m.y + m.z * m.z;
    EXPECT_LT(max_abs(s2 - s * (s + 1) * Matrix::Identity(d, d)), 1e-12) << s;
  }
}

TEST(SpinMatrices, UnsupportedSpin) {
  EXPECT_THROW(spin_matrices(2.0), UnsupportedSpin);
  EXPECT_THROW(spin_matrices(0.3), UnsupportedSpin);
  EXPECT_THROW(spin_dimension(-1.0), UnsupportedSpin);
}

TEST(Embed, IdentityAndHomomorphism) {
  const SpinSystem sys({{"a", 1.0, 0.0}, {"b", 0.5, 0.0}, {"c", 1.0, 0.0}});
  EXPECT_EQ(sys.total_dim(), 18);
  for (std::size_t site = 0; site < 3; ++site) {
    const int d = sys.site_dim(site);
    EXPECT_LT(max_abs(embed(Matrix::Identity(d, d), site, sys) - sys.identity()), 1e-15);
    const Matrix a = random_hermitian(d, 1 + site);
    const Matrix b = random_hermitian(d, 7 + site);
    EXPECT_LT(max_abs(embed(a * b, site, sys) - embed(a, site, sys) * embed(b, site, sys)), 1e-12);
  }
  EXPECT_LT(max_abs(sys.sz(1) - embed(spin_matrices(0.5).z, 1, sys)), 1e-15);
  EXPECT_EQ(sys.rest_dim(0), 6);
}

TEST(Embed, OperatorsOnDifferentSitesCommute) {
  const SpinSystem sys({{"a", 1.0, 0.0}, {"b", 0.5, 0.0}});
  EXPECT_LT(max_abs(commutator(sys.sx(0), sys.sy(1))), 1e-15);
}

TEST(Embed, BasisOrderingMostSignificantFirst) {
  const SpinSystem sys({{"a", 1.0, 0.0}, {"b", 0.5, 0.0}});
  // index = i_a * 2 + i_b, m descending inside each factor
  EXPECT_DOUBLE_EQ(sys.m_of(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(sys.m_of(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(sys.m_of(1, 1), -0.5);
  EXPECT_DOUBLE_EQ(sys.m_of(0, 5), -1.0);
  EXPECT_EQ(sys.index_of("b"), 1u);
  EXPECT_FALSE(sys.has("c"));
}

TEST(Embed, DimensionMismatch) {
  const SpinSystem sys({{"a", 1.0, 0.0}});
  EXPECT_THROW(embed(Matrix::Identity(2, 2), 0, sys), DimensionMismatch);
}

TEST(Eigensystem, Examples) {
  Matrix h = Matrix::Zero(3, 3);
  h(0, 0) = 3;
  h(1, 1) = 1;
  h(2, 2) = 2;
  const auto e = eigensystem(h);
  EXPECT_NEAR(e.values(0), 1.0, 1e-14);
  EXPECT_NEAR(e.values(1), 2.0, 1e-14);
  EXPECT_NEAR(e.values(2), 3.0, 1e-14);
  const auto ex = eigensystem(spin_matrices(0.5).x);
  EXPECT_NEAR(ex.values(0), -0.5, 1e-14);
  EXPECT_NEAR(ex.values(1), 0.5, 1e-14);
}

TEST(Eigensystem, RejectsNonHermitian) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(eigensystem(a), NotHermitian);
}

TEST(Eigensystem, ReconstructsRandomHermitian) {
  for (int n : {2, 5, 12, 54}) {
    const Matrix h = random_hermitian(n, 40 + n);
    const auto e = eigensystem(h);
    EXPECT_LT(unitarity_error(e.vectors), 1e-10);
    const Matrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    EXPECT_LT(max_abs(back - h), 1e-10 * std::max(1.0, max_abs(h)));
    for (int i = 1; i < n; ++i) EXPECT_LE(e.values(i - 1), e.values(i));
  }
}

TEST(ExpmUnitary, ZeroTimeIsIdentity) {
  const Matrix h = random_hermitian(4, 3);
  EXPECT_LT(max_abs(expm_unitary(h, 0.0) - Matrix::Identity(4, 4)), 1e-14);
}

TEST(ExpmUnitary, LarmorHalfPeriod) {
  const double f = 2.5;
  const Matrix u = expm_unitary(f * spin_matrices(0.5).z, 1.0 / (2.0 * f));
  // diag(e^{-i pi/2}, e^{+i pi/2})
  EXPECT_NEAR(std::abs(u(0, 0) - Complex(0, -1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(u(1, 1) - Complex(0, 1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(u(0, 1)), 0.0, 1e-14);
}

TEST(ExpmUnitary, PropertyUnitaryAndGroupLaw) {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const int n = 2 + static_cast<int>(seed % 9);
    const Matrix h = random_hermitian(n, 100 + seed);
    const Matrix u1 = expm_unitary(h, 0.37);
    const Matrix u2 = expm_unitary(h, 1.1);
    EXPECT_LT(unitarity_error(u1), 1e-10);
    EXPECT_LT(max_abs(u1 * u2 - expm_unitary(h, 1.47)), 1e-10);
    EXPECT_LT(max_abs(expm_unitary(h, -0.37) * u1 - Matrix::Identity(n, n)), 1e-10);
  }
}
