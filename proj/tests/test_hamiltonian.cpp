#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "nvsim/hamiltonian.hpp"

using namespace nvsim;

namespace {

NvParams bare_nv() { return NvParams{}; }

}  // namespace

TEST(HNv, ZeroFieldEigenvalues) {
  const auto e = eigensystem(h_nv(0.0, bare_nv()).matrix());
  EXPECT_NEAR(e.values(0), 0.0, 1e-12);
  EXPECT_NEAR(e.values(1), 2880.0, 1e-12);
  EXPECT_NEAR(e.values(2), 2880.0, 1e-12);
}

TEST(HNv, TransitionAt100G) {
  const NvParams p = bare_nv();
  const double f = nv_transition_mhz(100.0, p);
  EXPECT_NEAR(f, 2880.0 - 2.0 * 1.3996245 * 100.0, 1e-9);
  EXPECT_NEAR(f, 2600.1, 0.05);
}

TEST(HNv, PropertyTransitionsFollowDPlusMinusGammaB) {
  const NvParams p = bare_nv();
  for (double b : {0.0, 10.0, 100.0, 514.4, 850.0, 1200.0, 3000.0}) {
    const auto eig = eigensystem(h_nv(b, p).matrix());
    const double e_plus = level_energy(eig, 0), e0 = level_energy(eig, 1), e_minus = level_energy(eig, 2);
    const double fp = p.D_mhz + p.gamma() * b, fm = std::abs(p.D_mhz - p.gamma() * b);
    EXPECT_NEAR((e_plus - e0) / fp, 1.0, 1e-9) << b;
    if (fm > 1.0) EXPECT_NEAR(std::abs(e_minus - e0) / fm, 1.0, 1e-9) << b;
  }
}

TEST(HNv, PropertyHermitian) {
  NvParams p;
  p.include_nucleus = true;
  for (double b : {0.0, 300.0, 900.0}) {
    EXPECT_LT(hermiticity_error(h_nv(b, p).matrix()), 1e-12);
    EXPECT_EQ(h_nv(b, p).dim(), 9);
  }
}

TEST(HNv, HyperfineSplitsLineIntoThree) {
  NvParams p;
  p.include_nucleus = true;
  p.A_par_mhz = 2.0;
  p.A_perp_mhz = 0.0;
  const auto eig = eigensystem(h_nv(850.0, p).matrix());
  // basis index = 3 * i_S + i_I
  std::vector<double> f;
  for (int i = 0; i < 3; ++i) f.push_back(level_energy(eig, 3 + i) - level_energy(eig, 6 + i));
  std::sort(f.begin(), f.end());
  EXPECT_NEAR(f[1] - f[0], 2.0, 1e-9);
  EXPECT_NEAR(f[2] - f[1], 2.0, 1e-9);
}

TEST(HN, SplittingAtResonanceField) {
  BathParams bath;
  const double b = resonance_field(NvParams{});  // 514.42 G
  const auto e = eigensystem(h_n(b, bath, 0).matrix());
  EXPECT_NEAR(e.values(1) - e.values(0), 2.0 * 1.3996245 * b, 1e-9);
  EXPECT_NEAR(e.values(1) - e.values(0), 1440.0, 0.05);
  EXPECT_NEAR(e.values(1) - e.values(0), nv_transition_mhz(b, NvParams{}), 1e-9);
}

TEST(HN, ZeroFieldDoublet) {
  const auto e = eigensystem(h_n(0.0, BathParams{}, 0).matrix());
  EXPECT_NEAR(e.values(1) - e.values(0), 0.0, 1e-12);
}

TEST(HN, HyperfineSidelines) {
  BathParams bath;
  bath.include_nucleus = true;
  const auto eig = eigensystem(h_n(3000.0, bath, 0).matrix());
  std::vector<double> f;
  for (int i = 0; i < 3; ++i) f.push_back(level_energy(eig, i) - level_energy(eig, 3 + i));
  std::sort(f.begin(), f.end());
  EXPECT_GT(f[1] - f[0], 0.9 * bath.A_par_mhz);
  EXPECT_GT(f[2] - f[1], 0.9 * bath.A_par_mhz);
  EXPECT_LT(std::abs((f[2] - f[1]) - (f[1] - f[0])), 0.1 * bath.A_par_mhz);
}

TEST(Dipolar, PrefactorFromConstants) {
  const double mu0_over_4pi = 1e-7;           // T m / A
  const double mu_b = 9.2740100783e-24;       // J / T
  const double h = 6.62607015e-34;            // J s
  const double j0 = mu0_over_4pi * 4.0 * mu_b * mu_b / 1e-27 / h / 1e6;  // MHz nm^3 (g = 2)
  EXPECT_NEAR(dipolar_prefactor_mhz_nm3(2.0, 2.0) / j0, 1.0, 1e-6);
}

TEST(Dipolar, InverseCubeDecay) {
  const SpinSystem sys({{"a", 1.0, 0.0}, {"b", 0.5, 0.0}});
  const Eigen::Vector3d n(0.0, 0.0, 1.0);
  double prev = 1e300;
  for (double r : {1.0, 2.0, 4.0, 8.0}) {
    const double norm = max_abs(h_dipolar(sys, 0, 1, r, n).matrix());
    EXPECT_LT(norm, prev);
    EXPECT_NEAR(norm * r * r * r, max_abs(h_dipolar(sys, 0, 1, 1.0, n).matrix()), 1e-9);
    prev = norm;
  }
  EXPECT_LT(hermiticity_error(h_dipolar(sys, 0, 1, 1.0, Eigen::Vector3d(1, 1, 0).normalized()).matrix()), 1e-12);
}

TEST(Dipolar, DoubleFlipElement) {
  const SpinSystem sys({{"a", 1.0, 0.0}, {"b", 0.5, 0.0}});
  const Matrix m = h_double_flip(sys, 0, 1, 0.8).matrix();
  // |m_a=0, up> = index 2, |m_a=-1, down> = index 5: c (S+S+ + S-S-)/2 element c/sqrt(2)
  EXPECT_NEAR(std::abs(m(2, 5)), 0.8 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(std::abs(m(2, 1)), 0.0, 1e-15);  // no flip-flop part
  EXPECT_NEAR(std::abs(m(2, 4)), 0.0, 1e-15);
}

TEST(ResonanceField, Examples) {
  NvParams p;
  EXPECT_NEAR(resonance_field(p), 514.4, 0.05);
  EXPECT_NEAR(resonance_field(p), 2880.0 / (2.0 * 2.0 * 1.3996245), 1e-9);
  p.D_mhz = 0.0;
  EXPECT_NEAR(resonance_field(p), 0.0, 1e-12);
  NvParams q;
  q.g = 4.0;
  EXPECT_NEAR(resonance_field(q), 0.5 * resonance_field(NvParams{}), 1e-9);
}

TEST(ResonanceField, FormulaMatchesEigensolverBracketing) {
  for (double d : {2000.0, 2880.0, 3500.0}) {
    NvParams p;
    p.D_mhz = d;
    EXPECT_LT(std::abs(resonance_field(p) - resonance_field_numeric(p)), 0.01) << d;
  }
}

TEST(Rwa, TwoLevelGaps) {
  const auto gap = [](double f1, double df) {
    const auto e = eigensystem(two_level_rwa(f1, df).matrix());
    return e.values(1) - e.values(0);
  };
  EXPECT_NEAR(gap(1.0, 0.0), 1.0, 1e-12);
  EXPECT_NEAR(gap(1.0, 1.0), std::sqrt(2.0), 1e-12);
  const Matrix m = two_level_rwa(0.0, 1.5).matrix();
  EXPECT_NEAR(std::abs(m(0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(m(1, 1).real(), 1.5, 1e-15);
}

TEST(Rwa, FrameOfNvOnResonance) {
  const NvParams p;
  const double b = 850.0;
  DriveParams d;
  d.f1_mhz = 2.0;
  d.f_rf_mhz = nv_transition_mhz(b, p);
  const auto frame = rotating_frame(h_nv(b, p), nv_system(p), d, AddressedTransition{}, {}, b);
  EXPECT_EQ(frame.system.total_dim(), 2);
  const auto e = eigensystem(frame.hamiltonian.matrix());
  EXPECT_NEAR(e.values(1) - e.values(0), 2.0, 1e-9);
  EXPECT_NEAR(frame.transition_mhz, d.f_rf_mhz, 1e-9);
  EXPECT_GT(frame.leakage_detuning_mhz, 1000.0);
  // detuned drive: level gap sqrt(f1^2 + df^2)
  d.f_rf_mhz -= 1.5;
  const auto f2 = rotating_frame(h_nv(b, p), nv_system(p), d, AddressedTransition{}, {}, b);
  const auto e2 = eigensystem(f2.hamiltonian.matrix());
  EXPECT_NEAR(e2.values(1) - e2.values(0), 2.5, 1e-9);
}

TEST(Drive, FromB1) {
  const auto d = DriveParams::from_b1(2600.0, 1.0, NvParams{}.gamma());
  EXPECT_NEAR(d.f1_mhz, 1.3996245, 1e-9);
  EXPECT_NEAR(d.f1_mhz, 1.4, 0.01);
}

TEST(Joint, HermitianAndDimension) {
  NvParams nv;
  BathParams bath;
  bath.n_spins = 2;
  bath.couplings = {DipolarCoupling::direct(0.5), DipolarCoupling::geometric(3.0, Eigen::Vector3d(1, 0, 0))};
  const auto h = h_joint(514.4, nv, bath);
  EXPECT_EQ(h.dim(), 12);
  EXPECT_LT(hermiticity_error(h.matrix()), 1e-12);
}
