#include <gtest/gtest.h>

#include <cmath>

#include "nvsim/config.hpp"
#include "nvsim/experiments.hpp"

using namespace nvsim;

namespace {

ExperimentConfig from_text(const std::string& text) { return parse_config(text).experiment; }

ExperimentConfig load(const std::string& name) {
  return load_config(std::string(NVSIM_SOURCE_DIR) + "/configs/" + name).experiment;
}

std::vector<std::size_t> local_minima(const std::vector<double>& y) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (y[i] < y[i - 1] && y[i] <= y[i + 1]) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST(Esr, DipAt100G) {
  const auto cfg = load("esr_100G.cfg");
  const auto r = exp_cw_esr(cfg, cfg.sweep);
  EXPECT_LE(std::abs(r.value("dip_frequency_mhz") - r.value("transition_mhz")), r.value("grid_step_mhz"));
  EXPECT_NEAR(r.value("transition_mhz"), 2600.1, 0.05);
  EXPECT_LT(r.value("endpoint_deviation"), 0.01);
  EXPECT_NEAR(r.value("fit_center_mhz"), r.value("transition_mhz"), 0.01);
}

TEST(Esr, PropertyTracksTransitionAcrossFields) {
  for (double b : {50.0, 100.0, 200.0}) {
    ExperimentConfig cfg = from_text("noise.sigma_static_mhz = 0\nnoise.n_samples = 1\ndrive.f1_mhz = 0.5\n");
    cfg.b_gauss = b;
    const double f = nv_transition_mhz(b, cfg.nv);
    const auto r = exp_cw_esr(cfg, SweepGrid::linspace(f - 5.03, f + 4.97, 101));
    EXPECT_LE(std::abs(r.value("dip_frequency_mhz") - f), r.value("grid_step_mhz")) << b;
  }
}

TEST(Esr, PowerBroadening) {
  double prev = 0.0;
  for (double f1 : {0.2, 0.5, 1.0}) {
    ExperimentConfig cfg = from_text("nv.b_gauss = 100\nnoise.sigma_static_mhz = 0\nnoise.n_samples = 1\n");
    cfg.drive.f1_mhz = f1;
    const double f = nv_transition_mhz(100.0, cfg.nv);
    const auto r = exp_cw_esr(cfg, SweepGrid::linspace(f - 6, f + 6, 121));
    EXPECT_GT(r.value("fit_fwhm_mhz"), prev);
    prev = r.value("fit_fwhm_mhz");
  }
}

TEST(Rabi, SqrtPowerScalingAndT2pGrowsWithF1) {
  const auto cfg = load("standard.cfg");
  const auto r = exp_rabi(cfg);
  EXPECT_NEAR(r.value("f1_ratio_p4"), 2.0, 0.02);
  EXPECT_NEAR(r.value("f1_ratio_p9"), 3.0, 0.03);
  EXPECT_LT(r.value("T2p_us_p1"), r.value("T2p_us_p4"));
  EXPECT_LT(r.value("T2p_us_p4"), r.value("T2p_us_p9"));
  const Trace& t = r.trace("rabi");
  EXPECT_EQ(t.x_name, "t_us");
  EXPECT_EQ(t.columns.at(0).first, "I_pl_p1");
}

TEST(Rabi, NoiseOffIsUndamped) {
  const auto cfg = from_text("noise.sigma_static_mhz = 0\nnoise.gamma_phi = 0\nnoise.n_samples = 1\nrabi.powers = 1\n");
  const auto r = exp_rabi(cfg);
  const auto& f = r.fit("rabi");
  EXPECT_LT(f.residual_norm, 1e-6);
  EXPECT_TRUE(f.has_flag("T2p_us", "at_upper_bound"));
  EXPECT_NEAR(r.value("f1_fit_mhz_p1"), cfg.drive.f1_mhz, 1e-6);
}

TEST(Rabi, SingleNuclearStateGivesOneFrequency) {
  auto cfg = load("beating.cfg");
  cfg.noise.nuclear.populations = {1.0, 0.0, 0.0};
  const Trace t = exp_rabi(cfg).trace("rabi");
  EXPECT_EQ(count_spectral_peaks(t, t.columns.at(0).first, 0.5), 1);
  cfg.noise.nuclear.populations = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  const Trace b = exp_rabi(cfg).trace("rabi");
  EXPECT_EQ(count_spectral_peaks(b, b.columns.at(0).first, 0.5), 3);
}

TEST(Rabi, BitReproducibleAcrossThreads) {
  auto cfg = load("standard.cfg");
  cfg.readout.poisson = true;
  cfg.noise.n_samples = 64;
  const auto a = exp_rabi(cfg);
  cfg.threads = 3;
  const auto b = exp_rabi(cfg);
  for (std::size_t c = 0; c < a.trace("rabi").columns.size(); ++c) {
    EXPECT_EQ(a.trace("rabi").columns[c].second, b.trace("rabi").columns[c].second);
  }
  EXPECT_EQ(a.derived, b.derived);
}

TEST(Hahn, MarkovianOnlyGivesInverseRate) {
  const auto cfg = from_text(
      "noise.sigma_static_mhz = 0\nnoise.gamma_phi = 0.16666666666666666\nnoise.n_samples = 1\n");
  const auto r = exp_hahn(cfg);
  EXPECT_NEAR(r.value("T2_us") / 6.0, 1.0, 0.02);
}

TEST(Hahn, NoNoiseIsFlat) {
  const auto cfg = from_text("noise.sigma_static_mhz = 0\nnoise.gamma_phi = 0\nnoise.n_samples = 1\n");
  const auto r = exp_hahn(cfg);
  for (double v : r.trace("echo").column("P0")) EXPECT_NEAR(v, cfg.readout.optics.polarization * 0.5 + 0.5, 1e-9);
}

TEST(Hahn, StandardScenario) {
  const auto r = exp_hahn(load("standard.cfg"));
  EXPECT_NEAR(r.value("T2_us") / 6.0, 1.0, 0.05);
  EXPECT_GE(r.value("T2_over_T2p"), 2.5);
  EXPECT_LE(r.value("T2_over_T2p"), 3.5);
  EXPECT_LE(std::abs(r.value("tau2_argmax_us") - r.value("tau1_us")), r.value("tau2_step_us") + 1e-9);
}

TEST(Hahn, StaticNoiseRefocused) {
  const auto r = exp_hahn(load("echo_static.cfg"));
  EXPECT_LT(r.value("static_echo_deficit"), 1e-3);
  EXPECT_GE(r.value("static_ramsey_deficit"), 10.0 * r.value("static_echo_deficit"));
}

TEST(FieldSweep, CoincidentCentersAndFlatBaseline) {
  const auto r = exp_field_sweep(load("fieldsweep.cfg"));
  EXPECT_NEAR(r.value("ipl_dip_center_gauss"), 514.4, 1.0);
  EXPECT_NEAR(r.value("rate_peak_center_gauss"), 514.4, 1.0);
  EXPECT_LT(r.value("center_difference_gauss"), 1.0);
  EXPECT_GT(r.value("off_resonance_points"), 5);
  EXPECT_LT(r.value("off_resonance_max_rel_dev"), 0.1);
  EXPECT_GT(r.value("dip_normalized"), 0.0);
}

TEST(FieldSweep, DecoupledLimit) {
  auto cfg = load("fieldsweep.cfg");
  cfg.bath.couplings = {DipolarCoupling::direct(0.0)};
  const auto r = exp_field_sweep(cfg, SweepGrid::linspace(505, 524, 20));
  const Trace& t = r.trace("fieldsweep");
  const auto& ipl = t.column("I_pl");
  const auto& rate = t.column("inv_T2p_per_us");
  for (std::size_t i = 1; i < t.size(); ++i) {
    EXPECT_NEAR(ipl[i], ipl[0], 1e-9);
    EXPECT_NEAR(rate[i] / rate[0], 1.0, 1e-3);
  }
}

TEST(FieldSweep, HyperfineSidepeaksSymmetric) {
  auto cfg = from_text("bath.include_nucleus = true\nnoise.sigma_static_mhz = 0\nnoise.n_samples = 1\n");
  const auto r = exp_field_sweep(cfg, SweepGrid::linspace(488, 541, 54));
  const Trace& t = r.trace("fieldsweep");
  const auto dips = local_minima(t.column("I_pl"));
  std::vector<double> neg_rate;
  for (double v : t.column("inv_T2p_per_us")) neg_rate.push_back(-v);
  const auto peaks = local_minima(neg_rate);
  for (const auto* idx : {&dips, &peaks}) {
    ASSERT_EQ(idx->size(), 3u);
    const double lo = t.x[(*idx)[0]], mid = t.x[(*idx)[1]], hi = t.x[(*idx)[2]];
    EXPECT_NEAR(mid, 514.4, 1.0);
    EXPECT_NEAR(0.5 * (lo + hi), 514.4, 1.5);
    EXPECT_GT(hi - lo, 20.0);
  }
}

TEST(Trend, StrictlyDecreasing) {
  const auto cfg = load("trend.cfg");
  const auto r = exp_t2p_vs_dip(trend_centers(cfg));
  EXPECT_EQ(r.value("strictly_decreasing"), 1.0);
  const Trace& t = r.trace("trend");
  ASSERT_EQ(t.size(), 3u);
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_GT(t.column("dip_normalized")[i], t.column("dip_normalized")[i - 1]);
    EXPECT_LT(t.column("T2p_us")[i], t.column("T2p_us")[i - 1]);
  }
}

TEST(Trend, DuplicateAndZeroCouplingCenters) {
  auto cfg = load("trend.cfg");
  cfg.trend.couplings_mhz = {0.0, 0.3, 0.3};
  const auto r = exp_t2p_vs_dip(trend_centers(cfg));
  const Trace& t = r.trace("trend");
  const auto& dip = t.column("dip_normalized");
  const auto& t2p = t.column("T2p_us");
  EXPECT_NEAR(dip[0], 0.0, 1e-9);
  EXPECT_EQ(dip[1], dip[2]);
  EXPECT_EQ(t2p[1], t2p[2]);
  EXPECT_GT(t2p[0], t2p[1]);
}

TEST(Levels, CrossingGeometry) {
  const auto cfg = load("levels.cfg");
  const auto r = exp_levels(cfg, cfg.sweep);
  const Trace& t = r.trace("levels");
  EXPECT_EQ(t.size(), 241u);
  EXPECT_NEAR(r.value("B_star_gauss"), 514.4, 0.05);
  EXPECT_LT(std::abs(r.value("B_star_gauss") - r.value("B_star_numeric_gauss")), 0.01);
  EXPECT_NEAR(r.value("B_level_crossing_gauss"), 1028.9, 0.1);
  const auto& fnv = t.column("f_nv_0_m1_mhz");
  const auto& fp1 = t.column("f_P1_mhz");
  // N-V 0 -> -1 splitting falls, P1 splitting rises; they cross once near B*
  int crossings = 0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if ((fnv[i] - fp1[i]) * (fnv[i - 1] - fp1[i - 1]) < 0) {
      ++crossings;
      EXPECT_LE(t.x[i - 1], r.value("B_star_gauss"));
      EXPECT_GE(t.x[i], r.value("B_star_gauss"));
    }
  }
  EXPECT_EQ(crossings, 1);
  EXPECT_NEAR(t.column("E_ms0_mhz")[0], 0.0, 1e-9);
  EXPECT_NEAR(t.column("E_ms-1_mhz")[0], 2880.0, 1e-9);
}

TEST(Config, ValidationRejectsBadGrid) {
  auto cfg = load("standard.cfg");
  cfg.sweep.values = {1.0, 0.5};
  EXPECT_THROW(exp_rabi(cfg, cfg.sweep), std::invalid_argument);
}
