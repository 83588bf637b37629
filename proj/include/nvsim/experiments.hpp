#pragma once

// Experiment drivers. Each produces named traces, fits of selected trace
// columns and derived scalars.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nvsim/dynamics.hpp"
#include "nvsim/fitting.hpp"
#include "nvsim/hamiltonian.hpp"
#include "nvsim/pulseq.hpp"
#include "nvsim/trace.hpp"

namespace nvsim {

struct ReadoutParams {
  OpticalSettings optics;
  bool poisson = false;
};

struct SweepGrid {
  std::vector<double> values;  // empty: experiment default

  static SweepGrid linspace(double start, double stop, int points);
  bool empty() const { return values.empty(); }
  // Nonempty, strictly increasing, finite.
  void validate(const std::string& what) const;
};

struct EsrSettings {
  double pump_rate = 1.0;  // optical pumping -1 -> 0 under CW laser, us^-1
  double span_mhz = 20.0;  // default grid: transition +- span
  int points = 201;
};

struct RabiSettings {
  std::vector<double> powers{1.0};  // relative RF power; f1 scales as sqrt(power)
  double t_max_us = 4.0;
  int points = 200;
};

struct EchoSettings {
  double tau_min_us = 0.25;
  double tau_max_us = 12.0;
  int points = 48;
  // second sweep: tau2 around a fixed tau1
  double tau1_us = 2.0;
  double tau2_halfwidth_us = 0.5;
  int tau2_points = 41;
};

struct FieldSweepSettings {
  double start_gauss = 499.0;
  double stop_gauss = 530.0;
  int points = 60;
  double f1_mhz = 5.0;
  double wait_us = 10.0;  // dark interval of the init-wait-readout cycle
  double rabi_t_max_us = 4.0;
  int rabi_points = 200;
};

struct TrendSettings {
  std::vector<double> couplings_mhz{0.1, 0.3, 1.0};
  // quasi-static noise of each center: sigma = sigma_per_coupling * coupling
  double sigma_per_coupling = 2.8;
  double b_rabi_gauss = 850.0;
  double off_resonance_offset_gauss = 20.0;
};

struct ExperimentConfig {
  NvParams nv;
  BathParams bath;
  NoiseModel noise;
  ReadoutParams readout;
  DriveParams drive;             // f1 at unit power, phase; f_rf derived
  double drive_detuning_mhz = 0; // f_transition - f_rf
  double b_gauss = 850.0;
  SweepGrid sweep;
  EsrSettings esr;
  RabiSettings rabi;
  EchoSettings echo;
  FieldSweepSettings fieldsweep;
  TrendSettings trend;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
};

struct NamedTrace {
  std::string name;
  Trace trace;
};

struct FitRecord {
  std::string trace;
  std::string column;
  FitResult fit;
};

struct SweepResult {
  std::vector<NamedTrace> traces;
  std::vector<FitRecord> fits;
  std::map<std::string, double> derived;
  std::vector<std::string> warnings;

  const Trace& trace(const std::string& name) const;
  const FitResult& fit(const std::string& trace_name, const std::string& column = "") const;
  double value(const std::string& name) const;
};

// Two-level NV model at cfg.b_gauss in the frame of f_rf (for the given f1).
SpinModel nv_pair_model(const ExperimentConfig& cfg, double b_gauss, double f_rf_mhz,
                        double f1_mhz, const NoiseModel& noise);
// NV pair + explicit bath spins in the doubly rotating frame; bath electrons
// start maximally mixed and dephase at bath.dephasing_rate.
SpinModel nv_bath_model(const ExperimentConfig& cfg, double b_gauss, double f_rf_mhz,
                        double f1_mhz, const NoiseModel& noise);

SweepResult exp_cw_esr(const ExperimentConfig& cfg, const SweepGrid& f_grid = {});
SweepResult exp_rabi(const ExperimentConfig& cfg, const SweepGrid& t_grid = {});
SweepResult exp_hahn(const ExperimentConfig& cfg, const SweepGrid& tau_grid = {});
SweepResult exp_field_sweep(const ExperimentConfig& cfg, const SweepGrid& b_grid = {});
// One config per center; each uses its own bath and noise.
SweepResult exp_t2p_vs_dip(const std::vector<ExperimentConfig>& centers);
// Centers built from cfg.trend (couplings and proportional sigma).
std::vector<ExperimentConfig> trend_centers(const ExperimentConfig& cfg);
SweepResult exp_levels(const ExperimentConfig& cfg, const SweepGrid& b_grid = {});

// Ramsey (pi/2 - t - pi/2) signal P0 vs free time, pair model.
Trace ramsey_trace(const ExperimentConfig& cfg, const SweepGrid& t_grid);

// Number of discrete-spectrum peaks above half maximum of a trace column
// (frequencies above f_min only).
int count_spectral_peaks(const Trace& t, const std::string& column, double f_min = 0.0);

}  // namespace nvsim
