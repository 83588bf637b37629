#pragma once

// Pulse sequences of the optically detected experiments: laser
// initialization, RF manipulation in the dark, laser readout.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nvsim/dynamics.hpp"
#include "nvsim/hamiltonian.hpp"

namespace nvsim {

enum class SegmentKind { LaserInit, RfPulse, Delay, Readout };

const char* to_string(SegmentKind kind);

struct Segment {
  SegmentKind kind = SegmentKind::Delay;
  double duration_us = 0.0;
  // RfPulse
  double f1_mhz = 0.0;
  double phase_rad = 0.0;
  // LaserInit
  double polarization = 0.9;
  // Readout
  double contrast = 0.3;
  double photon_budget = 1.0;  // expected counts per repetition from m_S = 0

  static Segment laser_init(double duration_us, double polarization);
  static Segment rf_pulse(double duration_us, double f1_mhz, double phase_rad = 0.0);
  static Segment delay(double duration_us);
  static Segment readout(double duration_us, double contrast, double photon_budget);
};

struct PulseSequence {
  std::vector<Segment> segments;
  int repetitions = 1000;

  // Exactly one Readout (last), at most one LaserInit (first), no laser
  // segment anywhere in between the RF/delay block.
  void validate() const;
  double total_duration_us() const;
};

class InvalidSequence : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double pi_duration(double f1_mhz);
double pi2_duration(double f1_mhz);

// Laser/readout settings shared by the standard sequences. Laser durations
// are bookkeeping only: polarization is specified directly.
struct OpticalSettings {
  double polarization = 0.9;
  double init_us = 5.0;
  double contrast = 0.3;
  double photon_budget = 1.0;
  double readout_us = 2.0;
  int repetitions = 1000;
};

PulseSequence rabi_sequence(double width_us, const DriveParams& drive,
                            const OpticalSettings& optics = {});
// pi/2 - tau1 - pi - tau2 - pi/2
PulseSequence hahn_sequence(double tau1_us, double tau2_us, const DriveParams& drive,
                            const OpticalSettings& optics = {});
// pi/2 - t - pi/2
PulseSequence ramsey_sequence(double free_us, const DriveParams& drive,
                              const OpticalSettings& optics = {});

// Rotating-frame description of the simulated spins plus Markovian terms.
// The addressed N-V pair must be site 0 of frame.system.
struct SpinModel {
  RotatingFrame frame;
  std::vector<CollapseOperator> collapse;
  DensityMatrix rest_state;  // state of every factor after the N-V pair

  int pair_dim() const { return 2; }
  int rest_dim() const { return frame.system.total_dim() / 2; }
};

// Pure dephasing (coherence decay gamma_phi) and -1 -> 0 relaxation on the pair.
std::vector<CollapseOperator> pair_collapse_ops(const RotatingFrame& frame,
                                                const NoiseModel& noise);

SpinModel make_spin_model(RotatingFrame frame, const NoiseModel& noise,
                          std::vector<CollapseOperator> extra = {},
                          std::optional<DensityMatrix> rest_state = std::nullopt);

enum class ReadoutMode { Expected, Poisson };

double readout_intensity(double p0, double contrast, double photon_budget);
// Mean counts per repetition of a Poisson total over `repetitions` shots,
// drawn from the generator of (seed, point).
double sample_intensity(double mean, int repetitions, std::uint64_t seed, std::uint64_t point);

struct ReadoutResult {
  double p0 = 1.0;
  double intensity = 0.0;          // expected counts per repetition
  double sampled_intensity = 0.0;  // Poisson mode: mean counts over repetitions
  std::vector<std::string> warnings;
};

struct RunOptions {
  ReadoutMode mode = ReadoutMode::Expected;
  std::uint64_t count_seed = 0;
  int threads = 1;
};

// Final P_{m_S=0} of one noise realization (extra detuning on m_b).
double run_sample(const PulseSequence& seq, const SpinModel& model, double detuning_mhz);

ReadoutResult run_sequence(const PulseSequence& seq, const SpinModel& model,
                           const NoiseModel& noise, const RunOptions& options = {});

// run_sequence for every duration of segment `index`, evaluated incrementally.
// Durations must be non-decreasing. Point k uses count sub-seed k.
std::vector<ReadoutResult> sweep_duration(const PulseSequence& seq, std::size_t index,
                                          std::span<const double> durations,
                                          const SpinModel& model, const NoiseModel& noise,
                                          const RunOptions& options = {});

}  // namespace nvsim
