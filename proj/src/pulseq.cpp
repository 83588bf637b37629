#include "nvsim/pulseq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "nvsim/parallel.hpp"
#include "nvsim/random.hpp"

namespace nvsim {

const char* to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::LaserInit: return "laser_init";
    case SegmentKind::RfPulse: return "rf_pulse";
    case SegmentKind::Delay: return "delay";
    case SegmentKind::Readout: return "readout";
  }
  return "unknown";
}

Segment Segment::laser_init(double duration_us, double polarization) {
  Segment s;
  s.kind = SegmentKind::LaserInit;
  s.duration_us = duration_us;
  s.polarization = polarization;
  return s;
}

Segment Segment::rf_pulse(double duration_us, double f1_mhz, double phase_rad) {
  Segment s;
  s.kind = SegmentKind::RfPulse;
  s.duration_us = duration_us;
  s.f1_mhz = f1_mhz;
  s.phase_rad = phase_rad;
  return s;
}

Segment Segment::delay(double duration_us) {
  Segment s;
  s.kind = SegmentKind::Delay;
  s.duration_us = duration_us;
  return s;
}

Segment Segment::readout(double duration_us, double contrast, double photon_budget) {
  Segment s;
  s.kind = SegmentKind::Readout;
  s.duration_us = duration_us;
  s.contrast = contrast;
  s.photon_budget = photon_budget;
  return s;
}

void PulseSequence::validate() const {
  if (segments.empty()) throw InvalidSequence("pulse sequence is empty");
  if (repetitions < 1) throw InvalidSequence("pulse sequence repetitions must be >= 1");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    const std::string where = "segment " + std::to_string(i) + " (" + to_string(s.kind) + ")";
    if (!std::isfinite(s.duration_us) || s.duration_us < 0.0) {
      throw InvalidSequence(where + ": duration must be finite and >= 0");
    }
    switch (s.kind) {
      case SegmentKind::LaserInit:
        if (i != 0) throw InvalidSequence(where + ": laser initialization must come first");
        if (s.polarization < 0.0 || s.polarization > 1.0) {
          throw InvalidSequence(where + ": polarization must lie in [0, 1]");
        }
        break;
      case SegmentKind::RfPulse:
        if (!std::isfinite(s.f1_mhz) || s.f1_mhz < 0.0) {
          throw InvalidSequence(where + ": f1 must be finite and >= 0");
        }
        break;
      case SegmentKind::Delay: break;
      case SegmentKind::Readout:
        if (i + 1 != segments.size()) throw InvalidSequence(where + ": readout must be last");
        if (s.contrast < 0.0 || s.contrast > 1.0) {
          throw InvalidSequence(where + ": contrast must lie in [0, 1]");
        }
        if (s.photon_budget < 0.0) throw InvalidSequence(where + ": photon budget must be >= 0");
        break;
    }
  }
  if (segments.back().kind != SegmentKind::Readout) {
    throw InvalidSequence("pulse sequence must end with a readout");
  }
}

double PulseSequence::total_duration_us() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration_us;
  return t;
}

double pi_duration(double f1_mhz) {
  if (!(f1_mhz > 0.0)) throw std::invalid_argument("pi_duration: f1 must be > 0");
  return 1.0 / (2.0 * f1_mhz);
}

double pi2_duration(double f1_mhz) {
  if (!(f1_mhz > 0.0)) throw std::invalid_argument("pi2_duration: f1 must be > 0");
  return 1.0 / (4.0 * f1_mhz);
}

namespace {

PulseSequence framed(std::vector<Segment> body, const OpticalSettings& o) {
  PulseSequence seq;
  seq.repetitions = o.repetitions;
  seq.segments.push_back(Segment::laser_init(o.init_us, o.polarization));
  for (auto& s : body) seq.segments.push_back(s);
  seq.segments.push_back(Segment::readout(o.readout_us, o.contrast, o.photon_budget));
  return seq;
}

}  // namespace

PulseSequence rabi_sequence(double width_us, const DriveParams& drive, const OpticalSettings& o) {
  return framed({Segment::rf_pulse(width_us, drive.f1_mhz, drive.phase_rad)}, o);
}

PulseSequence hahn_sequence(double tau1_us, double tau2_us, const DriveParams& drive,
                            const OpticalSettings& o) {
  const double p2 = pi2_duration(drive.f1_mhz);
  const double p = pi_duration(drive.f1_mhz);
  return framed({Segment::rf_pulse(p2, drive.f1_mhz, drive.phase_rad), Segment::delay(tau1_us),
                 Segment::rf_pulse(p, drive.f1_mhz, drive.phase_rad), Segment::delay(tau2_us),
                 Segment::rf_pulse(p2, drive.f1_mhz, drive.phase_rad)},
                o);
}

PulseSequence ramsey_sequence(double free_us, const DriveParams& drive, const OpticalSettings& o) {
  const double p2 = pi2_duration(drive.f1_mhz);
  return framed({Segment::rf_pulse(p2, drive.f1_mhz, drive.phase_rad), Segment::delay(free_us),
                 Segment::rf_pulse(p2, drive.f1_mhz, drive.phase_rad)},
                o);
}

std::vector<CollapseOperator> pair_collapse_ops(const RotatingFrame& frame,
                                                const NoiseModel& noise) {
  std::vector<CollapseOperator> ops;
  if (noise.gamma_phi > 0.0) {
    // L = Pa - Pb at rate gamma_phi/2 decays the coherence as exp(-gamma_phi t)
    ops.push_back({frame.lower_projector - frame.upper_projector, 0.5 * noise.gamma_phi});
  }
  if (noise.gamma_1 > 0.0) ops.push_back({frame.pair_lowering, noise.gamma_1});
  return ops;
}

SpinModel make_spin_model(RotatingFrame frame, const NoiseModel& noise,
                          std::vector<CollapseOperator> extra,
                          std::optional<DensityMatrix> rest_state) {
  if (frame.system.size() == 0 || frame.system.spins()[0].label != kNvLabel ||
      frame.system.site_dim(0) != 2) {
    throw std::invalid_argument("make_spin_model: the addressed N-V pair must be site 0");
  }
  SpinModel model;
  model.collapse = pair_collapse_ops(frame, noise);
  for (auto& c : extra) model.collapse.push_back(std::move(c));
  const int rest = frame.system.total_dim() / 2;
  if (rest_state) {
    if (rest_state->dim() != rest) {
      throw DimensionMismatch("make_spin_model: rest state dimension " +
                              std::to_string(rest_state->dim()) + " vs " + std::to_string(rest));
    }
    model.rest_state = *rest_state;
  } else {
    model.rest_state = DensityMatrix::maximally_mixed(rest);
  }
  model.frame = std::move(frame);
  return model;
}

double readout_intensity(double p0, double contrast, double photon_budget) {
  return photon_budget * (1.0 - contrast * (1.0 - p0));
}

double sample_intensity(double mean, int repetitions, std::uint64_t seed, std::uint64_t point) {
  if (mean <= 0.0) return 0.0;
  auto engine = make_engine(sub_seed(seed, point), 0);
  // total counts over all repetitions is Poisson with the summed mean
  std::poisson_distribution<long long> dist(mean * repetitions);
  return static_cast<double>(dist(engine)) / repetitions;
}

namespace {

// Propagator for one constant generator, applicable for any duration.
class Evolver {
 public:
  Evolver(const Hamiltonian& h, std::span<const CollapseOperator> ops) : dim_(h.dim()) {
    bool dissipative = false;
    for (const auto& c : ops) dissipative = dissipative || c.rate > 0.0;
    if (dissipative) {
      liouvillian_ = liouvillian(h, ops);
    } else {
      eig_ = eigensystem(h.matrix());
    }
    unitary_ = !dissipative;
  }

  Matrix apply(const Matrix& rho, double t) {
    if (t == 0.0) return rho;
    if (unitary_) {
      const Matrix u = expm_unitary(eig_, t);
      return u * rho * u.adjoint();
    }
    return unvec(propagator(t) * vec(rho), dim_);
  }

 private:
  const Matrix& propagator(double t) {
    auto it = cache_.lower_bound(t * (1.0 - 1e-12));
    if (it != cache_.end() && std::abs(it->first - t) <= 1e-12 * std::abs(t)) return it->second;
    Matrix p = (liouvillian_ * Complex(t, 0.0)).exp();
    return cache_.emplace(t, std::move(p)).first->second;
  }

  int dim_;
  bool unitary_ = true;
  Eigensystem eig_;
  Matrix liouvillian_;
  std::map<double, Matrix> cache_;
};

Hamiltonian segment_hamiltonian(const Segment& s, const SpinModel& model, double detuning) {
  Matrix h = model.frame.undriven.matrix() + detuning * model.frame.upper_projector;
  if (s.kind == SegmentKind::RfPulse) h += model.frame.drive_term(s.f1_mhz, s.phase_rad);
  return Hamiltonian(std::move(h));
}

Matrix laser_reset(const Matrix& rho, double polarization) {
  Matrix pair(2, 2);
  pair << Complex(0.5 * (1.0 + polarization), 0.0), 0.0, 0.0,
      Complex(0.5 * (1.0 - polarization), 0.0);
  const DensityMatrix rest = trace_out_left(DensityMatrix::unchecked(rho), 2);
  return Eigen::kroneckerProduct(pair, rest.matrix()).eval();
}

Matrix initial_state(const SpinModel& model) {
  return Eigen::kroneckerProduct(Matrix::Identity(2, 2) * 0.5, model.rest_state.matrix()).eval();
}

double p0_of(const Matrix& rho, const SpinModel& model) {
  return std::clamp((model.frame.lower_projector * rho).trace().real(), 0.0, 1.0);
}

// State evolution of one noise realization over segments [begin, end).
class SampleRunner {
 public:
  SampleRunner(const PulseSequence& seq, const SpinModel& model, double detuning)
      : seq_(seq), model_(model), detuning_(detuning) {}

  Matrix run(Matrix rho, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Segment& s = seq_.segments[i];
      switch (s.kind) {
        case SegmentKind::LaserInit: rho = laser_reset(rho, s.polarization); break;
        case SegmentKind::Readout: break;
        case SegmentKind::RfPulse:
        case SegmentKind::Delay: rho = evolver(i).apply(rho, s.duration_us); break;
      }
    }
    return rho;
  }

  Evolver& evolver(std::size_t i) {
    if (auto it = owner_.find(i); it != owner_.end()) return *evolvers_.at(it->second);
    const Segment& s = seq_.segments[i];
    // segments with identical generators share one evolver
    for (auto& [j, ev] : evolvers_) {
      const Segment& o = seq_.segments[j];
      if (o.kind == s.kind && o.f1_mhz == s.f1_mhz && o.phase_rad == s.phase_rad) {
        owner_[i] = j;
        return *ev;
      }
    }
    owner_[i] = i;
    auto ev = std::make_unique<Evolver>(segment_hamiltonian(s, model_, detuning_), model_.collapse);
    return *evolvers_.emplace(i, std::move(ev)).first->second;
  }

 private:
  const PulseSequence& seq_;
  const SpinModel& model_;
  double detuning_;
  std::map<std::size_t, std::unique_ptr<Evolver>> evolvers_;
  std::map<std::size_t, std::size_t> owner_;
};

std::vector<std::string> leakage_warnings(const PulseSequence& seq, const SpinModel& model) {
  std::vector<std::string> out;
  double f1_max = 0.0;
  for (const auto& s : seq.segments) {
    if (s.kind == SegmentKind::RfPulse) f1_max = std::max(f1_max, s.f1_mhz);
  }
  const double gap = model.frame.leakage_detuning_mhz;
  if (f1_max > 0.0 && gap < 20.0 * f1_max) {
    std::ostringstream msg;
    msg << "rotating-wave approximation questionable: nearest neglected transition is " << gap
        << " MHz from the drive, f1 = " << f1_max << " MHz";
    out.push_back(msg.str());
  }
  return out;
}

ReadoutResult finish(double p0, const Segment& readout, int repetitions, ReadoutMode mode,
                     std::uint64_t seed, std::uint64_t point) {
  ReadoutResult r;
  r.p0 = p0;
  r.intensity = readout_intensity(p0, readout.contrast, readout.photon_budget);
  r.sampled_intensity = r.intensity;
  if (mode == ReadoutMode::Poisson) {
    r.sampled_intensity = sample_intensity(r.intensity, repetitions, seed, point);
  }
  return r;
}

void check_model(const PulseSequence& seq, const SpinModel& model) {
  seq.validate();
  if (model.frame.system.total_dim() != 2 * model.rest_state.dim()) {
    throw DimensionMismatch("spin model rest state does not match the frame");
  }
}

}  // namespace

double run_sample(const PulseSequence& seq, const SpinModel& model, double detuning_mhz) {
  check_model(seq, model);
  SampleRunner runner(seq, model, detuning_mhz);
  return p0_of(runner.run(initial_state(model), 0, seq.segments.size()), model);
}

ReadoutResult run_sequence(const PulseSequence& seq, const SpinModel& model,
                           const NoiseModel& noise, const RunOptions& options) {
  check_model(seq, model);
  noise.validate();
  const auto samples = detuning_samples(noise);
  std::vector<double> p(samples.size());
  parallel_for(samples.size(), options.threads, [&](std::size_t i) {
    SampleRunner runner(seq, model, samples[i].detuning_mhz);
    p[i] = p0_of(runner.run(initial_state(model), 0, seq.segments.size()), model);
  });
  double p0 = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) p0 += samples[i].weight * p[i];
  ReadoutResult r =
      finish(p0, seq.segments.back(), seq.repetitions, options.mode, options.count_seed, 0);
  r.warnings = leakage_warnings(seq, model);
  return r;
}

std::vector<ReadoutResult> sweep_duration(const PulseSequence& seq, std::size_t index,
                                          std::span<const double> durations,
                                          const SpinModel& model, const NoiseModel& noise,
                                          const RunOptions& options) {
  check_model(seq, model);
  noise.validate();
  if (index >= seq.segments.size()) throw InvalidSequence("sweep_duration: index out of range");
  const SegmentKind kind = seq.segments[index].kind;
  if (kind != SegmentKind::RfPulse && kind != SegmentKind::Delay) {
    throw InvalidSequence("sweep_duration: only RF pulses and delays can be swept");
  }
  for (std::size_t k = 0; k < durations.size(); ++k) {
    if (!std::isfinite(durations[k]) || durations[k] < 0.0) {
      throw InvalidSequence("sweep_duration: durations must be finite and >= 0");
    }
    if (k > 0 && durations[k] < durations[k - 1]) {
      throw InvalidSequence("sweep_duration: durations must be non-decreasing");
    }
  }
  const auto samples = detuning_samples(noise);
  const std::size_t n = durations.size();
  std::vector<std::vector<double>> p(samples.size(), std::vector<double>(n));
  parallel_for(samples.size(), options.threads, [&](std::size_t i) {
    SampleRunner runner(seq, model, samples[i].detuning_mhz);
    Matrix rho = runner.run(initial_state(model), 0, index);
    Evolver& swept = runner.evolver(index);
    double t = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      rho = swept.apply(rho, durations[k] - t);
      t = durations[k];
      p[i][k] = p0_of(runner.run(rho, index + 1, seq.segments.size()), model);
    }
  });
  std::vector<ReadoutResult> out(n);
  const auto warnings = leakage_warnings(seq, model);
  for (std::size_t k = 0; k < n; ++k) {
    double p0 = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) p0 += samples[i].weight * p[i][k];
    out[k] = finish(p0, seq.segments.back(), seq.repetitions, options.mode, options.count_seed, k);
    out[k].warnings = warnings;
  }
  return out;
}

}  // namespace nvsim
