#include "nvsim/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "nvsim/parallel.hpp"
#include "nvsim/random.hpp"

namespace nvsim {

SweepGrid SweepGrid::linspace(double start, double stop, int points) {
  if (points < 1) throw std::invalid_argument("grid needs at least one point");
  SweepGrid g;
  g.values.resize(static_cast<std::size_t>(points));
  if (points == 1) {
    g.values[0] = start;
    return g;
  }
  const double step = (stop - start) / (points - 1);
  for (int i = 0; i < points; ++i) g.values[static_cast<std::size_t>(i)] = start + step * i;
  g.values.back() = stop;
  return g;
}

void SweepGrid::validate(const std::string& what) const {
  if (values.empty()) throw std::invalid_argument(what + ": grid is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw std::invalid_argument(what + ": grid value not finite");
    if (i > 0 && !(values[i] > values[i - 1])) {
      throw std::invalid_argument(what + ": grid must be strictly increasing");
    }
  }
}

void ExperimentConfig::validate() const {
  nv.validate();
  bath.validate();
  noise.validate();
  drive.validate();
  const auto& o = readout.optics;
  if (o.polarization < 0.0 || o.polarization > 1.0) {
    throw std::invalid_argument("readout.polarization must lie in [0, 1]");
  }
  if (o.contrast < 0.0 || o.contrast > 1.0) {
    throw std::invalid_argument("readout.contrast must lie in [0, 1]");
  }
  if (o.photon_budget < 0.0) throw std::invalid_argument("readout.photon_budget must be >= 0");
  if (o.init_us < 0.0) throw std::invalid_argument("readout.init_us must be >= 0");
  if (o.readout_us < 0.0) throw std::invalid_argument("readout.readout_us must be >= 0");
  if (o.repetitions < 1) throw std::invalid_argument("readout.repetitions must be >= 1");
  if (b_gauss < 0.0) throw std::invalid_argument("nv.b_gauss must be >= 0");
  if (!sweep.empty()) sweep.validate("sweep");
  if (esr.pump_rate <= 0.0) throw std::invalid_argument("esr.pump_rate must be > 0");
  if (esr.span_mhz <= 0.0) throw std::invalid_argument("esr.span_mhz must be > 0");
  if (esr.points < 2) throw std::invalid_argument("esr.points must be >= 2");
  if (rabi.powers.empty()) throw std::invalid_argument("rabi.powers must not be empty");
  for (double p : rabi.powers) {
    if (!(p > 0.0)) throw std::invalid_argument("rabi.powers must be > 0");
  }
  if (rabi.t_max_us <= 0.0) throw std::invalid_argument("rabi.t_max_us must be > 0");
  if (rabi.points < 5) throw std::invalid_argument("rabi.points must be >= 5");
  if (echo.tau_min_us < 0.0) throw std::invalid_argument("echo.tau_min_us must be >= 0");
  if (echo.tau_max_us <= echo.tau_min_us) {
    throw std::invalid_argument("echo.tau_max_us must exceed echo.tau_min_us");
  }
  if (echo.points < 5) throw std::invalid_argument("echo.points must be >= 5");
  if (echo.tau1_us < 0.0) throw std::invalid_argument("echo.tau1_us must be >= 0");
  if (echo.tau2_halfwidth_us <= 0.0 || echo.tau2_halfwidth_us > echo.tau1_us) {
    throw std::invalid_argument("echo.tau2_halfwidth_us must lie in (0, echo.tau1_us]");
  }
  if (echo.tau2_points < 3) throw std::invalid_argument("echo.tau2_points must be >= 3");
  const auto& f = fieldsweep;
  if (f.stop_gauss <= f.start_gauss || f.start_gauss < 0.0) {
    throw std::invalid_argument("fieldsweep: need 0 <= start_gauss < stop_gauss");
  }
  if (f.points < 7) throw std::invalid_argument("fieldsweep.points must be >= 7");
  if (f.f1_mhz <= 0.0) throw std::invalid_argument("fieldsweep.f1_mhz must be > 0");
  if (f.wait_us < 0.0) throw std::invalid_argument("fieldsweep.wait_us must be >= 0");
  if (f.rabi_t_max_us <= 0.0) throw std::invalid_argument("fieldsweep.rabi_t_max_us must be > 0");
  if (f.rabi_points < 5) throw std::invalid_argument("fieldsweep.rabi_points must be >= 5");
  if (trend.couplings_mhz.empty()) throw std::invalid_argument("trend.couplings_mhz is empty");
  for (double c : trend.couplings_mhz) {
    if (c < 0.0) throw std::invalid_argument("trend.couplings_mhz must be >= 0");
  }
  if (trend.sigma_per_coupling < 0.0) {
    throw std::invalid_argument("trend.sigma_per_coupling must be >= 0");
  }
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

const Trace& SweepResult::trace(const std::string& name) const {
  for (const auto& t : traces) {
    if (t.name == name) return t.trace;
  }
  throw std::out_of_range("no trace named '" + name + "'");
}

const FitResult& SweepResult::fit(const std::string& trace_name, const std::string& column) const {
  for (const auto& f : fits) {
    if (f.trace == trace_name && (column.empty() || f.column == column)) return f.fit;
  }
  throw std::out_of_range("no fit for trace '" + trace_name + "' column '" + column + "'");
}

double SweepResult::value(const std::string& name) const {
  auto it = derived.find(name);
  if (it == derived.end()) throw std::out_of_range("no derived value '" + name + "'");
  return it->second;
}

namespace {

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

NoiseModel effective_noise(const ExperimentConfig& cfg) {
  NoiseModel n = cfg.noise;
  n.seed = cfg.seed;
  n.nuclear.A_par_mhz = cfg.nv.A_par_mhz;
  return n;
}

NvParams bare(const NvParams& p) {
  NvParams b = p;
  b.include_nucleus = false;
  return b;
}

RunOptions run_options(const ExperimentConfig& cfg, std::uint64_t stream, int threads) {
  RunOptions o;
  o.mode = cfg.readout.poisson ? ReadoutMode::Poisson : ReadoutMode::Expected;
  o.count_seed = sub_seed(cfg.seed, stream);
  o.threads = threads;
  return o;
}

void add_warnings(SweepResult& out, const std::vector<std::string>& w) {
  for (const auto& s : w) {
    if (std::find(out.warnings.begin(), out.warnings.end(), s) == out.warnings.end()) {
      out.warnings.push_back(s);
    }
  }
}

// Observed intensity column (sampled in Poisson mode) and P0 column.
void readout_columns(const std::vector<ReadoutResult>& rr, std::vector<double>& ipl,
                     std::vector<double>& p0) {
  ipl.clear();
  p0.clear();
  for (const auto& r : rr) {
    ipl.push_back(r.sampled_intensity);
    p0.push_back(r.p0);
  }
}

PulseSequence dark_sequence(double wait_us, const OpticalSettings& o) {
  PulseSequence seq;
  seq.repetitions = o.repetitions;
  seq.segments = {Segment::laser_init(o.init_us, o.polarization), Segment::delay(wait_us),
                  Segment::readout(o.readout_us, o.contrast, o.photon_budget)};
  return seq;
}

DriveParams drive_at(const ExperimentConfig& cfg, double f_rf, double f1) {
  DriveParams d = cfg.drive;
  d.f_rf_mhz = f_rf;
  d.f1_mhz = f1;
  return d;
}

double rf_for(const ExperimentConfig& cfg, double b_gauss) {
  return nv_transition_mhz(b_gauss, cfg.nv) - cfg.drive_detuning_mhz;
}

}  // namespace

SpinModel nv_pair_model(const ExperimentConfig& cfg, double b_gauss, double f_rf_mhz,
                        double f1_mhz, const NoiseModel& noise) {
  const NvParams nvp = bare(cfg.nv);
  RotatingFrame frame = rotating_frame(h_nv(b_gauss, nvp), nv_system(nvp),
                                       drive_at(cfg, f_rf_mhz, f1_mhz), AddressedTransition{},
                                       {}, b_gauss);
  return make_spin_model(std::move(frame), noise);
}

SpinModel nv_bath_model(const ExperimentConfig& cfg, double b_gauss, double f_rf_mhz,
                        double f1_mhz, const NoiseModel& noise) {
  const NvParams nvp = bare(cfg.nv);
  const SpinSystem system = joint_system(nvp, cfg.bath);
  std::vector<std::size_t> bath_sites;
  for (int k = 0; k < cfg.bath.n_spins; ++k) bath_sites.push_back(system.index_of(bath_label(k)));
  RotatingFrame frame = rotating_frame(h_joint(b_gauss, nvp, cfg.bath), system,
                                       drive_at(cfg, f_rf_mhz, f1_mhz), AddressedTransition{},
                                       bath_sites, b_gauss);
  std::vector<CollapseOperator> extra;
  if (cfg.bath.dephasing_rate > 0.0) {
    for (int k = 0; k < cfg.bath.n_spins; ++k) {
      const std::size_t e = frame.system.index_of(bath_label(k));
      // 2 Sz at rate Gamma/2: bath coherence decays at Gamma
      extra.push_back({2.0 * frame.system.sz(e), 0.5 * cfg.bath.dephasing_rate});
    }
  }
  return make_spin_model(std::move(frame), noise, std::move(extra));
}

// ---------------------------------------------------------------------------

SweepResult exp_cw_esr(const ExperimentConfig& cfg, const SweepGrid& f_grid) {
  cfg.validate();
  const double f_trans = nv_transition_mhz(cfg.b_gauss, cfg.nv);
  SweepGrid grid = f_grid;
  if (grid.empty()) grid = cfg.sweep;
  if (grid.empty()) {
    grid = SweepGrid::linspace(f_trans - cfg.esr.span_mhz, f_trans + cfg.esr.span_mhz,
                               cfg.esr.points);
  }
  grid.validate("esr frequency grid");
  const NoiseModel noise = effective_noise(cfg);
  const auto samples = detuning_samples(noise);
  const auto& o = cfg.readout.optics;
  const double f1 = cfg.drive.f1_mhz;

  const std::size_t n = grid.values.size();
  std::vector<double> p0(n);
  std::vector<std::string> warnings;
  parallel_for(n, cfg.threads, [&](std::size_t k) {
    SpinModel model = nv_pair_model(cfg, cfg.b_gauss, grid.values[k], f1, noise);
    std::vector<CollapseOperator> ops = model.collapse;
    ops.push_back({model.frame.pair_lowering, cfg.esr.pump_rate});
    double acc = 0.0;
    for (const auto& s : samples) {
      Hamiltonian h(model.frame.undriven.matrix() + s.detuning_mhz * model.frame.upper_projector +
                    model.frame.drive_term(f1, cfg.drive.phase_rad));
      const DensityMatrix rho = steady_state(h, ops);
      acc += s.weight * std::clamp(rho.expectation(model.frame.lower_projector), 0.0, 1.0);
    }
    p0[k] = acc;
  });

  Trace t;
  t.x_name = "f_rf_mhz";
  t.x = grid.values;
  std::vector<double> ipl(n);
  const std::uint64_t count_seed = sub_seed(cfg.seed, 11);
  for (std::size_t k = 0; k < n; ++k) {
    const double mean = readout_intensity(p0[k], o.contrast, o.photon_budget);
    ipl[k] = cfg.readout.poisson ? sample_intensity(mean, o.repetitions, count_seed, k) : mean;
  }
  t.add_column("I_pl", ipl);
  t.add_column("P0", p0);
  t.meta = "cw esr at B=" + num(cfg.b_gauss) + " G";

  SweepResult out;
  out.traces.push_back({"esr", t});
  const auto dip = std::min_element(ipl.begin(), ipl.end()) - ipl.begin();
  out.derived["transition_mhz"] = f_trans;
  out.derived["dip_frequency_mhz"] = grid.values[static_cast<std::size_t>(dip)];
  out.derived["grid_step_mhz"] = n > 1 ? (grid.values.back() - grid.values.front()) / (n - 1) : 0;
  const double i_off = readout_intensity(1.0, o.contrast, o.photon_budget);
  out.derived["rf_off_intensity"] = i_off;
  if (i_off > 0.0) {
    out.derived["endpoint_deviation"] =
        std::max(std::abs(ipl.front() - i_off), std::abs(ipl.back() - i_off)) / i_off;
  }
  if (n >= 7) {
    FitResult fit = fit_lorentzian(t);
    out.derived["fit_center_mhz"] = fit.param("center");
    out.derived["fit_fwhm_mhz"] = fit.param("fwhm");
    out.fits.push_back({"esr", "I_pl", std::move(fit)});
  }
  return out;
}

SweepResult exp_rabi(const ExperimentConfig& cfg, const SweepGrid& t_grid) {
  cfg.validate();
  SweepGrid grid = t_grid;
  if (grid.empty()) grid = cfg.sweep;
  if (grid.empty()) grid = SweepGrid::linspace(0.0, cfg.rabi.t_max_us, cfg.rabi.points);
  grid.validate("rabi pulse-width grid");
  const NoiseModel noise = effective_noise(cfg);
  const double f_rf = rf_for(cfg, cfg.b_gauss);

  SweepResult out;
  Trace t;
  t.x_name = "t_us";
  t.x = grid.values;
  t.meta = "rabi at B=" + num(cfg.b_gauss) + " G";
  std::vector<std::vector<double>> p0s;
  const auto& powers = cfg.rabi.powers;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    const double f1 = cfg.drive.f1_mhz * std::sqrt(powers[i]);
    const SpinModel model = nv_pair_model(cfg, cfg.b_gauss, f_rf, f1, noise);
    const PulseSequence seq = rabi_sequence(0.0, drive_at(cfg, f_rf, f1), cfg.readout.optics);
    const auto rr =
        sweep_duration(seq, 1, grid.values, model, noise, run_options(cfg, 100 + i, cfg.threads));
    std::vector<double> ipl, p0;
    readout_columns(rr, ipl, p0);
    if (!rr.empty()) add_warnings(out, rr.front().warnings);
    t.add_column("I_pl_p" + num(powers[i]), ipl);
    p0s.push_back(p0);
  }
  for (std::size_t i = 0; i < powers.size(); ++i) t.add_column("P0_p" + num(powers[i]), p0s[i]);
  out.traces.push_back({"rabi", t});

  double f_ref = 0.0;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    const std::string col = "I_pl_p" + num(powers[i]);
    FitResult fit = fit_damped_cosine(t.x, t.column(col));
    const std::string tag = "_p" + num(powers[i]);
    const double f = fit.param("f1_mhz");
    if (i == 0) f_ref = f;
    out.derived["f1_fit_mhz" + tag] = f;
    out.derived["f1_set_mhz" + tag] = cfg.drive.f1_mhz * std::sqrt(powers[i]);
    out.derived["T2p_us" + tag] = fit.param("T2p_us");
    out.derived["f1_ratio" + tag] = f_ref > 0.0 ? f / f_ref : 0.0;
    out.fits.push_back({"rabi", col, std::move(fit)});
  }
  out.derived["T2p_us"] = out.value("T2p_us_p" + num(powers[0]));
  return out;
}

namespace {

double pair_p0(const PulseSequence& seq, const ExperimentConfig& cfg, double f_rf,
               const NoiseModel& noise, int threads) {
  const SpinModel model = nv_pair_model(cfg, cfg.b_gauss, f_rf, cfg.drive.f1_mhz, noise);
  RunOptions opt;
  opt.threads = threads;
  return run_sequence(seq, model, noise, opt).p0;
}

}  // namespace

SweepResult exp_hahn(const ExperimentConfig& cfg, const SweepGrid& tau_grid) {
  cfg.validate();
  SweepGrid grid = tau_grid;
  if (grid.empty()) grid = cfg.sweep;
  if (grid.empty()) {
    grid = SweepGrid::linspace(cfg.echo.tau_min_us, cfg.echo.tau_max_us, cfg.echo.points);
  }
  grid.validate("echo tau grid");
  const NoiseModel noise = effective_noise(cfg);
  const double f_rf = rf_for(cfg, cfg.b_gauss);
  const double f1 = cfg.drive.f1_mhz;
  const DriveParams drive = drive_at(cfg, f_rf, f1);
  const SpinModel model = nv_pair_model(cfg, cfg.b_gauss, f_rf, f1, noise);
  const auto& o = cfg.readout.optics;

  SweepResult out;
  const std::size_t n = grid.values.size();
  std::vector<ReadoutResult> rr(n);
  for (std::size_t k = 0; k < n; ++k) {
    const PulseSequence seq = hahn_sequence(grid.values[k], grid.values[k], drive, o);
    RunOptions opt = run_options(cfg, 200, cfg.threads);
    rr[k] = run_sequence(seq, model, noise, opt);
    if (cfg.readout.poisson) {
      rr[k].sampled_intensity = sample_intensity(rr[k].intensity, o.repetitions, opt.count_seed, k);
    }
  }
  add_warnings(out, rr.front().warnings);
  Trace echo;
  echo.x_name = "total_delay_us";
  for (double tau : grid.values) echo.x.push_back(2.0 * tau);
  std::vector<double> ipl, p0;
  readout_columns(rr, ipl, p0);
  echo.add_column("I_pl", ipl);
  echo.add_column("P0", p0);
  echo.meta = "hahn echo tau1=tau2 at B=" + num(cfg.b_gauss) + " G";
  out.traces.push_back({"echo", echo});
  FitResult fit = fit_exp_decay(echo);
  out.derived["T2_us"] = fit.param("T_us");
  out.fits.push_back({"echo", "I_pl", std::move(fit)});

  // tau2 sweep at fixed tau1
  const double tau1 = cfg.echo.tau1_us;
  const SweepGrid g2 = SweepGrid::linspace(tau1 - cfg.echo.tau2_halfwidth_us,
                                           tau1 + cfg.echo.tau2_halfwidth_us,
                                           cfg.echo.tau2_points);
  const PulseSequence seq2 = hahn_sequence(tau1, 0.0, drive, o);
  const auto r2 = sweep_duration(seq2, 4, g2.values, model, noise, run_options(cfg, 201, cfg.threads));
  Trace sym;
  sym.x_name = "tau2_us";
  sym.x = g2.values;
  readout_columns(r2, ipl, p0);
  sym.add_column("I_pl", ipl);
  sym.add_column("P0", p0);
  sym.meta = "hahn echo tau2 sweep at tau1=" + num(tau1) + " us";
  out.traces.push_back({"echo_tau2", sym});
  const auto best = std::max_element(p0.begin(), p0.end()) - p0.begin();
  out.derived["tau1_us"] = tau1;
  out.derived["tau2_argmax_us"] = g2.values[static_cast<std::size_t>(best)];
  out.derived["tau2_step_us"] = g2.values[1] - g2.values[0];

  // Rabi decay at unit power for the T2 / T2' comparison
  ExperimentConfig rc = cfg;
  rc.rabi.powers = {1.0};
  rc.sweep = {};
  const SweepResult rabi = exp_rabi(rc);
  const double t2p = rabi.value("T2p_us");
  out.derived["T2p_rabi_us"] = t2p;
  out.derived["T2_over_T2p"] = out.value("T2_us") / t2p;

  // refocusing of quasi-static noise alone
  if (noise.sigma_static_mhz > 0.0) {
    NoiseModel stat = noise;
    stat.gamma_phi = 0.0;
    stat.gamma_1 = 0.0;
    NoiseModel none = stat;
    none.sigma_static_mhz = 0.0;
    none.nuclear.enabled = false;
    const double total = std::max(3.0 / (kTwoPi * noise.sigma_static_mhz), 2.0 * tau1);
    const PulseSequence e = hahn_sequence(0.5 * total, 0.5 * total, drive, o);
    const PulseSequence r = ramsey_sequence(total, drive, o);
    out.derived["refocus_total_delay_us"] = total;
    out.derived["static_echo_deficit"] =
        std::abs(pair_p0(e, cfg, f_rf, stat, cfg.threads) - pair_p0(e, cfg, f_rf, none, 1));
    out.derived["static_ramsey_deficit"] =
        std::abs(pair_p0(r, cfg, f_rf, stat, cfg.threads) - pair_p0(r, cfg, f_rf, none, 1));
  }
  return out;
}

Trace ramsey_trace(const ExperimentConfig& cfg, const SweepGrid& t_grid) {
  cfg.validate();
  t_grid.validate("ramsey grid");
  const NoiseModel noise = effective_noise(cfg);
  const double f_rf = rf_for(cfg, cfg.b_gauss);
  const DriveParams drive = drive_at(cfg, f_rf, cfg.drive.f1_mhz);
  const SpinModel model = nv_pair_model(cfg, cfg.b_gauss, f_rf, cfg.drive.f1_mhz, noise);
  const PulseSequence seq = ramsey_sequence(0.0, drive, cfg.readout.optics);
  const auto rr = sweep_duration(seq, 2, t_grid.values, model, noise,
                                 run_options(cfg, 300, cfg.threads));
  Trace t;
  t.x_name = "t_us";
  t.x = t_grid.values;
  std::vector<double> ipl, p0;
  readout_columns(rr, ipl, p0);
  t.add_column("P0", p0);
  t.add_column("I_pl", ipl);
  t.meta = "ramsey";
  return t;
}

// ---------------------------------------------------------------------------

namespace {

struct FieldPoint {
  double ipl = 0.0;
  std::vector<double> rabi;
  FitResult fit;
  std::vector<std::string> warnings;
};

FieldPoint field_point(const ExperimentConfig& cfg, double b, double f1, const SweepGrid& tg,
                       const NoiseModel& noise, std::size_t index, int threads) {
  FieldPoint fp;
  const double f_rf = rf_for(cfg, b);
  const auto& o = cfg.readout.optics;
  const SpinModel model = nv_bath_model(cfg, b, f_rf, f1, noise);
  RunOptions dark_opt = run_options(cfg, 400, threads);
  const ReadoutResult dark = run_sequence(dark_sequence(cfg.fieldsweep.wait_us, o), model, noise,
                                          dark_opt);
  fp.ipl = cfg.readout.poisson
               ? sample_intensity(dark.intensity, o.repetitions, dark_opt.count_seed, index)
               : dark.intensity;
  const PulseSequence seq = rabi_sequence(0.0, drive_at(cfg, f_rf, f1), o);
  const auto rr =
      sweep_duration(seq, 1, tg.values, model, noise, run_options(cfg, 1000 + index, threads));
  std::vector<double> p0;
  readout_columns(rr, fp.rabi, p0);
  if (!rr.empty()) fp.warnings = rr.front().warnings;
  fp.fit = fit_damped_cosine(tg.values, fp.rabi);
  return fp;
}

}  // namespace

SweepResult exp_field_sweep(const ExperimentConfig& cfg, const SweepGrid& b_grid) {
  cfg.validate();
  if (cfg.bath.n_spins < 1) {
    throw std::invalid_argument("fieldsweep needs at least one explicit bath spin (bath.n_spins)");
  }
  const auto& fs = cfg.fieldsweep;
  SweepGrid grid = b_grid;
  if (grid.empty()) grid = cfg.sweep;
  if (grid.empty()) grid = SweepGrid::linspace(fs.start_gauss, fs.stop_gauss, fs.points);
  grid.validate("field grid");
  const SweepGrid tg = SweepGrid::linspace(0.0, fs.rabi_t_max_us, fs.rabi_points);
  const NoiseModel noise = effective_noise(cfg);

  const std::size_t n = grid.values.size();
  std::vector<FieldPoint> pts(n);
  parallel_for(n, cfg.threads, [&](std::size_t k) {
    pts[k] = field_point(cfg, grid.values[k], fs.f1_mhz, tg, noise, k, 1);
  });

  SweepResult out;
  Trace sweep, rabi;
  sweep.x_name = "B_gauss";
  sweep.x = grid.values;
  rabi.x_name = "t_us";
  rabi.x = tg.values;
  std::vector<double> ipl(n), rate(n), t2p(n), f1(n);
  for (std::size_t k = 0; k < n; ++k) {
    ipl[k] = pts[k].ipl;
    t2p[k] = pts[k].fit.param("T2p_us");
    rate[k] = 1.0 / t2p[k];
    f1[k] = pts[k].fit.param("f1_mhz");
    add_warnings(out, pts[k].warnings);
    rabi.add_column("I_pl_B" + num(grid.values[k]), pts[k].rabi);
  }
  sweep.add_column("I_pl", ipl);
  sweep.add_column("inv_T2p_per_us", rate);
  sweep.add_column("T2p_us", t2p);
  sweep.add_column("f1_fit_mhz", f1);
  sweep.meta = "field sweep, dark wait " + num(fs.wait_us) + " us, Rabi f1 " + num(fs.f1_mhz) +
               " MHz";
  rabi.meta = "Rabi traces per field point";
  out.traces.push_back({"fieldsweep", sweep});
  out.traces.push_back({"fieldsweep_rabi", rabi});
  for (std::size_t k = 0; k < n; ++k) {
    out.fits.push_back({"fieldsweep_rabi", rabi.columns[k].first, pts[k].fit});
  }

  const double b_star = resonance_field(cfg.nv);
  out.derived["B_star_gauss"] = b_star;
  out.derived["B_star_numeric_gauss"] = resonance_field_numeric(cfg.nv);
  if (n >= 7) {
    FitResult dip = fit_lorentzian(sweep.x, ipl);
    FitResult peak = fit_lorentzian(sweep.x, rate);
    const double c_dip = dip.param("center");
    const double c_peak = peak.param("center");
    out.derived["ipl_dip_center_gauss"] = c_dip;
    out.derived["ipl_dip_fwhm_gauss"] = dip.param("fwhm");
    out.derived["ipl_dip_amplitude"] = dip.param("amplitude");
    out.derived["rate_peak_center_gauss"] = c_peak;
    out.derived["rate_peak_fwhm_gauss"] = peak.param("fwhm");
    out.derived["rate_peak_amplitude"] = peak.param("amplitude");
    out.derived["center_difference_gauss"] = std::abs(c_dip - c_peak);
    if (dip.param("offset") != 0.0) {
      out.derived["dip_normalized"] = -dip.param("amplitude") / dip.param("offset");
    }
    // flatness away from resonance
    const double w = peak.param("fwhm");
    std::vector<double> off;
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(grid.values[k] - b_star) > 5.0 * w) off.push_back(rate[k]);
    }
    if (!off.empty()) {
      const double mean = std::accumulate(off.begin(), off.end(), 0.0) / off.size();
      double dev = 0.0;
      for (double v : off) dev = std::max(dev, std::abs(v - mean) / mean);
      out.derived["off_resonance_rate_mean"] = mean;
      out.derived["off_resonance_max_rel_dev"] = dev;
      out.derived["off_resonance_points"] = static_cast<double>(off.size());
    }
    out.fits.push_back({"fieldsweep", "I_pl", std::move(dip)});
    out.fits.push_back({"fieldsweep", "inv_T2p_per_us", std::move(peak)});
  }
  return out;
}

std::vector<ExperimentConfig> trend_centers(const ExperimentConfig& cfg) {
  std::vector<ExperimentConfig> out;
  for (double c : cfg.trend.couplings_mhz) {
    ExperimentConfig e = cfg;
    e.bath.n_spins = std::max(1, cfg.bath.n_spins);
    e.bath.couplings.assign(static_cast<std::size_t>(e.bath.n_spins), DipolarCoupling::direct(c));
    e.noise.sigma_static_mhz = cfg.trend.sigma_per_coupling * c;
    out.push_back(std::move(e));
  }
  return out;
}

SweepResult exp_t2p_vs_dip(const std::vector<ExperimentConfig>& centers) {
  if (centers.size() < 1) throw std::invalid_argument("trend: no centers");
  struct Row {
    double dip, t2p, coupling, sigma;
    std::vector<double> rabi;
    FitResult fit;
  };
  std::vector<Row> rows(centers.size());
  const int threads = centers.front().threads;
  parallel_for(centers.size(), threads, [&](std::size_t i) {
    const ExperimentConfig& cfg = centers[i];
    cfg.validate();
    const NoiseModel noise = effective_noise(cfg);
    const auto& o = cfg.readout.optics;
    const double b_star = resonance_field(cfg.nv);
    auto dark = [&](double b) {
      const SpinModel m = nv_bath_model(cfg, b, rf_for(cfg, b), cfg.drive.f1_mhz, noise);
      return run_sequence(dark_sequence(cfg.fieldsweep.wait_us, o), m, noise,
                          run_options(cfg, 500, 1))
          .intensity;
    };
    const double on = dark(b_star);
    const double off = dark(b_star + cfg.trend.off_resonance_offset_gauss);
    Row& r = rows[i];
    r.dip = off > 0.0 ? (off - on) / off : 0.0;
    const double b = cfg.trend.b_rabi_gauss;
    const double f_rf = rf_for(cfg, b);
    const double f1 = cfg.drive.f1_mhz;
    const SpinModel m = nv_bath_model(cfg, b, f_rf, f1, noise);
    const SweepGrid tg = SweepGrid::linspace(0.0, cfg.rabi.t_max_us, cfg.rabi.points);
    const auto rr = sweep_duration(rabi_sequence(0.0, drive_at(cfg, f_rf, f1), o), 1, tg.values,
                                   m, noise, run_options(cfg, 501, 1));
    std::vector<double> p0;
    readout_columns(rr, r.rabi, p0);
    r.fit = fit_damped_cosine(tg.values, r.rabi);
    r.t2p = r.fit.param("T2p_us");
    r.coupling = cfg.bath.couplings.empty() ? 0.0 : cfg.bath.couplings.front().strength_mhz;
    r.sigma = cfg.noise.sigma_static_mhz;
  });
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rows[a].dip < rows[b].dip; });

  SweepResult out;
  Trace t;
  t.x_name = "center_rank";
  std::vector<double> dip, t2p, coup, sig, idx;
  Trace rabi;
  rabi.x_name = "t_us";
  const auto& c0 = centers.front();
  rabi.x = SweepGrid::linspace(0.0, c0.rabi.t_max_us, c0.rabi.points).values;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Row& r = rows[order[k]];
    t.x.push_back(static_cast<double>(k));
    dip.push_back(r.dip);
    t2p.push_back(r.t2p);
    coup.push_back(r.coupling);
    sig.push_back(r.sigma);
    idx.push_back(static_cast<double>(order[k]));
    const std::string col = "I_pl_center" + std::to_string(order[k]);
    if (r.rabi.size() == rabi.x.size()) {
      rabi.add_column(col, r.rabi);
      out.fits.push_back({"trend_rabi", col, r.fit});
    }
  }
  t.add_column("dip_normalized", dip);
  t.add_column("T2p_us", t2p);
  t.add_column("coupling_mhz", coup);
  t.add_column("sigma_static_mhz", sig);
  t.add_column("center_index", idx);
  t.meta = "T2' at B=" + num(c0.trend.b_rabi_gauss) + " G vs normalized dip at B*";
  rabi.meta = "Rabi traces per center";
  out.traces.push_back({"trend", t});
  out.traces.push_back({"trend_rabi", rabi});
  bool decreasing = true;
  for (std::size_t k = 1; k < t2p.size(); ++k) {
    if (!(t2p[k] < t2p[k - 1] && dip[k] > dip[k - 1])) decreasing = false;
  }
  out.derived["strictly_decreasing"] = decreasing ? 1.0 : 0.0;
  out.derived["centers"] = static_cast<double>(rows.size());
  return out;
}

// ---------------------------------------------------------------------------

SweepResult exp_levels(const ExperimentConfig& cfg, const SweepGrid& b_grid) {
  cfg.validate();
  SweepGrid grid = b_grid;
  if (grid.empty()) grid = cfg.sweep;
  if (grid.empty()) grid = SweepGrid::linspace(0.0, 1200.0, 241);
  grid.validate("levels field grid");
  const NvParams nvp = cfg.nv;
  const SpinSystem sys = nv_system(nvp);
  const double gp1 = cfg.bath.gamma();

  Trace t;
  t.x_name = "B_gauss";
  t.x = grid.values;
  const int d = sys.total_dim();
  std::vector<std::string> names;
  for (int i = 0; i < d; ++i) {
    const double ms = sys.m_of(0, i);
    std::string name = "E_ms" + std::string(ms > 0 ? "+" : (ms < 0 ? "-" : "")) +
                       num(std::abs(ms));
    if (nvp.include_nucleus) {
      const double mi = sys.m_of(1, i);
      name += "_mI" + std::string(mi > 0 ? "+" : (mi < 0 ? "-" : "")) + num(std::abs(mi));
    }
    names.push_back(name + "_mhz");
  }
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(d));
  std::vector<double> up, down, f_nv, f_p1;
  for (double b : grid.values) {
    const Eigensystem eig = eigensystem(h_nv(b, nvp).matrix());
    for (int i = 0; i < d; ++i) cols[static_cast<std::size_t>(i)].push_back(level_energy(eig, i));
    up.push_back(0.5 * gp1 * b);
    down.push_back(-0.5 * gp1 * b);
    f_nv.push_back(nv_transition_mhz(b, nvp));
    f_p1.push_back(gp1 * b);
  }
  for (int i = 0; i < d; ++i) t.add_column(names[static_cast<std::size_t>(i)], cols[i]);
  t.add_column("E_P1_up_mhz", up);
  t.add_column("E_P1_down_mhz", down);
  t.add_column("f_nv_0_m1_mhz", f_nv);
  t.add_column("f_P1_mhz", f_p1);
  t.meta = "ground-state levels of the N-V center and the P1 electron";

  SweepResult out;
  out.traces.push_back({"levels", t});
  out.derived["B_star_gauss"] = resonance_field(bare(nvp));
  out.derived["B_star_numeric_gauss"] = resonance_field_numeric(bare(nvp));
  out.derived["B_level_crossing_gauss"] = nvp.D_mhz / nvp.gamma();
  return out;
}

int count_spectral_peaks(const Trace& t, const std::string& column, double f_min) {
  const Spectrum s = discrete_spectrum(t.x, t.column(column), 16);
  Spectrum cut;
  for (std::size_t i = 0; i < s.freq.size(); ++i) {
    if (s.freq[i] >= f_min) {
      cut.freq.push_back(s.freq[i]);
      cut.magnitude.push_back(s.magnitude[i]);
    }
  }
  return static_cast<int>(spectral_peaks(cut, 0.5).size());
}

}  // namespace nvsim
