#include "nvsim/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nvsim/csv.hpp"

#ifndef NVSIM_VERSION
#define NVSIM_VERSION "unknown"
#endif

namespace nvsim {

std::string RunManifest::to_text() const {
  std::ostringstream out;
  out << "experiment = " << experiment << "\n"
      << "config_checksum = " << config_checksum << "\n"
      << "seed = " << seed << "\n"
      << "version = " << version << "\n"
      << "wall_seconds = " << format_number(wall_seconds) << "\n"
      << "outputs = ";
  for (std::size_t i = 0; i < outputs.size(); ++i) out << (i ? "," : "") << outputs[i];
  out << "\n";
  return out.str();
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"esr",   "rabi",   "echo", "fieldsweep",
                                              "trend", "levels", "fit"};
  return names;
}

namespace {

SweepResult run_fit_experiment(const ParsedConfig& cfg) {
  if (cfg.fit.input.empty()) throw ConfigError("fit.input must name a CSV file", 0, 0, "fit.input");
  const Trace data = read_csv(cfg.fit.input);
  const std::string column = cfg.fit.column.empty() ? data.columns.at(0).first : cfg.fit.column;
  const auto& y = data.column(column);
  SweepResult r;
  r.fits.push_back({"fit", column, fit_by_name(cfg.fit.model, data.x, y)});
  const FitResult& f = r.fits.back().fit;
  Trace t;
  t.x_name = data.x_name;
  t.x = data.x;
  t.add_column(column, y);
  std::vector<double> model(t.x.size());
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    const double x = t.x[i];
    const auto& p = f.params;
    if (cfg.fit.model == "damped_cosine") {
      model[i] = damped_cosine(x, p[0], p[1], p[2], p[3], p[4]);
    } else if (cfg.fit.model == "exp_decay") {
      model[i] = exp_decay(x, p[0], p[1], p[2]);
    } else {
      model[i] = lorentzian(x, p[0], p[1], p[2], p[3]);
    }
  }
  t.add_column("model", std::move(model));
  r.traces.push_back({"fit", std::move(t)});
  if (!f.converged) r.warnings.push_back("fit did not converge: " + f.message);
  return r;
}

}  // namespace

SweepResult compute_experiment(const std::string& experiment, const ParsedConfig& cfg) {
  const ExperimentConfig& e = cfg.experiment;
  if (experiment == "esr") return exp_cw_esr(e, e.sweep);
  if (experiment == "rabi") return exp_rabi(e, e.sweep);
  if (experiment == "echo") return exp_hahn(e, e.sweep);
  if (experiment == "fieldsweep") return exp_field_sweep(e, e.sweep);
  if (experiment == "trend") {
    if (!e.sweep.empty()) throw ConfigError("trend has no swept variable; remove sweep.*");
    return exp_t2p_vs_dip(trend_centers(e));
  }
  if (experiment == "levels") return exp_levels(e, e.sweep);
  if (experiment == "fit") return run_fit_experiment(cfg);
  throw ConfigError("unknown experiment '" + experiment + "'");
}

std::string format_fit(const FitResult& fit) {
  std::ostringstream out;
  out << "model: " << fit.model << "\n"
      << "converged: " << (fit.converged ? "true" : "false") << "\n"
      << "iterations: " << fit.iterations << "\n"
      << "residual_norm: " << format_number(fit.residual_norm) << "\n"
      << "gradient_norm: " << format_number(fit.gradient_norm) << "\n";
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    out << "  " << fit.names[i] << " = " << format_number(fit.params[i]) << "\n";
  }
  if (!fit.flags.empty()) {
    out << "flags:";
    for (const auto& f : fit.flags) out << " " << f;
    out << "\n";
  }
  if (!fit.message.empty()) out << "message: " << fit.message << "\n";
  return out.str();
}

std::string format_report(const std::string& experiment, const SweepResult& result) {
  std::ostringstream out;
  out << "experiment: " << experiment << "\n";
  for (const auto& rec : result.fits) {
    out << "\n[fit " << rec.trace << "/" << rec.column << "]\n" << format_fit(rec.fit);
  }
  if (!result.derived.empty()) {
    out << "\n[derived]\n";
    for (const auto& [k, v] : result.derived) out << k << " = " << format_number(v) << "\n";
  }
  if (!result.warnings.empty()) {
    out << "\n[warnings]\n";
    for (const auto& w : result.warnings) out << w << "\n";
  }
  return out.str();
}

RunManifest run_experiment(const std::string& experiment, const ParsedConfig& cfg,
                           const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  if (std::find(experiment_names().begin(), experiment_names().end(), experiment) ==
      experiment_names().end()) {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult result = compute_experiment(experiment, cfg);

  RunManifest m;
  m.experiment = experiment;
  m.config_checksum = config_checksum(cfg);
  m.seed = cfg.experiment.seed;
  m.version = NVSIM_VERSION;

  const bool created_dir = !fs::exists(out_dir);
  std::vector<fs::path> written;
  try {
    fs::create_directories(out_dir);
    for (const auto& nt : result.traces) {
      const std::string name = nt.name + ".csv";
      written.push_back(out_dir / name);
      write_csv(written.back(), nt.trace);
      m.outputs.push_back(name);
    }
    auto write_text = [&](const std::string& name, const std::string& text) {
      written.push_back(out_dir / name);
      std::ofstream f(written.back(), std::ios::binary | std::ios::trunc);
      f << text;
      if (!f) throw std::runtime_error("write failed: " + written.back().string());
    };
    write_text("report.txt", format_report(experiment, result));
    m.outputs.push_back("report.txt");
    m.outputs.push_back("manifest.txt");
    m.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text("manifest.txt", m.to_text());
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    if (created_dir) fs::remove(out_dir, ec);
    throw;
  }
  return m;
}

FitResult fit_file(const std::filesystem::path& csv_path, const std::string& model,
                   const std::string& column) {
  const Trace t = read_csv(csv_path);
  const std::string name = column.empty() ? t.columns.at(0).first : column;
  const auto it = std::find_if(t.columns.begin(), t.columns.end(),
                               [&](const auto& c) { return c.first == name; });
  if (it == t.columns.end()) throw CsvError("no column '" + name + "' in " + csv_path.string());
  return fit_by_name(model, t.x, it->second);
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spin dynamics simulator for N-V center experiments", "nvsim"};
  app.set_version_flag("--version", std::string(NVSIM_VERSION));
  app.footer("\n" + schema_help());
  app.require_subcommand(1);

  std::string experiment, config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  auto* run = app.add_subcommand("run", "run an experiment and write CSV, report and manifest");
  run->add_option("experiment", experiment, "esr, rabi, echo, fieldsweep, trend, levels or fit")
      ->required()
      ->check(CLI::IsMember(experiment_names()));
  run->add_option("--config", config_path, "configuration file")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  auto* seed_opt = run->add_option("--seed", seed, "override run.seed");
  auto* threads_opt = run->add_option("--threads", threads, "override run.threads")
                          ->check(CLI::PositiveNumber);

  std::string model, csv_path, column, report_path;
  auto* fit = app.add_subcommand("fit", "fit a model to a CSV column");
  fit->add_option("model", model, "damped_cosine, exp_decay or lorentzian")
      ->required()
      ->check(CLI::IsMember(fit_model_names()));
  fit->add_option("csv", csv_path, "CSV file in the emitted schema")->required();
  fit->add_option("--column", column, "signal column (default: first)");
  fit->add_option("--out", report_path, "also write the fit report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << NVSIM_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*run) {
      ParsedConfig cfg = load_config(config_path);
      if (*seed_opt) set_seed(cfg, seed);
      if (*threads_opt) cfg.experiment.threads = threads;
      const RunManifest m = run_experiment(experiment, cfg, out_dir);
      out << m.to_text();
      return 0;
    }
    const FitResult f = fit_file(csv_path, model, column);
    const std::string report = format_fit(f);
    out << report;
    if (!report_path.empty()) {
      std::ofstream file(report_path, std::ios::binary | std::ios::trunc);
      file << report;
    }
    if (!f.converged) {
      err << "error: fit did not converge\n";
      return 2;
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace nvsim
