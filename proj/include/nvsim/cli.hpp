#pragma once

// Experiment runner behind the command-line tool.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nvsim/config.hpp"
#include "nvsim/experiments.hpp"
#include "nvsim/fitting.hpp"

namespace nvsim {

struct RunManifest {
  std::string experiment;
  std::string config_checksum;
  std::uint64_t seed = 0;
  std::string version;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;  // file names relative to the output directory

  std::string to_text() const;
};

const std::vector<std::string>& experiment_names();

// Runs the experiment without touching the filesystem (except reading fit.input).
SweepResult compute_experiment(const std::string& experiment, const ParsedConfig& cfg);

std::string format_fit(const FitResult& fit);
std::string format_report(const std::string& experiment, const SweepResult& result);

// Writes <trace>.csv per trace, report.txt and manifest.txt into out_dir.
// On failure every file written so far is removed and the exception rethrown.
RunManifest run_experiment(const std::string& experiment, const ParsedConfig& cfg,
                           const std::filesystem::path& out_dir);

// Fits `column` (default: first signal column) of an emitted CSV against x.
FitResult fit_file(const std::filesystem::path& csv_path, const std::string& model,
                   const std::string& column = "");

// Exit codes: 0 success, 1 usage or configuration error, 2 runtime or fit error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nvsim
