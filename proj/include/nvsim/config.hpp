#pragma once

// Flat key-value configuration: `section.key = value` lines, `#` comments,
// comma-separated lists.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nvsim/experiments.hpp"

namespace nvsim {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0, int column = 0, std::string key = {});

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  int column_;
  std::string key_;
};

struct FitSettings {
  std::string model = "damped_cosine";
  std::string input;   // CSV path
  std::string column;  // empty: first signal column
};

struct ParsedConfig {
  ExperimentConfig experiment;
  FitSettings fit;
  // every schema key with its canonical value text (defaults included)
  std::map<std::string, std::string> canonical;
  std::vector<std::string> explicit_keys;
};

struct ConfigKey {
  std::string key;
  std::string type;  // real, int, bool, string, list, or a|b|c
  std::string default_text;
  std::string description;
  bool from_paper = false;
};

const std::vector<ConfigKey>& config_schema();

ParsedConfig parse_config(std::string_view text);
ParsedConfig load_config(const std::string& path);

// Overrides applied after parsing (e.g. --seed); re-validates.
void set_seed(ParsedConfig& cfg, std::uint64_t seed);

// FNV-1a 64 over the sorted canonical key/value lines; excludes run.threads.
std::string config_checksum(const ParsedConfig& cfg);

// Closest schema key to an unknown one, or empty.
std::string suggest_key(const std::string& unknown);

std::string schema_help();

}  // namespace nvsim
