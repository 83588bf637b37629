#pragma once

// Numeric CSV for traces: header "x_name,col1,col2,...", one row per sample,
// shortest round-trip decimal formatting independent of the locale.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "nvsim/trace.hpp"

namespace nvsim {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_number(double v);

std::string format_csv(const Trace& t);
void write_csv(const std::filesystem::path& path, const Trace& t);

// Expects the emitted schema: a header of unique names, then rows with the
// same field count, all numeric. The x column must not decrease.
Trace parse_csv(std::string_view text);
Trace read_csv(const std::filesystem::path& path);

}  // namespace nvsim
