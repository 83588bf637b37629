#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace nvsim {

// A sampled signal versus one independent variable. The first column is the
// primary signal (the one fits use). Column names carry their unit,
// e.g. "t_us" or "I_pl_counts".
struct Trace {
  std::string x_name;
  std::vector<double> x;
  std::vector<std::pair<std::string, std::vector<double>>> columns;
  std::string meta;

  const std::vector<double>& y() const { return columns.at(0).second; }
  std::vector<double>& y() { return columns.at(0).second; }
  const std::vector<double>& column(const std::string& name) const;
  void add_column(std::string name, std::vector<double> values);
  std::size_t size() const { return x.size(); }

  // x strictly increasing, equal column lengths.
  void validate() const;
};

}  // namespace nvsim
