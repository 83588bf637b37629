#include "nvsim/trace.hpp"

#include <stdexcept>

#include "nvsim/spinops.hpp"

namespace nvsim {

const std::vector<double>& Trace::column(const std::string& name) const {
  for (const auto& [n, v] : columns) {
    if (n == name) return v;
  }
  throw std::out_of_range("trace has no column '" + name + "'");
}

void Trace::add_column(std::string name, std::vector<double> values) {
  columns.emplace_back(std::move(name), std::move(values));
}

void Trace::validate() const {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw std::invalid_argument("trace x values must be strictly increasing");
  }
  for (const auto& [name, v] : columns) {
    if (v.size() != x.size()) {
      throw DimensionMismatch("trace column '" + name + "' length differs from x");
    }
  }
}

}  // namespace nvsim
