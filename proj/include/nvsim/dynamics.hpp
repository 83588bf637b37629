#pragma once

// Time evolution: the analytic Rabi formula, piecewise-constant unitary
// propagation, Lindblad master equation, quasi-static noise ensembles and
// Liouvillian steady states.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nvsim/hamiltonian.hpp"
#include "nvsim/spinops.hpp"
#include "nvsim/trace.hpp"

namespace nvsim {

class DensityMatrix {
 public:
  DensityMatrix() = default;
  // Validates Hermiticity, unit trace and positivity.
  explicit DensityMatrix(Matrix rho);

  static DensityMatrix basis_state(int dim, int index);
  static DensityMatrix maximally_mixed(int dim);
  static DensityMatrix pure(const Vector& psi);
  static DensityMatrix unchecked(Matrix rho);

  const Matrix& matrix() const { return rho_; }
  int dim() const { return static_cast<int>(rho_.rows()); }

  double trace_error() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;
  // Re tr(P rho)
  double expectation(const Matrix& op) const;

 private:
  Matrix rho_;
};

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
// Partial traces for a bipartition (left factor of dimension `left_dim`).
DensityMatrix trace_out_left(const DensityMatrix& rho, int left_dim);
DensityMatrix trace_out_right(const DensityMatrix& rho, int left_dim);

// Populations of the N-V 14N nucleus, ordered mI = +1, 0, -1.
struct NuclearAveraging {
  bool enabled = false;
  std::array<double, 3> populations{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  double A_par_mhz = 2.2;
};

// Stratified: sample i is the Gaussian quantile of a uniform draw inside the
// i-th of n equal-probability strata. Independent: plain Gaussian draws.
enum class DetuningSampling { Stratified, Independent };

struct NoiseModel {
  double sigma_static_mhz = 0.0;  // quasi-static Gaussian detuning std-dev
  double gamma_phi = 0.0;         // Markovian pure dephasing, us^-1 (coherence decay rate)
  double gamma_1 = 0.0;           // longitudinal relaxation -1 -> 0, us^-1
  int n_samples = 1;
  std::uint64_t seed = 1;
  DetuningSampling sampling = DetuningSampling::Stratified;
  NuclearAveraging nuclear;

  void validate() const;
};

// Rabi's formula: probability to remain in m_S = 0.
double rabi_probability(double f1_mhz, double detuning_mhz, double t_us);

struct TimedHamiltonian {
  Hamiltonian h;
  double duration_us = 0.0;
};

DensityMatrix propagate(std::span<const TimedHamiltonian> segments, const DensityMatrix& rho0);

struct CollapseOperator {
  Matrix op;
  double rate = 0.0;  // us^-1
};

enum class LindbladMethod { Exact, RK4 };

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// d rho/dt = -i 2 pi [H, rho] + sum_k rate_k (L rho L^dag - {L^dag L, rho}/2).
// Superoperator acting on column-stacked vec(rho).
Matrix liouvillian(const Hamiltonian& h, std::span<const CollapseOperator> ops);

DensityMatrix evolve_lindblad(const Hamiltonian& h, std::span<const CollapseOperator> ops,
                              const DensityMatrix& rho0, double t_us,
                              LindbladMethod method = LindbladMethod::Exact);

// Largest frequency scale of the generator (MHz) used to bound the RK4 step.
double frequency_scale(const Hamiltonian& h, std::span<const CollapseOperator> ops);

// One quasi-static detuning realization and its weight in the ensemble mean.
struct DetuningSample {
  double detuning_mhz = 0.0;
  double weight = 1.0;
};

// Gaussian draws indexed by (seed, sample) combined with the discrete
// hyperfine shifts -A mI when nuclear averaging is enabled.
std::vector<DetuningSample> detuning_samples(const NoiseModel& noise);

// Mean of experiment(detuning) over detuning_samples(noise). Samples are
// evaluated on `threads` workers; the reduction runs in sample order so the
// result does not depend on the thread count.
Trace ensemble_average(const std::function<Trace(double)>& experiment, const NoiseModel& noise,
                       int threads = 1);

class DegenerateSteadyState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

DensityMatrix steady_state(const Hamiltonian& h, std::span<const CollapseOperator> ops);

// Matrix <-> column-stacked vector helpers for superoperator work.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, int dim);

}  // namespace nvsim
