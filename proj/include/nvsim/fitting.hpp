#pragma once

// Nonlinear least squares for the observables of the experiments: damped
// cosine (f1, T2'), exponential decay (T2) and Lorentzian (center, FWHM).

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nvsim/trace.hpp"

namespace nvsim {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FitResult {
  std::string model;
  std::vector<std::string> names;
  std::vector<double> params;
  // "<param>:unidentifiable", "<param>:at_lower_bound", "<param>:at_upper_bound"
  std::vector<std::string> flags;
  double residual_norm = 0.0;  // sqrt(sum of squared residuals), units of y
  double gradient_norm = 0.0;  // scaled gradient at the solution
  bool converged = false;
  int iterations = 0;
  // Objective (standardized units) after the start and after each accepted step.
  std::vector<double> objective_history;
  std::string message;

  double param(const std::string& name) const;
  bool has_flag(const std::string& param_name, const std::string& what) const;
  bool flagged(const std::string& param_name) const;
};

struct LmOptions {
  double gradient_tol = 1e-10;
  int max_iterations = 500;
  double jacobian_step = 1e-6;  // relative central-difference step
};

using ModelFn = std::function<double(double x, std::span<const double> p)>;

struct LmProblem {
  std::span<const double> x;
  std::span<const double> y;
  ModelFn model;
  std::vector<double> start;
  std::vector<double> lower;  // -inf / +inf for unbounded
  std::vector<double> upper;
};

struct LmSolution {
  std::vector<double> params;
  double cost = 0.0;  // 0.5 * sum r^2
  double gradient_norm = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> history;
  std::vector<bool> at_lower, at_upper;
  std::string message;
};

// Box-constrained Levenberg-Marquardt with a central-difference Jacobian.
// Convergence: max_j |J_j . r| / (|J_j| |y|) over free parameters below the
// gradient tolerance.
LmSolution levenberg_marquardt(const LmProblem& problem, const LmOptions& options = {});

// y = offset + A exp(-t/T2p) cos(2 pi f1 t + phase)
FitResult fit_damped_cosine(std::span<const double> x, std::span<const double> y,
                            const LmOptions& options = {});
// y = offset + A exp(-t/T)
FitResult fit_exp_decay(std::span<const double> x, std::span<const double> y,
                        const LmOptions& options = {});
// y = offset + A (w/2)^2 / ((x-c)^2 + (w/2)^2)
FitResult fit_lorentzian(std::span<const double> x, std::span<const double> y,
                         const LmOptions& options = {});

FitResult fit_damped_cosine(const Trace& t, const LmOptions& options = {});
FitResult fit_exp_decay(const Trace& t, const LmOptions& options = {});
FitResult fit_lorentzian(const Trace& t, const LmOptions& options = {});

// Dispatch by name: damped_cosine, exp_decay, lorentzian.
FitResult fit_by_name(const std::string& model, std::span<const double> x,
                      std::span<const double> y, const LmOptions& options = {});
const std::vector<std::string>& fit_model_names();

double damped_cosine(double t, double amplitude, double f1, double t2p, double phase,
                     double offset);
double exp_decay(double t, double amplitude, double tau, double offset);
double lorentzian(double x, double center, double fwhm, double amplitude, double offset);

// Discrete (non-uniform) Fourier magnitude of the mean-removed, Hann-windowed signal
// on frequencies 0 .. f_max, zero-padded by `oversample`.
struct Spectrum {
  std::vector<double> freq;
  std::vector<double> magnitude;
};
Spectrum discrete_spectrum(std::span<const double> x, std::span<const double> y,
                           int oversample = 8, double f_max = 0.0);
// Local maxima of the magnitude whose height is at least `rel_height` of the largest.
std::vector<double> spectral_peaks(const Spectrum& s, double rel_height = 0.5);

// Wraps an angle into (-pi, pi].
double wrap_phase(double phi);

}  // namespace nvsim
