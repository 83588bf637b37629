#include "nvsim/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

namespace nvsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPiD = 3.14159265358979323846;

}  // namespace

double FitResult::param(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return params[i];
  }
  throw std::out_of_range("fit result has no parameter '" + name + "'");
}

bool FitResult::has_flag(const std::string& param_name, const std::string& what) const {
  return std::find(flags.begin(), flags.end(), param_name + ":" + what) != flags.end();
}

bool FitResult::flagged(const std::string& param_name) const {
  const std::string prefix = param_name + ":";
  return std::any_of(flags.begin(), flags.end(),
                     [&](const std::string& f) { return f.rfind(prefix, 0) == 0; });
}

double wrap_phase(double phi) {
  double w = std::remainder(phi, 2.0 * kPiD);
  if (w <= -kPiD) w += 2.0 * kPiD;
  return w;
}

double damped_cosine(double t, double amplitude, double f1, double t2p, double phase,
                     double offset) {
  return offset + amplitude * std::exp(-t / t2p) * std::cos(2.0 * kPiD * f1 * t + phase);
}

double exp_decay(double t, double amplitude, double tau, double offset) {
  return offset + amplitude * std::exp(-t / tau);
}

double lorentzian(double x, double center, double fwhm, double amplitude, double offset) {
  const double h2 = 0.25 * fwhm * fwhm;
  const double d = x - center;
  return offset + amplitude * h2 / (d * d + h2);
}

// ---------------------------------------------------------------------------
// Levenberg-Marquardt

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd residuals(const LmProblem& pr, const std::vector<double>& p) {
  VectorXd r(pr.x.size());
  for (std::size_t i = 0; i < pr.x.size(); ++i) r(i) = pr.model(pr.x[i], p) - pr.y[i];
  return r;
}

MatrixXd jacobian(const LmProblem& pr, std::vector<double> p, double rel_step) {
  const std::size_t m = p.size();
  MatrixXd j(pr.x.size(), m);
  for (std::size_t k = 0; k < m; ++k) {
    const double p0 = p[k];
    const double h = rel_step * std::max(std::abs(p0), 1.0);
    p[k] = p0 + h;
    const VectorXd rp = residuals(pr, p);
    p[k] = p0 - h;
    const VectorXd rm = residuals(pr, p);
    p[k] = p0;
    j.col(k) = (rp - rm) / (2.0 * h);
  }
  return j;
}

double clamp_to(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

LmSolution levenberg_marquardt(const LmProblem& pr, const LmOptions& opt) {
  const std::size_t m = pr.start.size();
  if (pr.lower.size() != m || pr.upper.size() != m) {
    throw std::invalid_argument("levenberg_marquardt: bounds size differs from start");
  }
  if (pr.x.size() != pr.y.size()) throw std::invalid_argument("levenberg_marquardt: x/y size");

  LmSolution sol;
  std::vector<double> p(m);
  for (std::size_t k = 0; k < m; ++k) p[k] = clamp_to(pr.start[k], pr.lower[k], pr.upper[k]);
  VectorXd r = residuals(pr, p);
  if (!r.allFinite()) throw FitError("levenberg_marquardt: non-finite residual at start");
  double cost = 0.5 * r.squaredNorm();
  sol.history.push_back(cost);
  double lambda = 1e-3;
  std::vector<bool> fixed(m, false);

  // gradient scaled by column norms and the data norm, so an exact fit and a
  // noisy optimum are judged alike
  double yn = 0.0;
  for (double v : pr.y) yn += v * v;
  yn = std::sqrt(yn);
  if (yn == 0.0) yn = 1.0;
  auto scaled_gradient = [&](const MatrixXd& j, const VectorXd& g) {
    double worst = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (fixed[k]) continue;
      const double cn = j.col(k).norm();
      if (cn == 0.0) continue;
      worst = std::max(worst, std::abs(g(k)) / (cn * yn));
    }
    return worst;
  };

  int it = 0;
  int polish = 0;
  for (; it < opt.max_iterations; ++it) {
    const MatrixXd j = jacobian(pr, p, opt.jacobian_step);
    const VectorXd g = j.transpose() * r;
    // parameters pinned at a bound with the gradient pushing outward
    for (std::size_t k = 0; k < m; ++k) {
      fixed[k] = (p[k] <= pr.lower[k] && g(k) > 0.0) || (p[k] >= pr.upper[k] && g(k) < 0.0);
    }
    sol.gradient_norm = scaled_gradient(j, g);
    if (r.norm() == 0.0 || sol.gradient_norm < opt.gradient_tol) {
      sol.converged = true;
      break;
    }
    const MatrixXd jtj = j.transpose() * j;
    const double dmax = std::max(jtj.diagonal().maxCoeff(), 1e-300);
    auto try_step = [&](double damping, bool strict) {
      MatrixXd a = jtj;
      VectorXd rhs = -g;
      for (std::size_t k = 0; k < m; ++k) {
        a(k, k) += damping * std::max(jtj(k, k), 1e-12 * dmax);
        if (fixed[k]) {
          a.row(k).setZero();
          a.col(k).setZero();
          a(k, k) = 1.0;
          rhs(k) = 0.0;
        }
      }
      const VectorXd delta = a.ldlt().solve(rhs);
      std::vector<double> trial(m);
      for (std::size_t k = 0; k < m; ++k) {
        trial[k] = clamp_to(p[k] + delta(k), pr.lower[k], pr.upper[k]);
      }
      const VectorXd rt = residuals(pr, trial);
      const double ct = rt.allFinite() ? 0.5 * rt.squaredNorm() : kInf;
      // polish steps may leave the cost unchanged up to rounding
      if (ct < cost || (!strict && ct <= cost * (1.0 + 1e-12))) {
        p = std::move(trial);
        r = rt;
        cost = ct;
        sol.history.push_back(cost);
        return true;
      }
      return false;
    };
    bool accepted = false;
    while (lambda < 1e20) {
      if (try_step(lambda, true)) {
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // near the optimum cost differences drop below rounding; a plain
      // Gauss-Newton step that does not increase the cost still shrinks the gradient
      if (polish < 20 && try_step(0.0, false)) {
        ++polish;
        lambda = 1e-3;
        continue;
      }
      sol.message = "no step reduces the objective";
      break;
    }
  }
  if (it >= opt.max_iterations && !sol.converged) {
    const MatrixXd j = jacobian(pr, p, opt.jacobian_step);
    sol.gradient_norm = scaled_gradient(j, j.transpose() * r);
    sol.converged = sol.gradient_norm < opt.gradient_tol;
    if (!sol.converged) sol.message = "iteration limit reached";
  }
  sol.iterations = it;
  sol.params = p;
  sol.cost = cost;
  sol.at_lower.resize(m);
  sol.at_upper.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    sol.at_lower[k] = p[k] <= pr.lower[k];
    sol.at_upper[k] = p[k] >= pr.upper[k];
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Spectrum

Spectrum discrete_spectrum(std::span<const double> x, std::span<const double> y, int oversample,
                           double f_max) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw FitError("discrete_spectrum: need >= 2 points");
  const double span = x[n - 1] - x[0];
  if (!(span > 0.0)) throw FitError("discrete_spectrum: zero span");
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double win = 0.5 * (1.0 - std::cos(2.0 * kPiD * (x[i] - x[0]) / span));
    w[i] = win * (y[i] - mean);
  }
  if (f_max <= 0.0) f_max = static_cast<double>(n - 1) / (2.0 * span);
  const double df = 1.0 / (span * std::max(1, oversample));
  const auto bins = static_cast<std::size_t>(std::floor(f_max / df)) + 1;
  Spectrum s;
  s.freq.resize(bins);
  s.magnitude.resize(bins);
  // bins are equally spaced, so each sample's phasor advances by a fixed rotation
  std::vector<std::complex<double>> acc(bins);
  for (std::size_t i = 0; i < n; ++i) {
    const std::complex<double> step = std::polar(1.0, -2.0 * kPiD * df * (x[i] - x[0]));
    std::complex<double> ph(w[i], 0.0);
    for (std::size_t b = 0; b < bins; ++b) {
      if (b % 256 == 0) ph = std::polar(w[i], -2.0 * kPiD * df * static_cast<double>(b) * (x[i] - x[0]));
      acc[b] += ph;
      ph *= step;
    }
  }
  for (std::size_t b = 0; b < bins; ++b) {
    s.freq[b] = df * static_cast<double>(b);
    s.magnitude[b] = std::abs(acc[b]);
  }
  return s;
}

namespace {

// Parabolic refinement of a sampled maximum at interior index i.
double refine_peak(const Spectrum& s, std::size_t i) {
  if (i == 0 || i + 1 >= s.magnitude.size()) return s.freq[i];
  const double a = s.magnitude[i - 1], b = s.magnitude[i], c = s.magnitude[i + 1];
  const double den = a - 2.0 * b + c;
  if (den >= 0.0) return s.freq[i];
  const double shift = 0.5 * (a - c) / den;
  return s.freq[i] + shift * (s.freq[i + 1] - s.freq[i]);
}

}  // namespace

std::vector<double> spectral_peaks(const Spectrum& s, double rel_height) {
  std::vector<double> out;
  if (s.magnitude.size() < 3) return out;
  const double top = *std::max_element(s.magnitude.begin() + 1, s.magnitude.end());
  if (!(top > 0.0)) return out;
  for (std::size_t i = 1; i + 1 < s.magnitude.size(); ++i) {
    const double p = s.magnitude[i];
    if (p > s.magnitude[i - 1] && p >= s.magnitude[i + 1] && p >= rel_height * top) {
      out.push_back(refine_peak(s, i));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Models

namespace {

struct Prepared {
  std::vector<double> ys;  // standardized
  double mean = 0.0;
  double scale = 0.0;  // 0 for a flat trace
  double span = 0.0;
  double min_dx = 0.0;
};

Prepared prepare(std::span<const double> x, std::span<const double> y, std::size_t min_points,
                 const char* model) {
  const std::string m(model);
  if (x.size() != y.size()) throw FitError(m + ": x and y lengths differ");
  if (x.size() < min_points) {
    throw FitError(m + ": insufficient data (" + std::to_string(x.size()) + " points, need " +
                   std::to_string(min_points) + ")");
  }
  Prepared p;
  p.min_dx = kInf;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw FitError(m + ": non-finite data");
    if (i > 0) {
      const double dx = x[i] - x[i - 1];
      if (!(dx > 0.0)) throw FitError(m + ": x must be strictly increasing");
      p.min_dx = std::min(p.min_dx, dx);
    }
  }
  p.span = x.back() - x.front();
  const double n = static_cast<double>(y.size());
  p.mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double var = 0.0;
  for (double v : y) var += (v - p.mean) * (v - p.mean);
  const double sd = std::sqrt(var / n);
  const double ref = std::max(1.0, std::abs(p.mean));
  p.scale = sd > 1e-12 * ref ? sd : 0.0;
  p.ys.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    p.ys[i] = p.scale > 0.0 ? (y[i] - p.mean) / p.scale : 0.0;
  }
  return p;
}

FitResult flat_result(const std::string& model, std::vector<std::string> names,
                      std::vector<double> params, const std::vector<std::string>& unidentified,
                      std::span<const double> y, double mean) {
  FitResult r;
  r.model = model;
  r.names = std::move(names);
  r.params = std::move(params);
  for (const auto& u : unidentified) r.flags.push_back(u + ":unidentifiable");
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  r.residual_norm = std::sqrt(ss);
  r.converged = true;
  r.objective_history = {0.5 * ss};
  r.message = "flat trace: amplitude is zero";
  return r;
}

void finish_common(FitResult& out, const LmSolution& sol, const Prepared& prep) {
  out.converged = sol.converged;
  out.iterations = sol.iterations;
  out.gradient_norm = sol.gradient_norm;
  out.objective_history = sol.history;
  out.residual_norm = std::sqrt(2.0 * sol.cost) * prep.scale;
  out.message = sol.converged ? "converged" : sol.message;
}

// Decay rate bound [0, 1/min_dx] and the reported time min(1/k, 100 span).
double rate_to_time(double k, const Prepared& prep, const std::string& name, FitResult& out,
                    bool rate_at_upper) {
  const double t_max = 100.0 * prep.span;
  double t = k > 0.0 ? 1.0 / k : kInf;
  if (t >= t_max) {
    t = t_max;
    out.flags.push_back(name + ":at_upper_bound");
  }
  if (rate_at_upper) out.flags.push_back(name + ":at_lower_bound");
  return t;
}

// Least squares for y ~ sum_j c_j basis_j(x).
VectorXd linear_lsq(const MatrixXd& basis, std::span<const double> y) {
  const VectorXd yy = Eigen::Map<const VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  return basis.colPivHouseholderQr().solve(yy);
}

double regression_slope(const std::vector<double>& t, const std::vector<double>& v) {
  const double n = static_cast<double>(t.size());
  const double mt = std::accumulate(t.begin(), t.end(), 0.0) / n;
  const double mv = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    num += (t[i] - mt) * (v[i] - mv);
    den += (t[i] - mt) * (t[i] - mt);
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

FitResult fit_damped_cosine(std::span<const double> x, std::span<const double> y,
                            const LmOptions& options) {
  const Prepared prep = prepare(x, y, 5, "fit_damped_cosine");
  const std::vector<std::string> names{"amplitude", "f1_mhz", "T2p_us", "phase_rad", "offset"};
  if (prep.scale == 0.0) {
    return flat_result("damped_cosine", names, {0.0, 0.0, 100.0 * prep.span, 0.0, prep.mean},
                       {"f1_mhz", "T2p_us", "phase_rad"}, y, prep.mean);
  }
  const std::span<const double> ys(prep.ys);

  // oscillation frequency from the discrete spectrum
  const Spectrum spec = discrete_spectrum(x, ys, 16);
  std::size_t best = 1;
  for (std::size_t i = 1; i + 1 < spec.magnitude.size(); ++i) {
    if (spec.magnitude[i] > spec.magnitude[best]) best = i;
  }
  const double f0 =
      std::max(refine_peak(spec, best), spec.freq.size() > 1 ? spec.freq[1] : 1.0 / prep.span);
  if (f0 * prep.span < 2.0) {
    throw FitError("fit_damped_cosine: trace spans fewer than 2 oscillation periods (f1 ~ " +
                   std::to_string(f0) + " MHz over " + std::to_string(prep.span) + " us)");
  }

  // decay rate from log-linear regression of per-period amplitudes
  const double k_max = 1.0 / prep.min_dx;
  double k0 = 0.0;
  {
    std::vector<double> tc, la;
    const double period = 1.0 / f0;
    std::size_t i = 0;
    for (double start = x.front(); start + period <= x.back() + 1e-12; start += period) {
      double lo = kInf, hi = -kInf;
      std::size_t count = 0;
      for (; i < x.size() && x[i] < start + period; ++i) {
        lo = std::min(lo, ys[i]);
        hi = std::max(hi, ys[i]);
        ++count;
      }
      if (count >= 3 && hi > lo) {
        tc.push_back(start + 0.5 * period);
        la.push_back(std::log(0.5 * (hi - lo)));
      }
    }
    if (tc.size() >= 2) k0 = clamp_to(-regression_slope(tc, la), 0.0, k_max);
  }

  // amplitude and phase by linear projection at (f0, k0)
  MatrixXd basis(x.size(), 3);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = std::exp(-k0 * x[i]);
    basis(i, 0) = e * std::cos(2.0 * kPiD * f0 * x[i]);
    basis(i, 1) = e * std::sin(2.0 * kPiD * f0 * x[i]);
    basis(i, 2) = 1.0;
  }
  const VectorXd c = linear_lsq(basis, ys);
  const double a0 = std::hypot(c(0), c(1));
  const double phi0 = std::atan2(-c(1), c(0));

  LmProblem pr;
  pr.x = x;
  pr.y = ys;
  pr.model = [](double t, std::span<const double> q) {
    return q[4] + q[0] * std::exp(-q[2] * t) * std::cos(2.0 * kPiD * q[1] * t + q[3]);
  };
  pr.start = {a0, f0, k0, phi0, c(2)};
  pr.lower = {0.0, 0.0, 0.0, -kInf, -kInf};
  pr.upper = {kInf, kInf, k_max, kInf, kInf};
  const LmSolution sol = levenberg_marquardt(pr, options);

  FitResult out;
  out.model = "damped_cosine";
  out.names = names;
  finish_common(out, sol, prep);
  const auto& q = sol.params;
  const double t2p = rate_to_time(q[2], prep, "T2p_us", out, sol.at_upper[2]);
  out.params = {q[0] * prep.scale, q[1], t2p, wrap_phase(q[3]), q[4] * prep.scale + prep.mean};
  if (q[0] < 1e-8) {
    for (const char* n : {"f1_mhz", "T2p_us", "phase_rad"}) {
      out.flags.push_back(std::string(n) + ":unidentifiable");
    }
  }
  return out;
}

FitResult fit_exp_decay(std::span<const double> x, std::span<const double> y,
                        const LmOptions& options) {
  const Prepared prep = prepare(x, y, 5, "fit_exp_decay");
  const std::vector<std::string> names{"amplitude", "T_us", "offset"};
  if (prep.scale == 0.0) {
    return flat_result("exp_decay", names, {0.0, 100.0 * prep.span, prep.mean}, {"T_us"}, y,
                       prep.mean);
  }
  const std::span<const double> ys(prep.ys);
  const std::size_t n = x.size();
  const double k_max = 1.0 / prep.min_dx;

  // offset from the tail, rate by log-linear regression of the early part
  const std::size_t tail = std::max<std::size_t>(1, n / 10);
  double c0 = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) c0 += ys[i];
  c0 /= static_cast<double>(tail);
  const double head = ys[0] - c0;
  std::vector<double> tl, lv;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (ys[i] - c0) * (head >= 0.0 ? 1.0 : -1.0);
    if (d > 0.1 * std::abs(head)) {
      tl.push_back(x[i]);
      lv.push_back(std::log(d));
    }
  }
  double k0 = tl.size() >= 2 ? -regression_slope(tl, lv) : 1.0 / prep.span;
  if (!(k0 > 0.0)) k0 = 1.0 / prep.span;
  k0 = std::min(k0, k_max);

  MatrixXd basis(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    basis(i, 0) = std::exp(-k0 * x[i]);
    basis(i, 1) = 1.0;
  }
  const VectorXd c = linear_lsq(basis, ys);

  LmProblem pr;
  pr.x = x;
  pr.y = ys;
  pr.model = [](double t, std::span<const double> q) { return q[2] + q[0] * std::exp(-q[1] * t); };
  pr.start = {c(0), k0, c(1)};
  pr.lower = {-kInf, 0.0, -kInf};
  pr.upper = {kInf, k_max, kInf};
  const LmSolution sol = levenberg_marquardt(pr, options);

  FitResult out;
  out.model = "exp_decay";
  out.names = names;
  finish_common(out, sol, prep);
  const auto& q = sol.params;
  const double tau = rate_to_time(q[1], prep, "T_us", out, sol.at_upper[1]);
  out.params = {q[0] * prep.scale, tau, q[2] * prep.scale + prep.mean};
  if (std::abs(q[0]) < 1e-8) out.flags.push_back("T_us:unidentifiable");
  return out;
}

FitResult fit_lorentzian(std::span<const double> x, std::span<const double> y,
                         const LmOptions& options) {
  const Prepared prep = prepare(x, y, 7, "fit_lorentzian");
  const std::vector<std::string> names{"center", "fwhm", "amplitude", "offset"};
  const std::size_t n = x.size();
  if (prep.scale == 0.0) {
    return flat_result("lorentzian", names,
                       {0.5 * (x.front() + x.back()), prep.span, 0.0, prep.mean},
                       {"center", "fwhm"}, y, prep.mean);
  }
  const std::span<const double> ys(prep.ys);

  // baseline from the outer fifth of the points, extremum relative to it
  std::vector<double> edge;
  const std::size_t m = std::max<std::size_t>(1, n / 10);
  for (std::size_t i = 0; i < m; ++i) {
    edge.push_back(ys[i]);
    edge.push_back(ys[n - 1 - i]);
  }
  std::nth_element(edge.begin(), edge.begin() + edge.size() / 2, edge.end());
  const double off0 = edge[edge.size() / 2];
  std::size_t ext = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(ys[i] - off0) > std::abs(ys[ext] - off0)) ext = i;
  }
  const double a0 = ys[ext] - off0;
  auto half_crossing = [&](int dir) -> double {
    for (long i = static_cast<long>(ext); i >= 0 && i < static_cast<long>(n); i += dir) {
      const long prev = i - dir;
      if (std::abs(ys[i] - off0) < 0.5 * std::abs(a0) && prev >= 0 && prev < static_cast<long>(n)) {
        const double d1 = std::abs(ys[prev] - off0) - 0.5 * std::abs(a0);
        const double d2 = 0.5 * std::abs(a0) - std::abs(ys[i] - off0);
        return x[prev] + (x[i] - x[prev]) * d1 / (d1 + d2);
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  const double left = half_crossing(-1), right = half_crossing(+1);
  double w0;
  if (std::isfinite(left) && std::isfinite(right)) {
    w0 = right - left;
  } else if (std::isfinite(left)) {
    w0 = 2.0 * (x[ext] - left);
  } else if (std::isfinite(right)) {
    w0 = 2.0 * (right - x[ext]);
  } else {
    w0 = 0.5 * prep.span;
  }
  w0 = std::max(w0, prep.min_dx);

  LmProblem pr;
  pr.x = x;
  pr.y = ys;
  pr.model = [](double t, std::span<const double> q) {
    const double h2 = 0.25 * q[1] * q[1];
    const double d = t - q[0];
    return q[3] + q[2] * h2 / (d * d + h2);
  };
  pr.start = {x[ext], w0, a0, off0};
  pr.lower = {x.front() - prep.span, 1e-6 * prep.min_dx, -kInf, -kInf};
  pr.upper = {x.back() + prep.span, 100.0 * prep.span, kInf, kInf};
  const LmSolution sol = levenberg_marquardt(pr, options);

  FitResult out;
  out.model = "lorentzian";
  out.names = names;
  finish_common(out, sol, prep);
  const auto& q = sol.params;
  out.params = {q[0], q[1], q[2] * prep.scale, q[3] * prep.scale + prep.mean};
  for (std::size_t k = 0; k < 2; ++k) {
    if (sol.at_lower[k]) out.flags.push_back(names[k] + ":at_lower_bound");
    if (sol.at_upper[k]) out.flags.push_back(names[k] + ":at_upper_bound");
  }
  if (std::abs(q[2]) < 1e-8) {
    out.flags.push_back("center:unidentifiable");
    out.flags.push_back("fwhm:unidentifiable");
  }
  return out;
}

FitResult fit_damped_cosine(const Trace& t, const LmOptions& o) {
  return fit_damped_cosine(t.x, t.y(), o);
}
FitResult fit_exp_decay(const Trace& t, const LmOptions& o) { return fit_exp_decay(t.x, t.y(), o); }
FitResult fit_lorentzian(const Trace& t, const LmOptions& o) {
  return fit_lorentzian(t.x, t.y(), o);
}

const std::vector<std::string>& fit_model_names() {
  static const std::vector<std::string> names{"damped_cosine", "exp_decay", "lorentzian"};
  return names;
}

FitResult fit_by_name(const std::string& model, std::span<const double> x,
                      std::span<const double> y, const LmOptions& options) {
  if (model == "damped_cosine") return fit_damped_cosine(x, y, options);
  if (model == "exp_decay") return fit_exp_decay(x, y, options);
  if (model == "lorentzian") return fit_lorentzian(x, y, options);
  throw std::invalid_argument("unknown fit model '" + model +
                              "' (expected damped_cosine, exp_decay or lorentzian)");
}

}  // namespace nvsim
