#include "nvsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "nvsim/parallel.hpp"
#include "nvsim/random.hpp"

namespace nvsim {

DensityMatrix::DensityMatrix(Matrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
    throw DimensionMismatch("density matrix must be square and non-empty");
  }
  if (hermiticity_error() > 1e-8) throw NotHermitian("density matrix is not Hermitian");
  if (trace_error() > 1e-8) {
    throw std::invalid_argument("density matrix trace differs from 1 by " +
                                std::to_string(trace_error()));
  }
  if (min_eigenvalue() < -1e-7) {
    throw std::invalid_argument("density matrix has negative eigenvalue " +
                                std::to_string(min_eigenvalue()));
  }
}

DensityMatrix DensityMatrix::unchecked(Matrix rho) {
  DensityMatrix out;
  out.rho_ = std::move(rho);
  return out;
}

DensityMatrix DensityMatrix::basis_state(int dim, int index) {
  Matrix rho = Matrix::Zero(dim, dim);
  rho(index, index) = 1.0;
  return unchecked(std::move(rho));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return unchecked(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const Vector unit = psi / psi.norm();
  return unchecked(unit * unit.adjoint());
}

double DensityMatrix::trace_error() const { return std::abs(rho_.trace() - Complex(1.0, 0.0)); }

double DensityMatrix::hermiticity_error() const { return nvsim::hermiticity_error(rho_); }

double DensityMatrix::min_eigenvalue() const {
  const Matrix sym = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double DensityMatrix::expectation(const Matrix& op) const {
  return (op * rho_).trace().real();
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::unchecked(Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval());
}

DensityMatrix trace_out_left(const DensityMatrix& rho, int left_dim) {
  const int n = rho.dim();
  if (left_dim <= 0 || n % left_dim != 0) throw DimensionMismatch("trace_out_left: bad split");
  const int right = n / left_dim;
  Matrix out = Matrix::Zero(right, right);
  for (int l = 0; l < left_dim; ++l) out += rho.matrix().block(l * right, l * right, right, right);
  return DensityMatrix::unchecked(std::move(out));
}

DensityMatrix trace_out_right(const DensityMatrix& rho, int left_dim) {
  const int n = rho.dim();
  if (left_dim <= 0 || n % left_dim != 0) throw DimensionMismatch("trace_out_right: bad split");
  const int right = n / left_dim;
  Matrix out = Matrix::Zero(left_dim, left_dim);
  for (int i = 0; i < left_dim; ++i) {
    for (int j = 0; j < left_dim; ++j) {
      out(i, j) = rho.matrix().block(i * right, j * right, right, right).trace();
    }
  }
  return DensityMatrix::unchecked(std::move(out));
}

void NoiseModel::validate() const {
  if (sigma_static_mhz < 0.0) throw std::invalid_argument("noise.sigma_static_mhz must be >= 0");
  if (gamma_phi < 0.0) throw std::invalid_argument("noise.gamma_phi must be >= 0");
  if (gamma_1 < 0.0) throw std::invalid_argument("noise.gamma_1 must be >= 0");
  if (n_samples < 1) throw std::invalid_argument("noise.n_samples must be >= 1");
  if (nuclear.enabled) {
    double total = 0.0;
    for (double p : nuclear.populations) {
      if (p < 0.0) throw std::invalid_argument("noise.nuclear_populations must be >= 0");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw std::invalid_argument("noise.nuclear_populations must sum to 1");
    }
  }
}

double rabi_probability(double f1_mhz, double detuning_mhz, double t_us) {
  const double omega2 = f1_mhz * f1_mhz + detuning_mhz * detuning_mhz;
  if (omega2 == 0.0) return 1.0;
  const double s = std::sin(kPi * std::sqrt(omega2) * t_us);
  return 1.0 - f1_mhz * f1_mhz / omega2 * s * s;
}

DensityMatrix propagate(std::span<const TimedHamiltonian> segments, const DensityMatrix& rho0) {
  Matrix rho = rho0.matrix();
  for (const auto& seg : segments) {
    if (seg.duration_us < 0.0) throw std::invalid_argument("propagate: negative duration");
    if (seg.h.dim() != rho.rows()) {
      throw DimensionMismatch("propagate: Hamiltonian dimension " + std::to_string(seg.h.dim()) +
                              " vs state dimension " + std::to_string(rho.rows()));
    }
    const Matrix u = expm_unitary(seg.h.matrix(), seg.duration_us);
    rho = u * rho * u.adjoint();
  }
  return DensityMatrix::unchecked(std::move(rho));
}

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, int dim) { return Eigen::Map<const Matrix>(v.data(), dim, dim); }

Matrix liouvillian(const Hamiltonian& h, std::span<const CollapseOperator> ops) {
  const int d = h.dim();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix& hm = h.matrix();
  Matrix l = Complex(0.0, -kTwoPi) *
             (Eigen::kroneckerProduct(id, hm).eval() -
              Eigen::kroneckerProduct(hm.transpose(), id).eval());
  for (const auto& c : ops) {
    if (c.rate < 0.0) throw std::invalid_argument("collapse operator rate must be >= 0");
    if (c.op.rows() != d || c.op.cols() != d) {
      throw DimensionMismatch("collapse operator dimension does not match Hamiltonian");
    }
    if (c.rate == 0.0) continue;
    const Matrix ldl = c.op.adjoint() * c.op;
    l += c.rate * (Eigen::kroneckerProduct(c.op.conjugate(), c.op).eval() -
                   0.5 * Eigen::kroneckerProduct(id, ldl).eval() -
                   0.5 * Eigen::kroneckerProduct(ldl.transpose(), id).eval());
  }
  return l;
}

double frequency_scale(const Hamiltonian& h, std::span<const CollapseOperator> ops) {
  const Eigensystem eig = eigensystem(h.matrix());
  double scale = eig.values.size() > 0 ? eig.values.maxCoeff() - eig.values.minCoeff() : 0.0;
  double dissipative = 0.0;
  for (const auto& c : ops) {
    const double norm = max_abs(c.op);
    dissipative += c.rate * norm * norm;
  }
  return std::max({scale, dissipative, 1e-12});
}

namespace {

Matrix lindblad_rhs(const Matrix& hm, std::span<const CollapseOperator> ops, const Matrix& rho) {
  Matrix out = Complex(0.0, -kTwoPi) * (hm * rho - rho * hm);
  for (const auto& c : ops) {
    if (c.rate == 0.0) continue;
    const Matrix ldl = c.op.adjoint() * c.op;
    out += c.rate * (c.op * rho * c.op.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

Matrix integrate_rk4(const Hamiltonian& h, std::span<const CollapseOperator> ops,
                     const Matrix& rho0, double t_us) {
  // step bound 1/(400 * scale) is well inside the 1/(50 * scale) requirement and
  // keeps the global error below 1e-9 over tens of periods
  const double max_step = 1.0 / (400.0 * frequency_scale(h, ops));
  const long steps = std::max(1L, static_cast<long>(std::ceil(t_us / max_step)));
  const double dt = t_us / static_cast<double>(steps);
  const Matrix& hm = h.matrix();
  Matrix rho = rho0;
  for (long k = 0; k < steps; ++k) {
    const Matrix k1 = lindblad_rhs(hm, ops, rho);
    const Matrix k2 = lindblad_rhs(hm, ops, rho + 0.5 * dt * k1);
    const Matrix k3 = lindblad_rhs(hm, ops, rho + 0.5 * dt * k2);
    const Matrix k4 = lindblad_rhs(hm, ops, rho + dt * k3);
    rho += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!rho.allFinite()) {
      std::ostringstream msg;
      msg << "RK4 integration diverged at step " << k << " of " << steps << " (dt=" << dt
          << " us, t=" << t_us << " us)";
      throw IntegrationError(msg.str());
    }
  }
  const double drift = std::abs(rho.trace() - Complex(1.0, 0.0));
  if (drift > 1e-7) {
    std::ostringstream msg;
    msg << "RK4 integration lost trace: |tr rho - 1| = " << drift << " after " << steps
        << " steps of " << dt << " us";
    throw IntegrationError(msg.str());
  }
  return rho;
}

}  // namespace

DensityMatrix evolve_lindblad(const Hamiltonian& h, std::span<const CollapseOperator> ops,
                              const DensityMatrix& rho0, double t_us, LindbladMethod method) {
  if (t_us < 0.0) throw std::invalid_argument("evolve_lindblad: negative time");
  if (rho0.dim() != h.dim()) throw DimensionMismatch("evolve_lindblad: state/H dimension mismatch");
  for (const auto& c : ops) {
    if (c.rate < 0.0) throw std::invalid_argument("collapse operator rate must be >= 0");
  }
  if (t_us == 0.0) return rho0;
  if (method == LindbladMethod::RK4) {
    return DensityMatrix::unchecked(integrate_rk4(h, ops, rho0.matrix(), t_us));
  }
  const Matrix prop = (liouvillian(h, ops) * t_us).exp();
  return DensityMatrix::unchecked(unvec(prop * vec(rho0.matrix()), h.dim()));
}

std::vector<DetuningSample> detuning_samples(const NoiseModel& noise) {
  noise.validate();
  std::vector<double> gaussian;
  if (noise.sigma_static_mhz == 0.0) {
    gaussian.push_back(0.0);
  } else {
    gaussian.reserve(noise.n_samples);
    const double n = static_cast<double>(noise.n_samples);
    for (int i = 0; i < noise.n_samples; ++i) {
      auto engine = make_engine(noise.seed, static_cast<std::uint64_t>(i));
      if (noise.sampling == DetuningSampling::Independent) {
        std::normal_distribution<double> normal(0.0, noise.sigma_static_mhz);
        gaussian.push_back(normal(engine));
        continue;
      }
      // one uniform draw inside each of n equal-probability strata
      const double u01 = (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
      const double u = (static_cast<double>(i) + u01) / n;
      gaussian.push_back(noise.sigma_static_mhz * std::sqrt(2.0) *
                         boost::math::erf_inv(2.0 * u - 1.0));
    }
  }
  const double base_weight = 1.0 / static_cast<double>(gaussian.size());
  std::vector<DetuningSample> out;
  if (!noise.nuclear.enabled) {
    for (double d : gaussian) out.push_back({d, base_weight});
    return out;
  }
  // 0 -> -1 transition shifts by -A mI for nuclear state mI
  constexpr std::array<double, 3> m_nuclear{1.0, 0.0, -1.0};
  for (double d : gaussian) {
    for (std::size_t k = 0; k < 3; ++k) {
      const double p = noise.nuclear.populations[k];
      if (p == 0.0) continue;
      out.push_back({d - noise.nuclear.A_par_mhz * m_nuclear[k], base_weight * p});
    }
  }
  return out;
}

Trace ensemble_average(const std::function<Trace(double)>& experiment, const NoiseModel& noise,
                       int threads) {
  const std::vector<DetuningSample> samples = detuning_samples(noise);
  std::vector<Trace> traces(samples.size());
  parallel_for(samples.size(), threads,
               [&](std::size_t i) { traces[i] = experiment(samples[i].detuning_mhz); });
  Trace mean = traces.front();
  for (auto& [name, values] : mean.columns) std::fill(values.begin(), values.end(), 0.0);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const Trace& t = traces[i];
    if (t.x != mean.x || t.columns.size() != mean.columns.size()) {
      throw DimensionMismatch("ensemble_average: traces have different shapes");
    }
    for (std::size_t c = 0; c < mean.columns.size(); ++c) {
      auto& acc = mean.columns[c].second;
      const auto& v = t.columns[c].second;
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += samples[i].weight * v[k];
    }
  }
  return mean;
}

DensityMatrix steady_state(const Hamiltonian& h, std::span<const CollapseOperator> ops) {
  const int d = h.dim();
  const Matrix l = liouvillian(h, ops);
  Eigen::JacobiSVD<Matrix> svd(l, Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const double tol = 1e-9 * std::max(1.0, sv(0));
  int nullity = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) < tol) ++nullity;
  }
  if (nullity != 1) {
    throw DegenerateSteadyState("steady_state: Liouvillian null space has dimension " +
                                std::to_string(nullity) + " (need exactly 1)");
  }
  Matrix rho = unvec(svd.matrixV().col(sv.size() - 1), d);
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix::unchecked(std::move(rho));
}

}  // namespace nvsim
