#include "nvsim/hamiltonian.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nvsim {

namespace {

// CODATA 2018
constexpr double kBohrMagnetonJPerT = 9.2740100783e-24;
constexpr double kPlanckJs = 6.62607015e-34;
constexpr double kMu0Over4Pi = 1.00000000055e-7;

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

int level_index(double s, double m) {
  const int dim = spin_dimension(s);
  const double k = 0.5 * (dim - 1) - m;
  const long rounded = std::lround(k);
  if (std::abs(k - static_cast<double>(rounded)) > 1e-9 || rounded < 0 || rounded >= dim) {
    throw std::invalid_argument("m=" + std::to_string(m) + " is not a level of spin s=" +
                                std::to_string(s));
  }
  return static_cast<int>(rounded);
}

}  // namespace

Hamiltonian::Hamiltonian(Matrix m) : m_(std::move(m)) {
  require_hermitian(m_, "Hamiltonian");
  m_ = 0.5 * (m_ + m_.adjoint()).eval();
}

Hamiltonian Hamiltonian::operator+(const Hamiltonian& other) const {
  if (other.dim() != dim()) throw DimensionMismatch("Hamiltonian sum: dimension mismatch");
  return Hamiltonian(m_ + other.m_);
}

void NvParams::validate() const {
  require(D_mhz > 0.0, "nv.D_mhz must be > 0");
  require(g > 0.0, "nv.g must be > 0");
}

DipolarCoupling DipolarCoupling::direct(double strength_mhz) {
  DipolarCoupling c;
  c.kind = Kind::Direct;
  c.strength_mhz = strength_mhz;
  return c;
}

DipolarCoupling DipolarCoupling::geometric(double distance_nm, const Eigen::Vector3d& axis) {
  DipolarCoupling c;
  c.kind = Kind::Geometric;
  c.distance_nm = distance_nm;
  c.axis = axis;
  return c;
}

void BathParams::validate() const {
  require(n_spins >= 0, "bath.n_spins must be >= 0");
  require(static_cast<int>(couplings.size()) == n_spins,
          "bath: need exactly one coupling per explicit bath spin");
  require(g > 0.0, "bath.g must be > 0");
  require(dephasing_rate >= 0.0, "bath.dephasing_rate must be >= 0");
  for (const auto& c : couplings) {
    if (c.kind == DipolarCoupling::Kind::Geometric) {
      require(c.distance_nm > 0.0, "bath coupling distance must be > 0");
      require(std::abs(c.axis.norm() - 1.0) < 1e-9, "bath coupling axis must be a unit vector");
    }
  }
}

DriveParams DriveParams::from_b1(double f_rf_mhz, double b1_gauss, double gamma_mhz_per_gauss,
                                 double phase_rad) {
  DriveParams d;
  d.f_rf_mhz = f_rf_mhz;
  d.f1_mhz = 0.5 * gamma_mhz_per_gauss * b1_gauss;
  d.phase_rad = phase_rad;
  d.validate();
  return d;
}

void DriveParams::validate() const { require(f1_mhz >= 0.0, "drive.f1_mhz must be >= 0"); }

std::string bath_label(int k) { return "P1_" + std::to_string(k); }
std::string bath_nucleus_label(int k) { return "P1N_" + std::to_string(k); }

SpinSystem nv_system(const NvParams& p) {
  std::vector<Spin> spins{{kNvLabel, 1.0, p.gamma()}};
  if (p.include_nucleus) spins.push_back({kNvNucleusLabel, 1.0, 0.0});
  return SpinSystem(std::move(spins));
}

SpinSystem bath_system(const BathParams& bath, int k) {
  std::vector<Spin> spins{{bath_label(k), 0.5, bath.gamma()}};
  if (bath.include_nucleus) spins.push_back({bath_nucleus_label(k), 1.0, 0.0});
  return SpinSystem(std::move(spins));
}

SpinSystem joint_system(const NvParams& nv, const BathParams& bath) {
  std::vector<Spin> spins{{kNvLabel, 1.0, nv.gamma()}};
  if (nv.include_nucleus) spins.push_back({kNvNucleusLabel, 1.0, 0.0});
  for (int k = 0; k < bath.n_spins; ++k) {
    spins.push_back({bath_label(k), 0.5, bath.gamma()});
    if (bath.include_nucleus) spins.push_back({bath_nucleus_label(k), 1.0, 0.0});
  }
  return SpinSystem(std::move(spins));
}

Matrix nv_terms(const SpinSystem& system, double b_gauss, const NvParams& p) {
  p.validate();
  const std::size_t s = system.index_of(kNvLabel);
  Matrix h = p.D_mhz * system.sz(s) * system.sz(s) + p.gamma() * b_gauss * system.sz(s);
  if (p.include_nucleus) {
    const std::size_t n = system.index_of(kNvNucleusLabel);
    h += p.A_par_mhz * system.sz(s) * system.sz(n) +
         p.A_perp_mhz * (system.sx(s) * system.sx(n) + system.sy(s) * system.sy(n));
  }
  return h;
}

Hamiltonian h_nv(double b_gauss, const NvParams& p) {
  const SpinSystem system = nv_system(p);
  return Hamiltonian(nv_terms(system, b_gauss, p));
}

Matrix bath_terms(const SpinSystem& system, double b_gauss, const BathParams& bath, int k) {
  if (k < 0 || k >= bath.n_spins) {
    throw std::out_of_range("bath spin index " + std::to_string(k) + " out of range (n_spins=" +
                            std::to_string(bath.n_spins) + ")");
  }
  const std::size_t e = system.index_of(bath_label(k));
  Matrix h = bath.gamma() * b_gauss * system.sz(e);
  if (bath.include_nucleus) {
    const std::size_t n = system.index_of(bath_nucleus_label(k));
    h += bath.A_par_mhz * system.sz(e) * system.sz(n) +
         bath.A_perp_mhz * (system.sx(e) * system.sx(n) + system.sy(e) * system.sy(n));
  }
  return h;
}

Hamiltonian h_n(double b_gauss, const BathParams& bath, int k) {
  if (k < 0 || k >= bath.n_spins) {
    throw std::out_of_range("bath spin index " + std::to_string(k) + " out of range (n_spins=" +
                            std::to_string(bath.n_spins) + ")");
  }
  const SpinSystem system = bath_system(bath, k);
  return Hamiltonian(bath_terms(system, b_gauss, bath, k));
}

double dipolar_prefactor_mhz_nm3(double ga, double gb) {
  const double joule_m3 = kMu0Over4Pi * ga * gb * kBohrMagnetonJPerT * kBohrMagnetonJPerT;
  // J m^3 -> Hz m^3 -> MHz nm^3
  return joule_m3 / kPlanckJs * 1e27 * 1e-6;
}

Hamiltonian h_dipolar(const SpinSystem& system, std::size_t site_a, std::size_t site_b,
                      double r_nm, const Eigen::Vector3d& n, double ga, double gb) {
  if (!(r_nm > 0.0)) throw std::invalid_argument("h_dipolar: distance must be > 0");
  if (std::abs(n.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("h_dipolar: orientation must be a unit vector");
  }
  if (site_a == site_b) throw std::invalid_argument("h_dipolar: sites must differ");
  const double j = dipolar_prefactor_mhz_nm3(ga, gb) / (r_nm * r_nm * r_nm);
  const Matrix& ax = system.sx(site_a);
  const Matrix& ay = system.sy(site_a);
  const Matrix& az = system.sz(site_a);
  const Matrix& bx = system.sx(site_b);
  const Matrix& by = system.sy(site_b);
  const Matrix& bz = system.sz(site_b);
  const Matrix a_dot_b = ax * bx + ay * by + az * bz;
  const Matrix a_n = n.x() * ax + n.y() * ay + n.z() * az;
  const Matrix b_n = n.x() * bx + n.y() * by + n.z() * bz;
  return Hamiltonian(j * (a_dot_b - 3.0 * a_n * b_n));
}

Hamiltonian h_double_flip(const SpinSystem& system, std::size_t site_a, std::size_t site_b,
                          double strength_mhz) {
  if (site_a == site_b) throw std::invalid_argument("h_double_flip: sites must differ");
  return Hamiltonian(strength_mhz * (system.sx(site_a) * system.sx(site_b) -
                                     system.sy(site_a) * system.sy(site_b)));
}

Matrix coupling_terms(const SpinSystem& system, std::size_t site_a, std::size_t site_b,
                      const DipolarCoupling& coupling, double ga, double gb) {
  if (coupling.kind == DipolarCoupling::Kind::Direct) {
    return h_double_flip(system, site_a, site_b, coupling.strength_mhz).matrix();
  }
  return h_dipolar(system, site_a, site_b, coupling.distance_nm, coupling.axis, ga, gb).matrix();
}

Hamiltonian h_joint(double b_gauss, const NvParams& nv, const BathParams& bath) {
  bath.validate();
  const SpinSystem system = joint_system(nv, bath);
  Matrix h = nv_terms(system, b_gauss, nv);
  const std::size_t s = system.index_of(kNvLabel);
  for (int k = 0; k < bath.n_spins; ++k) {
    h += bath_terms(system, b_gauss, bath, k);
    h += coupling_terms(system, s, system.index_of(bath_label(k)), bath.couplings[k], nv.g,
                        bath.g);
  }
  return Hamiltonian(std::move(h));
}

double resonance_field(const NvParams& p) { return p.D_mhz / (2.0 * p.gamma()); }

double level_energy(const Eigensystem& eig, int index) {
  Eigen::Index best = 0;
  eig.vectors.row(index).cwiseAbs2().maxCoeff(&best);
  return eig.values(best);
}

double nv_transition_mhz(double b_gauss, const NvParams& p, double m_a, double m_b) {
  NvParams bare = p;
  bare.include_nucleus = false;
  const Eigensystem eig = eigensystem(h_nv(b_gauss, bare).matrix());
  return level_energy(eig, level_index(1.0, m_b)) - level_energy(eig, level_index(1.0, m_a));
}

double resonance_field_numeric(const NvParams& p, double tol_gauss) {
  p.validate();
  // mismatch between the N-V 0 -> -1 splitting and the bath Zeeman splitting
  auto mismatch = [&](double b) { return nv_transition_mhz(b, p) - p.gamma() * b; };
  double lo = 0.0;
  double hi = 0.999 * p.D_mhz / p.gamma();
  if (mismatch(lo) * mismatch(hi) > 0.0) {
    throw std::runtime_error("resonance_field_numeric: no sign change in bracket");
  }
  while (hi - lo > tol_gauss) {
    const double mid = 0.5 * (lo + hi);
    if (mismatch(lo) * mismatch(mid) <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Matrix RotatingFrame::drive_term(double f1_mhz, double phase_rad) const {
  const Complex e = std::polar(0.5 * f1_mhz, -phase_rad);
  return e * pair_lowering + std::conj(e) * pair_lowering.adjoint();
}

RotatingFrame rotating_frame(const Hamiltonian& h_static, const SpinSystem& system,
                             const DriveParams& drive, const AddressedTransition& transition,
                             const std::vector<std::size_t>& co_rotating_sites, double b_gauss) {
  drive.validate();
  const int n = system.total_dim();
  if (h_static.dim() != n) {
    throw DimensionMismatch("rotating_frame: Hamiltonian dimension " +
                            std::to_string(h_static.dim()) + " does not match system dimension " +
                            std::to_string(n));
  }
  const std::size_t site = transition.site;
  const double s = system.spins().at(site).s;
  const int d = system.site_dim(site);
  const int ka = level_index(s, transition.m_a);
  const int kb = level_index(s, transition.m_b);
  if (ka == kb) throw std::invalid_argument("rotating_frame: transition levels must differ");

  const Matrix& h = h_static.matrix();
  const int rest = n / d;
  auto mean_energy = [&](double m) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(system.m_of(site, i) - m) < 1e-9) acc += h(i, i).real();
    }
    return acc / rest;
  };
  const double ea = mean_energy(transition.m_a);
  const double eb = mean_energy(transition.m_b);
  if (std::abs(eb - ea) < 1e-9) {
    throw std::invalid_argument("rotating_frame: ambiguous transition, levels m=" +
                                std::to_string(transition.m_a) + " and m=" +
                                std::to_string(transition.m_b) + " are degenerate");
  }
  const double m_high = eb > ea ? transition.m_b : transition.m_a;

  for (std::size_t c : co_rotating_sites) {
    if (c == site) throw std::invalid_argument("rotating_frame: driven site cannot co-rotate");
    system.site_dim(c);
  }

  // frame operator, diagonal in the product basis
  RealVector q = RealVector::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (std::abs(system.m_of(site, i) - m_high) < 1e-9) q(i) += 1.0;
    for (std::size_t c : co_rotating_sites) {
      const double sign = system.spins()[c].gamma_mhz_per_gauss * b_gauss;
      if (sign != 0.0) q(i) += (sign > 0.0 ? 1.0 : -1.0) * system.m_of(c, i);
    }
  }

  Matrix rot = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (std::abs(q(i) - q(j)) < 1e-9) rot(i, j) = h(i, j);
    }
    rot(i, i) -= drive.f_rf_mhz * q(i);
  }

  // keep only the addressed pair of the driven site, ordered (m_a, m_b)
  int before = 1;
  int after = 1;
  for (std::size_t k = 0; k < site; ++k) before *= system.spins()[k].dim();
  for (std::size_t k = site + 1; k < system.size(); ++k) after *= system.spins()[k].dim();
  const int reduced = 2 * before * after;
  std::vector<int> keep;
  keep.reserve(reduced);
  for (int b0 = 0; b0 < before; ++b0) {
    for (int level : {ka, kb}) {
      for (int a0 = 0; a0 < after; ++a0) keep.push_back((b0 * d + level) * after + a0);
    }
  }

  RotatingFrame frame;
  std::vector<Spin> spins = system.spins();
  spins[site] = Spin{spins[site].label, 0.5, spins[site].gamma_mhz_per_gauss};
  frame.system = SpinSystem(std::move(spins));

  Matrix sub(reduced, reduced);
  Matrix qsub = Matrix::Zero(reduced, reduced);
  for (int i = 0; i < reduced; ++i) {
    for (int j = 0; j < reduced; ++j) sub(i, j) = rot(keep[i], keep[j]);
    qsub(i, i) = q(keep[i]);
  }
  frame.undriven = Hamiltonian(sub);
  frame.frame_operator = qsub;

  Matrix pair_a = Matrix::Zero(2, 2);
  pair_a(0, 0) = 1.0;
  Matrix pair_b = Matrix::Zero(2, 2);
  pair_b(1, 1) = 1.0;
  Matrix lowering = Matrix::Zero(2, 2);
  lowering(0, 1) = 1.0;
  frame.lower_projector = embed(pair_a, site, frame.system);
  frame.upper_projector = embed(pair_b, site, frame.system);
  frame.pair_lowering = embed(lowering, site, frame.system);
  frame.transition_mhz = eb - ea;
  frame.drive = drive;
  frame.hamiltonian =
      Hamiltonian(frame.undriven.matrix() + frame.drive_term(drive.f1_mhz, drive.phase_rad));

  // dipole-allowed transitions to levels outside the pair are neglected
  frame.leakage_detuning_mhz = std::numeric_limits<double>::infinity();
  for (int kc = 0; kc < d; ++kc) {
    if (kc == ka || kc == kb) continue;
    const double mc = 0.5 * (d - 1) - kc;
    const double ec = mean_energy(mc);
    for (double m : {transition.m_a, transition.m_b}) {
      if (std::abs(std::abs(mc - m) - 1.0) > 1e-9) continue;
      const double f = std::abs(ec - mean_energy(m));
      frame.leakage_detuning_mhz =
          std::min(frame.leakage_detuning_mhz, std::abs(f - drive.f_rf_mhz));
    }
  }
  return frame;
}

Hamiltonian two_level_rwa(double f1_mhz, double detuning_mhz, double phase_rad) {
  Matrix h = Matrix::Zero(2, 2);
  const Complex e = std::polar(0.5 * f1_mhz, -phase_rad);
  h(0, 1) = e;
  h(1, 0) = std::conj(e);
  h(1, 1) = detuning_mhz;
  return Hamiltonian(h);
}

}  // namespace nvsim
