#pragma once

// Physical Hamiltonians of the N-V ground state, substitutional nitrogen (P1)
// bath spins and their dipolar coupling, plus the rotating-wave frame used for
// resonant RF driving. Field is always along the N-V axis (z).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nvsim/spinops.hpp"

namespace nvsim {

// Bohr magneton over Planck's constant.
inline constexpr double kBohrMagnetonMHzPerGauss = 1.3996245;

// Hermitian frequency operator in MHz on a given spin system.
class Hamiltonian {
 public:
  Hamiltonian() = default;
  explicit Hamiltonian(Matrix m);

  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  Hamiltonian operator+(const Hamiltonian& other) const;

 private:
  Matrix m_;
};

struct NvParams {
  double D_mhz = 2880.0;
  double g = 2.00;
  double A_par_mhz = 2.2;
  double A_perp_mhz = 2.1;
  bool include_nucleus = false;

  double gamma() const { return g * kBohrMagnetonMHzPerGauss; }
  void validate() const;
};

// Coupling between the N-V electron and one bath electron. Either geometric
// (point dipole at distance r along unit vector n) or a direct strength c of
// the double-flip term c (SxSx - SySy), which is the part of the dipolar
// tensor that is energy conserving near the 514 G cross-relaxation field.
struct DipolarCoupling {
  enum class Kind { Direct, Geometric };
  Kind kind = Kind::Direct;
  double strength_mhz = 0.5;
  double distance_nm = 1.0;
  Eigen::Vector3d axis = Eigen::Vector3d(1.0, 0.0, 0.0);

  static DipolarCoupling direct(double strength_mhz);
  static DipolarCoupling geometric(double distance_nm, const Eigen::Vector3d& axis);
};

struct BathParams {
  int n_spins = 1;
  std::vector<DipolarCoupling> couplings{DipolarCoupling::direct(0.5)};
  double g = 2.00;
  double A_par_mhz = 114.0;
  double A_perp_mhz = 81.0;
  bool include_nucleus = false;
  // Markovian dephasing of each explicit bath electron, us^-1 (its ESR linewidth).
  double dephasing_rate = 20.0;

  double gamma() const { return g * kBohrMagnetonMHzPerGauss; }
  void validate() const;
};

struct DriveParams {
  double f_rf_mhz = 0.0;
  double f1_mhz = 0.0;
  double phase_rad = 0.0;

  // f1 = gamma * B1 / 2 (rotating-wave factor 1/2).
  static DriveParams from_b1(double f_rf_mhz, double b1_gauss, double gamma_mhz_per_gauss,
                             double phase_rad = 0.0);
  void validate() const;
};

// Site labels used by the builders below.
inline constexpr const char* kNvLabel = "NV";
inline constexpr const char* kNvNucleusLabel = "N14";
std::string bath_label(int k);
std::string bath_nucleus_label(int k);

SpinSystem nv_system(const NvParams& p);
SpinSystem bath_system(const BathParams& bath, int k);
// NV (+ nucleus), then for each bath spin: electron (+ nucleus).
SpinSystem joint_system(const NvParams& nv, const BathParams& bath);

// D Sz^2 + gamma B Sz (+ A_par Sz Iz + A_perp (Sx Ix + Sy Iy) with the nucleus).
Hamiltonian h_nv(double b_gauss, const NvParams& p);
// Same terms added on an arbitrary system containing the NV sites.
Matrix nv_terms(const SpinSystem& system, double b_gauss, const NvParams& p);

// Zeeman (+ hyperfine) Hamiltonian of bath spin k on its own space.
Hamiltonian h_n(double b_gauss, const BathParams& bath, int k);
Matrix bath_terms(const SpinSystem& system, double b_gauss, const BathParams& bath, int k);

// Point-dipole prefactor J0 in MHz nm^3 for two electron spins with g-factors ga, gb.
double dipolar_prefactor_mhz_nm3(double ga = 2.0, double gb = 2.0);

// J0/r^3 [Sa.Sb - 3 (Sa.n)(Sb.n)].
Hamiltonian h_dipolar(const SpinSystem& system, std::size_t site_a, std::size_t site_b,
                      double r_nm, const Eigen::Vector3d& n, double ga = 2.0, double gb = 2.0);
// c (Sx_a Sx_b - Sy_a Sy_b).
Hamiltonian h_double_flip(const SpinSystem& system, std::size_t site_a, std::size_t site_b,
                          double strength_mhz);
Matrix coupling_terms(const SpinSystem& system, std::size_t site_a, std::size_t site_b,
                      const DipolarCoupling& coupling, double ga, double gb);

// Full NV + bath Hamiltonian on joint_system(nv, bath).
Hamiltonian h_joint(double b_gauss, const NvParams& nv, const BathParams& bath);

// Field where the N-V 0 -> -1 splitting equals the bath-electron Zeeman
// splitting: D / (2 gamma).
double resonance_field(const NvParams& p);
// Same field located by bisection on eigensystem(h_nv(B)) output.
double resonance_field_numeric(const NvParams& p, double tol_gauss = 1e-6);

// Energy of the eigenstate with the largest overlap on product basis state `index`.
double level_energy(const Eigensystem& eig, int index);
// Transition frequency between NV electron levels m_a -> m_b (hyperfine off).
double nv_transition_mhz(double b_gauss, const NvParams& p, double m_a = 0.0, double m_b = -1.0);

// Which NV electron levels the RF drive couples. (0, -1) is the transition
// driven selectively in the experiments.
struct AddressedTransition {
  std::size_t site = 0;
  double m_a = 0.0;
  double m_b = -1.0;
};

// Time-independent rotating-wave Hamiltonian on the addressed pair (tensored
// with all other sites). Basis: the driven site is replaced by a two-level
// factor ordered (m_a, m_b); other sites keep their order.
struct RotatingFrame {
  SpinSystem system;        // reduced system
  Hamiltonian hamiltonian;  // detuning + secular couplings + drive
  Hamiltonian undriven;     // same without the drive term
  Matrix frame_operator;    // Q such that H_rot = P (H_sec - f_rf Q) P + drive
  Matrix lower_projector;   // |m_a><m_a| (x) 1
  Matrix upper_projector;   // |m_b><m_b| (x) 1
  Matrix pair_lowering;     // |m_a><m_b| (x) 1
  double transition_mhz = 0.0;       // mean bare splitting E_b - E_a
  double leakage_detuning_mhz = 0;   // |f_rf - nearest neglected transition| (inf if none)
  DriveParams drive;

  // Drive term f1/2 (e^{-i phase} |a><b| + h.c.) (x) 1.
  Matrix drive_term(double f1_mhz, double phase_rad) const;
};

// Bath electrons in `co_rotating_sites` are also moved to the frame rotating at
// f_rf (frame operator sign(gamma B) Sz), so resonant exchange terms with them
// stay time independent. `b_gauss` fixes those signs.
RotatingFrame rotating_frame(const Hamiltonian& h_static, const SpinSystem& system,
                             const DriveParams& drive, const AddressedTransition& transition,
                             const std::vector<std::size_t>& co_rotating_sites = {},
                             double b_gauss = 0.0);

// Two-level Hamiltonian [[0, f1/2 e^{-i phi}], [f1/2 e^{i phi}, df]] in basis (|0>, |-1>).
Hamiltonian two_level_rwa(double f1_mhz, double detuning_mhz, double phase_rad = 0.0);

}  // namespace nvsim
