#pragma once

#include <complex>

#include <Eigen/Dense>

namespace rotor {

/// Truncated single-mode Fock space {|0>, ..., |N>}.
struct FockSpace {
  int N = 1;
  int dim() const { return N + 1; }
  /// Joint index of |a>|b> in the two-mode space.
  int joint(int a, int b) const { return a * dim() + b; }
  void validate() const;
};

struct PrimitiveSpec {
  enum class Kind { coherent, squeezed_coherent };
  Kind kind = Kind::coherent;
  std::complex<double> alpha{3.0, 0.0};
  /// Squeezing S(zeta) = exp((conj(zeta) a^2 - zeta a^dag^2) / 2); zeta < 0 with
  /// real alpha narrows the phase distribution.
  std::complex<double> zeta{0.0, 0.0};

  double mean_photons() const;
  double photon_stddev() const;
};

inline constexpr double kLeakageTolerance = 1e-8;

/// Default cutoff: ceil(nbar + 6 dn), raised until the state keeps all but
/// 1e-10 of its norm.
int default_cutoff(const PrimitiveSpec& spec);

struct Primitive {
  Eigen::VectorXcd ket;
  double leakage = 0.0;  // norm^2 outside the cutoff before renormalisation
  double mean_n = 0.0;
  double delta_n = 0.0;
};

/// D(alpha) S(zeta)|0>, built by matrix exponentials on a 1.5x working cutoff
/// and truncated. Throws EngineError if the leakage exceeds kLeakageTolerance.
Primitive primitive_state(const PrimitiveSpec& spec, const FockSpace& space);

struct FockOperator {
  enum class Tag { generic, unitary, kraus, povm_element, projector };
  Eigen::MatrixXcd matrix;
  Tag tag = Tag::generic;
};

FockOperator annihilation_op(const FockSpace& space);
FockOperator number_op(const FockSpace& space);

/// R_theta = exp(i theta n).
FockOperator rotation_op(double theta, const FockSpace& space);

/// Diagonal of CROT^{1/m} = exp(i 2 pi n_A n_B / m) on the joint space.
Eigen::VectorXcd crot_op(int m, const FockSpace& space);

/// L_k = sqrt(gamma^k / k!) (1 - gamma)^{n/2} a^k.
FockOperator loss_kraus(int k, double gamma_l, const FockSpace& space);

/// Section POVM element M_k of the canonical phase measurement with d sections.
FockOperator phase_povm(int k, int d, const FockSpace& space);

/// sum_n M_{n Delta_c + x}.
FockOperator modular_phase_pvm(int x, int delta_c, int d, const FockSpace& space);

/// Projector onto photon numbers congruent to x modulo Delta_f.
FockOperator modular_number_pvm(int x, int delta_f, const FockSpace& space);

/// Joint density on the (N+1)^2 two-mode space; trace may drop below one.
struct TwoModeDensity {
  FockSpace space;
  Eigen::MatrixXcd rho;

  static TwoModeDensity pure(const FockSpace& space, const Eigen::VectorXcd& ket);
  double trace() const { return rho.trace().real(); }
  double hermiticity_error() const;
};

struct LossResult {
  TwoModeDensity state;
  double deficit = 0.0;  // trace lost by stopping at k_max
};

/// Loss on both modes with Kraus orders 0..k_max (k_max < 0 means N, exact).
LossResult loss_apply(const TwoModeDensity& rho, double gamma_l, int k_max = -1);

/// Scales rho[(a,b),(a',b')] by exp(-gamma_phi ((a-a')^2 + (b-b')^2) / 2).
TwoModeDensity dephasing_apply(const TwoModeDensity& rho, double gamma_phi);

/// (A ⊗ B) rho (A ⊗ B)^dag.
TwoModeDensity apply_local(const TwoModeDensity& rho, const Eigen::MatrixXcd& A,
                           const Eigen::MatrixXcd& B);

/// (A ⊗ B) |psi>.
Eigen::VectorXcd apply_local(const FockSpace& space, const Eigen::VectorXcd& ket,
                             const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B);

/// R_{theta_A} ⊗ R_{theta_B} applied by conjugation.
TwoModeDensity rotate_local(const TwoModeDensity& rho, double theta_A, double theta_B);

/// Keeps photon numbers a ≡ x_A (mod Delta_f) and b ≡ x_B on both sides.
TwoModeDensity number_project(const TwoModeDensity& rho, int x_A, int x_B, int delta_f);

enum class EntangledVariant { ancilla_equivalent, dual };

struct EntangledState {
  FockSpace space;
  Eigen::VectorXcd ket;
  /// max_k |<Theta| R_{2 pi k / m_i} |Theta>|^2 over k != 0.
  double max_overlap = 0.0;
};

inline constexpr double kOrthogonalityBudget = 1e-3;

double max_rotated_overlap(const Eigen::VectorXcd& primitive, int m);

/// ancilla_equivalent: (1/sqrt m_i) sum_k e^{-2 pi i k x / m_i} |k>|k> with
/// |k> = R_{2 pi k / m_i}|Theta> (x = 0 by default). dual: CROT^{1/m_i}|Theta>|Theta>,
/// i.e. (1/sqrt m_i) sum_k |k>|k_+>. Normalised exactly. Throws EngineError if
/// max_overlap exceeds the budget.
EntangledState prepare_entangled(const FockSpace& space, const Eigen::VectorXcd& primitive,
                                 int m_i, EntangledVariant variant,
                                 double budget = kOrthogonalityBudget, int x = 0);

/// Explicit three-mode circuit: CROT_AC CROT_BC on |Theta>^{⊗3}, then M_x with
/// m_i sections on the ancilla. Returns the unnormalised two-mode state.
TwoModeDensity three_mode_preparation(const FockSpace& space, const Eigen::VectorXcd& primitive,
                                      int m_i, int x);

/// delta_k = <Theta| M_k |Theta>.
double section_overlap(const Eigen::VectorXcd& primitive, int k, int d, const FockSpace& space);

/// 1 - F_max = 2 delta_{ceil(Delta_c/2)}.
double fmax_bound(const Eigen::VectorXcd& primitive, int delta_c, int d, const FockSpace& space);

}  // namespace rotor
