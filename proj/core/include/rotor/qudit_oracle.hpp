#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rotor/discrete_protocol.hpp"

namespace rotor {

enum class Cavity { A, B };

/// Two-qudit pure state; amplitude of |k_A>|k_B> sits at k_A * d + k_B.
class QuditState {
 public:
  explicit QuditState(int d);
  QuditState(int d, Eigen::VectorXcd amplitudes);

  int d() const { return d_; }
  std::complex<double>& at(int kA, int kB) { return amp_(kA * d_ + kB); }
  std::complex<double> at(int kA, int kB) const { return amp_(kA * d_ + kB); }
  const Eigen::VectorXcd& amplitudes() const { return amp_; }
  double norm() const { return amp_.norm(); }

  /// d x d coefficient matrix, rows indexed by Alice.
  Eigen::MatrixXcd as_matrix() const;
  static QuditState from_matrix(const Eigen::MatrixXcd& m);

 private:
  int d_;
  Eigen::VectorXcd amp_;
};

/// Weighted pure branches; weights may sum below one after post-selection.
struct QuditMixture {
  std::vector<std::pair<double, QuditState>> branches;
  double total_weight() const;
};

/// (1/sqrt(m_i)) sum_k |k d/m_i>|k d/m_i>.
QuditState initial_state(int d, int m_i);

/// Von Neumann entropy (bits) of either reduced state.
double entanglement_entropy(const QuditState& state);

enum class PauliKind { X, Z };

/// X^p |k> = |k + p>,  Z^p |j> = exp(-2 pi i j p / d) |j>.
QuditState apply_pauli(const QuditState& state, Cavity which, PauliKind kind, int power);

/// |k_+> = (1/sqrt d) sum_j exp(-2 pi i j k / d) |j>.
Eigen::VectorXcd dual_basis_vector(int d, int k);

/// Re-expresses one cavity in dual coordinates (amplitude of |k_+>). The
/// inverse flag maps dual coordinates back.
QuditState dual_transform(const QuditState& state, Cavity which, bool inverse = false);

/// Normalised target built from the modular dual states |x^{m_c}_+>.
QuditState target_state(const ProtocolParams& params);

/// Noisy ensemble of the initial state, one branch per error configuration.
QuditMixture noisy_mixture(const QuditState& initial, const DephasingTable& deph,
                           const LossTable& loss);

/// Correction exponents, in units of Delta_c (stage one) and Delta_f (stage
/// two). Alice applies X^{-A1 + a1 Delta_c} then Z^{-A2 - a2 Delta_f}; Bob likewise.
struct OracleCorrections {
  std::function<int(int A1, int B1)> alice1;
  std::function<int(int A1, int B1)> bob1;
  std::function<int(int A2, int B2)> alice2;
  std::function<int(int A2, int B2)> bob2;
};

OracleCorrections protocol_corrections(const RotationDict& rot, const LossDict& ld);
OracleCorrections nocomm_corrections(const std::vector<int>& f);

struct OracleRecord {
  OutcomeTuple outcome;
  double fidelity = 0.0;
  double probability = 0.0;
};

struct OracleReport {
  std::vector<OracleRecord> records;  // all_outcomes() order
  std::optional<double> f_avg;
  double p_abort = 0.0;
};

/// Explicit simulation: errors as qudit unitaries, both PVM stages, corrections
/// and overlap with the target. Requires d <= 16 and l_max <= 4.
OracleReport simulate_with(const QuditState& initial, const ProtocolParams& params,
                           const DephasingTable& deph, const LossTable& loss,
                           const OracleCorrections& corrections);

/// Same pipeline on an explicit noisy ensemble.
OracleReport simulate_mixture(const QuditMixture& noisy, const ProtocolParams& params,
                              const OracleCorrections& corrections);

OracleReport simulate_protocol(const ProtocolParams& params, const DephasingTable& deph,
                               const LossTable& loss);

/// Ensemble X_B^delta |psi> with weight p_delta = sum_s q_s q_{s+delta}: the
/// relative-shift description of two-cavity dephasing.
QuditMixture relative_shift_mixture(const QuditState& initial, const DephasingTable& deph);

struct LowEntanglement {
  double f_high = 0.0;
  double f_low = 0.0;
  /// f_high - f_low when each cavity is rotated independently instead.
  double independent_gap = 0.0;
};

/// Four-level dephasing-only run on the four-leg state and on (|00> + |22>)/sqrt2.
LowEntanglement low_entanglement_check(double gamma_phi);

}  // namespace rotor
