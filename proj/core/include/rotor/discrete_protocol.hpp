#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "rotor/noise_model.hpp"
#include "rotor/params.hpp"

namespace rotor {

/// Measurement record (A1, B1) in Z_{Delta_c}, (A2, B2) in Z_{Delta_f}.
struct OutcomeTuple {
  int A1 = 0;
  int B1 = 0;
  int A2 = 0;
  int B2 = 0;

  friend bool operator==(const OutcomeTuple&, const OutcomeTuple&) = default;
};

/// All outcomes in lexicographic (A1, B1, A2, B2) order.
std::vector<OutcomeTuple> all_outcomes(const ProtocolParams& params);

/// Bob's stage-one correction u_B in Z_{m_c}, indexed by (A1, B1).
class RotationDict {
 public:
  RotationDict(int delta_c, int m_c, std::vector<int> table);
  int at(int A1, int B1) const;
  int delta_c() const { return delta_c_; }
  int m_c() const { return m_c_; }

 private:
  int delta_c_;
  int m_c_;
  std::vector<int> table_;
};

/// Bob's stage-two correction v_B in Z_{m_f}, indexed by (A2, B2).
class LossDict {
 public:
  LossDict(int delta_f, int m_f, std::vector<int> table);
  int at(int A2, int B2) const;
  int delta_f() const { return delta_f_; }
  int m_f() const { return m_f_; }

 private:
  int delta_f_;
  int m_f_;
  std::vector<int> table_;
};

/// Likelihood that the relative misalignment is u (in units of Delta_c):
///   sum_t p^D_{A1 + t Delta_i} p^D_{B1 + t Delta_i + u Delta_c}.
double rotation_likelihood(const ProtocolParams& params, const DephasingTable& deph, int A1, int B1,
                           int u);

/// Mass of l_A + l_B in each residue class modulo m_c.
std::vector<double> loss_sum_distribution(const LossTable& loss, int m_c);

/// Likelihood that Bob's dual-basis correction v realigns the cavities:
///   sum_{l_A + l_B = -(A2 + B2) - v Delta_f (mod m_c)} p^L_{l_A} p^L_{l_B}.
double loss_likelihood(const ProtocolParams& params, const LossTable& loss, int A2, int B2, int v);

/// u_B = -argmax_u rotation_likelihood. Ties go to the smallest |u|, then
/// to positive u.
RotationDict rotation_dict(const ProtocolParams& params, const DephasingTable& deph);

/// v_B = argmax_v loss_likelihood, ties to the smallest v.
LossDict loss_dict(const ProtocolParams& params, const LossTable& loss);

enum class Stage { one = 1, two = 2 };

/// Membership in E1 (stage one) or E2 (stage two) for the outcome.
bool in_compat_set(const OutcomeTuple& o, const ProtocolParams& params, Stage stage,
                   const ErrorConfig& x);

/// Membership in the success set S for corrections (u_B, v_B). The stage-one
/// residual must vanish modulo Delta_c m_f and the stage-two residual modulo m_c;
/// those are the periodicities of the target state.
bool in_success_set(const OutcomeTuple& o, const ProtocolParams& params, int u_B, int v_B,
                    const ErrorConfig& x);

/// Per-outcome record. `possible` is false when no error can produce it.
struct OutcomeRecord {
  OutcomeTuple outcome;
  double fidelity = 0.0;
  double infidelity = 1.0;
  double probability = 0.0;
  bool possible = false;
  bool kept = false;
};

struct DistillationReport {
  ProtocolParams params;
  NoiseParams noise;
  int l_max = 0;
  std::vector<OutcomeRecord> records;
  /// Kept-conditional average; empty when every outcome aborts.
  std::optional<double> f_avg;
  std::optional<double> infidelity_avg;
  double p_abort = 0.0;

  bool all_aborted() const { return !f_avg.has_value(); }
};

/// Relative corrections applied by Bob: stage one X^{-B1 + c1 Delta_c} (relative
/// to Alice frame), stage two Z^{-B2 - c2 Delta_f}.
using StageOneCorrection = std::function<int(int A1, int B1)>;
using StageTwoCorrection = std::function<int(int A2, int B2)>;

/// Kept rule: f_cut = 0 keeps everything, otherwise F must exceed f_cut by 1e-12.
bool outcome_kept(double fidelity, double f_cut);

/// Generic evaluator on factorised error sums. Aggregates follow the kept rule
/// F > f_cut (f_cut = 0 keeps everything).
DistillationReport evaluate_corrections(const ProtocolParams& params, const DephasingTable& deph,
                                        const LossTable& loss, const StageOneCorrection& c1,
                                        const StageTwoCorrection& c2);

/// F = sum_S p / sum_E2 p. Throws EngineError for an impossible outcome.
double conditional_fidelity(const OutcomeTuple& o, const ProtocolParams& params,
                            const DephasingTable& deph, const LossTable& loss,
                            const RotationDict& rot, const LossDict& ld);

/// p = (m_f / m_i) sum_E2 p(x).
double outcome_probability(const OutcomeTuple& o, const ProtocolParams& params,
                           const DephasingTable& deph, const LossTable& loss);

DistillationReport evaluate_protocol(const ProtocolParams& params, const DephasingTable& deph,
                                     const LossTable& loss, const RotationDict& rot,
                                     const LossDict& ld);

/// Builds the tables (l_max defaults to default_lmax) and dictionaries, then
/// evaluates every outcome.
DistillationReport run_protocol(const ProtocolParams& params, const NoiseParams& noise,
                                std::optional<int> l_max = std::nullopt);

/// Powers of two in [m_f, m_i].
std::vector<int> mc_candidates(const ProtocolParams& params);

struct OptimalMc {
  int m_c = 0;
  DistillationReport report;
};

/// Minimises the kept-average infidelity over m_c; ties go to the smaller m_c. If every m_c aborts
/// completely, the smallest m_c is returned with its all-abort report.
OptimalMc optimal_mc(const ProtocolParams& params, const NoiseParams& noise,
                     std::optional<int> l_max = std::nullopt);

/// Two-cavity shift distribution p_delta = sum_s q_s q_{s+delta} on Z_4.
struct FourLevel {
  double p0 = 1.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double fidelity = 1.0;
  double p_abort = 0.0;
  double nocomm_fidelity = 1.0;
};

/// d = m_i = 4, m_c = m_f = 2, gamma_l = 0, f_cut = 0.5.
FourLevel four_level_closed_form(double gamma_phi);
ProtocolParams four_level_params();

}  // namespace rotor
