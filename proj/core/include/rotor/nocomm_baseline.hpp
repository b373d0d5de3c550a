#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rotor/discrete_protocol.hpp"

namespace rotor {

/// No-communication rotation rule. Each party rotates by X^{-O + Delta_c f(O)}
/// on its own stage-one outcome O and by Z^{-O'} on its stage-two outcome (g = 0).
struct Strategy {
  enum class Family { constant, step };
  Family family = Family::constant;
  /// Step index in Z_{m_i/m_c}; f switches from 0 to 1 after ceil((n + 1/2) Delta_i).
  int n = 0;

  std::string describe() const;
};

/// f(O) for O in {0, ..., Delta_c - 1}.
int strategy_map(const Strategy& s, const ProtocolParams& params, int outcome);

/// The step family needs Delta_i > 2; the constant family is always allowed.
bool strategy_allowed(const Strategy& s, const ProtocolParams& params);

/// Every allowed strategy for the given dimensions, constant first.
std::vector<Strategy> strategy_candidates(const ProtocolParams& params);

/// Report for a fixed no-communication rule. f_cut is ignored: nothing aborts.
DistillationReport nocomm_report(const ProtocolParams& params, const DephasingTable& deph,
                                 const LossTable& loss, const std::vector<int>& f);

double nocomm_fidelity(const ProtocolParams& params, const NoiseParams& noise,
                       const Strategy& strategy, std::optional<int> l_max = std::nullopt);

struct NoCommOptimum {
  Strategy strategy;
  int m_c = 0;
  double f_avg = 0.0;
  double infidelity = 1.0;
};

/// Best strategy at the given m_c. Ties keep the earlier candidate.
NoCommOptimum optimize_strategy(const ProtocolParams& params, const NoiseParams& noise,
                                std::optional<int> l_max = std::nullopt);

/// Best strategy over every m_c candidate as well.
NoCommOptimum optimize_strategy_and_mc(const ProtocolParams& params, const NoiseParams& noise,
                                       std::optional<int> l_max = std::nullopt);

/// Exhaustive maximum over all 2^{Delta_c} binary maps f. Small Delta_c only.
double nocomm_bruteforce(const ProtocolParams& params, const NoiseParams& noise,
                         std::optional<int> l_max = std::nullopt);

}  // namespace rotor
