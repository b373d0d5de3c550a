#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rotor/decoder.hpp"
#include "rotor/discrete_protocol.hpp"
#include "rotor/fock_engine.hpp"
#include "rotor/noise_model.hpp"
#include "rotor/params.hpp"

namespace rotor {

struct CvRunConfig {
  ProtocolParams params{8, 8, 4, 2, 0.0};
  PrimitiveSpec primitive{PrimitiveSpec::Kind::coherent, {3.0, 0.0}, {0.0, 0.0}};
  /// n_bar is ignored: dictionaries use the primitive's mean photon number.
  NoiseParams noise{0.0, 0.0, 0.0};
  int cutoff = 0;     // 0 selects default_cutoff
  int decoder_s = 0;  // 0 selects PeggBarnettBasis::for_cutoff
  EntangledVariant variant = EntangledVariant::ancilla_equivalent;
  double orthogonality_budget = 1e-2;
  double deficit_tolerance = 1e-6;
  int workers = 0;

  void validate() const;
};

struct CvOutcomeRecord {
  OutcomeTuple outcome;
  double probability = 0.0;
  double fidelity = 0.0;
  double infidelity = 1.0;
  bool possible = false;
  bool kept = false;
};

struct CvReport {
  CvRunConfig config;
  int cutoff = 0;
  int decoder_s = 0;
  double mean_n = 0.0;
  double delta_n = 0.0;
  double leakage = 0.0;      // single-mode primitive norm beyond the cutoff
  double max_overlap = 0.0;  // orthogonality of the rotated primitives
  double loss_deficit = 0.0;
  double deficit = 0.0;      // total truncation deficit
  double floor_bound = 0.0;  // 2 delta_{ceil(Delta_c / 2)}
  double total_probability = 0.0;
  std::vector<int> rotation_table;  // u_B at A1 * Delta_c + B1
  std::vector<int> loss_table;      // v_B at A2 * Delta_f + B2
  std::vector<CvOutcomeRecord> records;
  std::optional<double> f_avg;
  std::optional<double> infidelity_avg;
  double p_abort = 0.0;

  bool all_aborted() const { return !f_avg.has_value(); }
};

/// Z_A^{A2} ⊗ Z_B^{B2 + v_B Delta_f} applied to the target, so the dual-basis
/// corrections are carried by the reference instead of the cavities.
Eigen::VectorXcd adjusted_target(const OutcomeTuple& o, const ProtocolParams& params, int v_B);

/// Noise, phase-section measurement (Born weights, P rho P update), rotations,
/// number-parity measurement and Pegg-Barnett decoding for every outcome.
/// Throws EngineError when the truncation deficit exceeds the tolerance.
CvReport run_cv(const CvRunConfig& config);

}  // namespace rotor
