#pragma once

#include <Eigen/Dense>

#include "rotor/fock_engine.hpp"

namespace rotor {

/// Pegg-Barnett phase states |phi = 2 pi m / s, s> on s Fock levels, grouped into
/// d angular sections of s/d states each.
struct PeggBarnettBasis {
  int s = 0;
  int d = 0;

  void validate() const;
  /// Smallest multiple of 2d that is >= 4 (N + 1).
  static PeggBarnettBasis for_cutoff(int N, int d);
  /// |i, phi = 2 pi m / s> = |phi = 2 pi (i/d + m/s), s>, m in [-s/2d, s/2d).
  Eigen::VectorXcd state(int i, int m) const;
};

/// sigma_ij = sum_m <i, phi_m| rho |j, phi_m>.
Eigen::MatrixXcd decode_single(const Eigen::MatrixXcd& rho_mode, const PeggBarnettBasis& basis);

/// Two-mode trace-out, logical index i_A * d + i_B.
Eigen::MatrixXcd decode_two_mode(const TwoModeDensity& rho, const PeggBarnettBasis& basis);

/// <psi_t|sigma|psi_t> / Tr sigma, clamped to [0, 1].
double logical_fidelity(const Eigen::MatrixXcd& sigma, const Eigen::VectorXcd& target);

}  // namespace rotor
