#pragma once

#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

namespace rotor {

/// Channel rates of the combined loss-dephasing channel.
///   gamma_l   = 1 - exp(-kappa_l t), in [0, 1)
///   gamma_phi = kappa_phi t, the variance of the random rotation angle
///   n_bar     = mean photon number used by the heuristic loss model
struct NoiseParams {
  double gamma_l = 0.0;
  double gamma_phi = 0.0;
  double n_bar = 16.0;

  void validate() const;
};

/// Probability p^D_s of a rotation by s angular sections, s in (-d/2, d/2].
class DephasingTable {
 public:
  DephasingTable(int d, std::vector<double> probs);

  int d() const { return d_; }
  int s_min() const { return -d_ / 2 + 1; }
  int s_max() const { return d_ / 2; }

  /// Any integer shift; reduced modulo d into (-d/2, d/2] first.
  double at(long long s) const;

  /// Probabilities ordered from s_min() to s_max().
  const std::vector<double>& probs() const { return probs_; }

 private:
  int d_;
  std::vector<double> probs_;
};

/// Probability p^L_l of losing l photons, l in [0, l_max], normalised.
class LossTable {
 public:
  LossTable(std::vector<double> probs, double tail_mass);

  int l_max() const { return static_cast<int>(probs_.size()) - 1; }
  /// Zero outside [0, l_max].
  double at(long long l) const;
  const std::vector<double>& probs() const { return probs_; }
  /// Fraction of the unnormalised mass dropped by truncating at l_max.
  double tail_mass() const { return tail_mass_; }

 private:
  std::vector<double> probs_;
  double tail_mass_;
};

/// Joint error (s_A, s_B, l_A, l_B) acting on both cavities.
struct ErrorConfig {
  int s_A = 0;
  int s_B = 0;
  int l_A = 0;
  int l_B = 0;

  friend bool operator==(const ErrorConfig&, const ErrorConfig&) = default;
};

inline constexpr double kLossTailTolerance = 1e-10;

/// Discretised dephasing: Gaussian angle mass integrated over each section,
/// renormalised over the d in-range sections.
DephasingTable dephasing_probs(double gamma_phi, int d);

/// Unnormalised heuristic loss weight gamma^l/l! (1-gamma)^nbar nbar^l.
double loss_weight(double gamma_l, double n_bar, int l);

/// Smallest l_max whose dropped tail is below `tolerance`.
int default_lmax(double gamma_l, double n_bar, double tolerance = kLossTailTolerance);

/// Normalised loss table truncated at l_max. Throws InvalidArgument if the
/// dropped tail exceeds `tolerance`.
LossTable loss_probs(double gamma_l, double n_bar, int l_max,
                     double tolerance = kLossTailTolerance);

/// Convenience: loss table at default_lmax().
LossTable loss_probs(double gamma_l, double n_bar);

double probability(const ErrorConfig& x, const DephasingTable& deph, const LossTable& loss);

/// Visits all |S_d|^2 (l_max+1)^2 configurations in lexicographic
/// (s_A, s_B, l_A, l_B) order.
void for_each_error(const DephasingTable& deph, const LossTable& loss,
                    const std::function<void(const ErrorConfig&, double)>& visit);

std::vector<std::pair<ErrorConfig, double>> error_ensemble(const DephasingTable& deph,
                                                           const LossTable& loss);

/// CSV rows `kind,index,probability` (header included).
void write_csv(std::ostream& out, const DephasingTable& table);
void write_csv(std::ostream& out, const LossTable& table);

}  // namespace rotor
