#include "rotor/noise_model.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "rotor/csv.hpp"
#include "rotor/errors.hpp"
#include "rotor/modmath.hpp"

namespace rotor {

void NoiseParams::validate() const {
  if (!(gamma_l >= 0.0 && gamma_l < 1.0))
    throw InvalidArgument("gamma_l must lie in [0, 1), got " + std::to_string(gamma_l));
  if (!(gamma_phi >= 0.0))
    throw InvalidArgument("gamma_phi must be >= 0, got " + std::to_string(gamma_phi));
  if (!(n_bar > 0.0)) throw InvalidArgument("n_bar must be > 0, got " + std::to_string(n_bar));
}

DephasingTable::DephasingTable(int d, std::vector<double> probs) : d_(d), probs_(std::move(probs)) {
  if (!is_power_of_two(d) || d < 2)
    throw InvalidArgument("qudit dimension must be a power of two >= 2");
  if (static_cast<int>(probs_.size()) != d) throw InvalidArgument("dephasing table needs d entries");
}

double DephasingTable::at(long long s) const {
  return probs_[static_cast<std::size_t>(centered_mod(s, d_) - s_min())];
}

LossTable::LossTable(std::vector<double> probs, double tail_mass)
    : probs_(std::move(probs)), tail_mass_(tail_mass) {
  if (probs_.empty()) throw InvalidArgument("loss table must hold at least l = 0");
}

double LossTable::at(long long l) const {
  if (l < 0 || l > l_max()) return 0.0;
  return probs_[static_cast<std::size_t>(l)];
}

DephasingTable dephasing_probs(double gamma_phi, int d) {
  if (!is_power_of_two(d) || d < 2)
    throw InvalidArgument("dephasing_probs: d must be a power of two >= 2, got " + std::to_string(d));
  if (!(gamma_phi >= 0.0))
    throw InvalidArgument("dephasing_probs: gamma_phi must be >= 0");

  std::vector<double> probs(static_cast<std::size_t>(d), 0.0);
  const int s_min = -d / 2 + 1;
  if (gamma_phi == 0.0) {
    probs[static_cast<std::size_t>(-s_min)] = 1.0;
    return DephasingTable(d, std::move(probs));
  }

  const double scale = 1.0 / std::sqrt(2.0 * gamma_phi);
  const double half_width = std::numbers::pi / d;
  // erfc differences keep precision in the tails, where erf(x) rounds to 1.
  auto section_mass = [&](int s) {
    const double lo = (2.0 * s - 1.0) * half_width * scale;
    const double hi = (2.0 * s + 1.0) * half_width * scale;
    if (lo >= 0.0) return 0.5 * (std::erfc(lo) - std::erfc(hi));
    if (hi <= 0.0) return 0.5 * (std::erfc(-hi) - std::erfc(-lo));
    return 0.5 * (std::erf(hi) - std::erf(lo));
  };

  double total = 0.0;
  for (int s = s_min; s <= d / 2; ++s) {
    const double p = section_mass(s);
    probs[static_cast<std::size_t>(s - s_min)] = p;
    total += p;
  }
  for (auto& p : probs) p /= total;
  return DephasingTable(d, std::move(probs));
}

double loss_weight(double gamma_l, double n_bar, int l) {
  if (l < 0) return 0.0;
  if (gamma_l == 0.0) return l == 0 ? 1.0 : 0.0;
  const double log_w = l * std::log(gamma_l * n_bar) - std::lgamma(l + 1.0) +
                       n_bar * std::log1p(-gamma_l);
  return std::exp(log_w);
}

namespace {

// Unnormalised mass above l_max, summed directly so it stays accurate far
// below machine epsilon relative to the total.
double tail_above(double gamma_l, double n_bar, int l_max) {
  if (gamma_l == 0.0) return 0.0;
  const double lambda = gamma_l * n_bar;
  double tail = 0.0;
  for (int l = l_max + 1;; ++l) {
    const double w = loss_weight(gamma_l, n_bar, l);
    tail += w;
    if (l > lambda && w <= 1e-30 * tail) break;
    if (w == 0.0 && l > lambda) break;
  }
  return tail;
}

double total_weight(double gamma_l, double n_bar) {
  // sum_l (gamma nbar)^l / l! (1-gamma)^nbar = (1-gamma)^nbar exp(gamma nbar)
  return std::exp(n_bar * std::log1p(-gamma_l) + gamma_l * n_bar);
}

}  // namespace

int default_lmax(double gamma_l, double n_bar, double tolerance) {
  NoiseParams{gamma_l, 0.0, n_bar}.validate();
  const double total = total_weight(gamma_l, n_bar);
  int l = 0;
  while (tail_above(gamma_l, n_bar, l) / total >= tolerance) ++l;
  return l;
}

LossTable loss_probs(double gamma_l, double n_bar, int l_max, double tolerance) {
  NoiseParams{gamma_l, 0.0, n_bar}.validate();
  if (l_max < 0) throw InvalidArgument("loss_probs: l_max must be >= 0");

  std::vector<double> probs(static_cast<std::size_t>(l_max) + 1);
  double partial = 0.0;
  for (int l = 0; l <= l_max; ++l) {
    probs[static_cast<std::size_t>(l)] = loss_weight(gamma_l, n_bar, l);
    partial += probs[static_cast<std::size_t>(l)];
  }
  const double tail = tail_above(gamma_l, n_bar, l_max);
  const double tail_mass = tail / (partial + tail);
  if (tail_mass > tolerance)
    throw InvalidArgument("loss_probs: l_max = " + std::to_string(l_max) +
                          " drops tail mass " + csv::format(tail_mass) + " above tolerance");
  for (auto& p : probs) p /= partial;
  return LossTable(std::move(probs), tail_mass);
}

LossTable loss_probs(double gamma_l, double n_bar) {
  return loss_probs(gamma_l, n_bar, default_lmax(gamma_l, n_bar));
}

double probability(const ErrorConfig& x, const DephasingTable& deph, const LossTable& loss) {
  return deph.at(x.s_A) * deph.at(x.s_B) * loss.at(x.l_A) * loss.at(x.l_B);
}

void for_each_error(const DephasingTable& deph, const LossTable& loss,
                    const std::function<void(const ErrorConfig&, double)>& visit) {
  for (int sa = deph.s_min(); sa <= deph.s_max(); ++sa)
    for (int sb = deph.s_min(); sb <= deph.s_max(); ++sb)
      for (int la = 0; la <= loss.l_max(); ++la)
        for (int lb = 0; lb <= loss.l_max(); ++lb) {
          ErrorConfig x{sa, sb, la, lb};
          visit(x, probability(x, deph, loss));
        }
}

std::vector<std::pair<ErrorConfig, double>> error_ensemble(const DephasingTable& deph,
                                                           const LossTable& loss) {
  std::vector<std::pair<ErrorConfig, double>> out;
  out.reserve(static_cast<std::size_t>(deph.d()) * deph.d() * (loss.l_max() + 1) *
              (loss.l_max() + 1));
  for_each_error(deph, loss, [&](const ErrorConfig& x, double p) { out.emplace_back(x, p); });
  return out;
}

void write_csv(std::ostream& out, const DephasingTable& table) {
  csv::write_row(out, {"kind", "index", "probability"});
  for (int s = table.s_min(); s <= table.s_max(); ++s)
    csv::write_row(out, {"dephasing", std::to_string(s), csv::format(table.at(s))});
}

void write_csv(std::ostream& out, const LossTable& table) {
  csv::write_row(out, {"kind", "index", "probability"});
  for (int l = 0; l <= table.l_max(); ++l)
    csv::write_row(out, {"loss", std::to_string(l), csv::format(table.at(l))});
}

}  // namespace rotor
