#include "rotor/nocomm_baseline.hpp"

#include <cmath>

#include "rotor/errors.hpp"

namespace rotor {

namespace {

LossTable make_loss(const NoiseParams& noise, std::optional<int> l_max) {
  return l_max ? loss_probs(noise.gamma_l, noise.n_bar, *l_max)
               : loss_probs(noise.gamma_l, noise.n_bar);
}

// The no-communication rule has no abort step.
ProtocolParams without_cut(ProtocolParams p) {
  p.f_cut = 0.0;
  return p;
}

}  // namespace

std::string Strategy::describe() const {
  return family == Family::constant ? std::string("constant") : "step:" + std::to_string(n);
}

int strategy_map(const Strategy& s, const ProtocolParams& params, int outcome) {
  if (s.family == Strategy::Family::constant) return 0;
  const int threshold = static_cast<int>(std::ceil((s.n + 0.5) * params.delta_i()));
  return outcome <= threshold ? 0 : 1;
}

bool strategy_allowed(const Strategy& s, const ProtocolParams& params) {
  if (s.family == Strategy::Family::constant) return true;
  return params.delta_i() > 2 && s.n >= 0 && s.n < params.m_i / params.m_c;
}

std::vector<Strategy> strategy_candidates(const ProtocolParams& params) {
  std::vector<Strategy> out{Strategy{}};
  if (params.delta_i() > 2)
    for (int n = 0; n < params.m_i / params.m_c; ++n)
      out.push_back(Strategy{Strategy::Family::step, n});
  return out;
}

DistillationReport nocomm_report(const ProtocolParams& params, const DephasingTable& deph,
                                 const LossTable& loss, const std::vector<int>& f) {
  const auto p = without_cut(params);
  p.validate();
  if (static_cast<int>(f.size()) != p.delta_c())
    throw InvalidArgument("nocomm_report: map must have Delta_c entries");
  return evaluate_corrections(
      p, deph, loss,
      [&](int a1, int b1) {
        return f[static_cast<std::size_t>(b1)] - f[static_cast<std::size_t>(a1)];
      },
      [](int, int) { return 0; });
}

double nocomm_fidelity(const ProtocolParams& params, const NoiseParams& noise,
                       const Strategy& strategy, std::optional<int> l_max) {
  params.validate();
  noise.validate();
  if (!strategy_allowed(strategy, params))
    throw InvalidArgument("strategy " + strategy.describe() + " not allowed for " +
                          params.describe());
  std::vector<int> f(static_cast<std::size_t>(params.delta_c()));
  for (int o = 0; o < params.delta_c(); ++o)
    f[static_cast<std::size_t>(o)] = strategy_map(strategy, params, o);
  const auto rep = nocomm_report(params, dephasing_probs(noise.gamma_phi, params.d),
                                 make_loss(noise, l_max), f);
  return *rep.f_avg;
}

NoCommOptimum optimize_strategy(const ProtocolParams& params, const NoiseParams& noise,
                                std::optional<int> l_max) {
  params.validate();
  noise.validate();
  const auto deph = dephasing_probs(noise.gamma_phi, params.d);
  const auto loss = make_loss(noise, l_max);
  std::optional<NoCommOptimum> best;
  for (const auto& s : strategy_candidates(params)) {
    std::vector<int> f(static_cast<std::size_t>(params.delta_c()));
    for (int o = 0; o < params.delta_c(); ++o)
      f[static_cast<std::size_t>(o)] = strategy_map(s, params, o);
    const auto rep = nocomm_report(params, deph, loss, f);
    if (!best || *rep.infidelity_avg < best->infidelity * (1.0 - 1e-12))
      best = NoCommOptimum{s, params.m_c, *rep.f_avg, *rep.infidelity_avg};
  }
  return *best;
}

NoCommOptimum optimize_strategy_and_mc(const ProtocolParams& params, const NoiseParams& noise,
                                       std::optional<int> l_max) {
  std::optional<NoCommOptimum> best;
  for (int mc : mc_candidates(params)) {
    ProtocolParams p = params;
    p.m_c = mc;
    auto cand = optimize_strategy(p, noise, l_max);
    if (!best || cand.infidelity < best->infidelity * (1.0 - 1e-9) - 1e-15) best = cand;
  }
  return *best;
}

double nocomm_bruteforce(const ProtocolParams& params, const NoiseParams& noise,
                         std::optional<int> l_max) {
  params.validate();
  noise.validate();
  const int dc = params.delta_c();
  if (dc > 16) throw InvalidArgument("nocomm_bruteforce: Delta_c too large");
  const auto deph = dephasing_probs(noise.gamma_phi, params.d);
  const auto loss = make_loss(noise, l_max);
  double best = 0.0;
  for (unsigned mask = 0; mask < (1u << dc); ++mask) {
    std::vector<int> f(static_cast<std::size_t>(dc));
    for (int o = 0; o < dc; ++o) f[static_cast<std::size_t>(o)] = (mask >> o) & 1u;
    best = std::max(best, *nocomm_report(params, deph, loss, f).f_avg);
  }
  return best;
}

}  // namespace rotor
