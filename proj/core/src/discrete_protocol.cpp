#include "rotor/discrete_protocol.hpp"

#include <cmath>

#include "rotor/errors.hpp"
#include "rotor/modmath.hpp"

namespace rotor {

namespace {

// Decisions whose margin falls below this are treated as ties.
constexpr double kTieTolerance = 1e-12;
// An outcome is kept when F exceeds f_cut by more than this.
constexpr double kKeepMargin = 1e-12;

struct StageOneSums {
  double compatible = 0.0;  // sum over E1 of p^D_{s_A} p^D_{s_B}
  double success = 0.0;
  double failure = 0.0;
};

struct StageTwoSums {
  double compatible = 0.0;  // sum over (l_A, l_B) meeting the Delta_f constraint
  double success = 0.0;
  double failure = 0.0;
};

StageOneSums stage_one_sums(const ProtocolParams& p, const DephasingTable& deph, int A1, int B1,
                            int c1) {
  const int di = p.delta_i(), dc = p.delta_c();
  const int success_period = dc * p.m_f;
  StageOneSums out;
  for (int sa = deph.s_min(); sa <= deph.s_max(); ++sa) {
    if (mod(sa - A1, di) != 0) continue;
    const double pa = deph.at(sa);
    if (pa == 0.0) continue;
    for (int sb = deph.s_min(); sb <= deph.s_max(); ++sb) {
      if (mod(sb - B1, di) != 0) continue;
      if (mod((sa - sb) - (A1 - B1), dc) != 0) continue;
      const double w = pa * deph.at(sb);
      out.compatible += w;
      if (mod((sa - sb) - (A1 - B1) - static_cast<long long>(c1) * dc, success_period) == 0)
        out.success += w;
      else
        out.failure += w;
    }
  }
  return out;
}

StageTwoSums stage_two_sums(const ProtocolParams& p, const std::vector<double>& sum_dist, int A2,
                            int B2, int c2) {
  const int df = p.delta_f(), mc = p.m_c;
  const int target = mod(-(A2 + B2) - static_cast<long long>(c2) * df, mc);
  StageTwoSums out;
  for (int r = 0; r < mc; ++r) {
    if (mod(r + A2 + B2, df) != 0) continue;
    out.compatible += sum_dist[static_cast<std::size_t>(r)];
    if (r == target)
      out.success += sum_dist[static_cast<std::size_t>(r)];
    else
      out.failure += sum_dist[static_cast<std::size_t>(r)];
  }
  return out;
}

void finalise(DistillationReport& rep) {
  double kept_p = 0.0, kept_f = 0.0, kept_inf = 0.0, dropped = 0.0;
  for (auto& r : rep.records) {
    if (!r.possible) {
      r.kept = false;
      continue;
    }
    r.kept = outcome_kept(r.fidelity, rep.params.f_cut);
    if (r.kept) {
      kept_p += r.probability;
      kept_f += r.probability * r.fidelity;
      kept_inf += r.probability * r.infidelity;
    } else {
      dropped += r.probability;
    }
  }
  rep.p_abort = dropped;
  if (kept_p > 0.0) {
    rep.f_avg = kept_f / kept_p;
    rep.infidelity_avg = kept_inf / kept_p;
  } else {
    rep.f_avg.reset();
    rep.infidelity_avg.reset();
    rep.p_abort = 1.0;
  }
}

}  // namespace

bool outcome_kept(double fidelity, double f_cut) {
  return f_cut <= 0.0 || fidelity - f_cut > kKeepMargin;
}

std::vector<OutcomeTuple> all_outcomes(const ProtocolParams& params) {
  const int dc = params.delta_c(), df = params.delta_f();
  std::vector<OutcomeTuple> out;
  out.reserve(static_cast<std::size_t>(dc) * dc * df * df);
  for (int a1 = 0; a1 < dc; ++a1)
    for (int b1 = 0; b1 < dc; ++b1)
      for (int a2 = 0; a2 < df; ++a2)
        for (int b2 = 0; b2 < df; ++b2) out.push_back({a1, b1, a2, b2});
  return out;
}

RotationDict::RotationDict(int delta_c, int m_c, std::vector<int> table)
    : delta_c_(delta_c), m_c_(m_c), table_(std::move(table)) {
  if (static_cast<int>(table_.size()) != delta_c * delta_c)
    throw InvalidArgument("rotation dictionary needs Delta_c^2 entries");
}

int RotationDict::at(int A1, int B1) const {
  return table_[static_cast<std::size_t>(A1 * delta_c_ + B1)];
}

LossDict::LossDict(int delta_f, int m_f, std::vector<int> table)
    : delta_f_(delta_f), m_f_(m_f), table_(std::move(table)) {
  if (static_cast<int>(table_.size()) != delta_f * delta_f)
    throw InvalidArgument("loss dictionary needs Delta_f^2 entries");
}

int LossDict::at(int A2, int B2) const {
  return table_[static_cast<std::size_t>(A2 * delta_f_ + B2)];
}

double rotation_likelihood(const ProtocolParams& params, const DephasingTable& deph, int A1, int B1,
                           int u) {
  const int di = params.delta_i(), dc = params.delta_c();
  double sum = 0.0;
  for (int t = 0; t < params.m_i; ++t)
    sum += deph.at(A1 + static_cast<long long>(t) * di) *
           deph.at(B1 + static_cast<long long>(t) * di + static_cast<long long>(u) * dc);
  return sum;
}

std::vector<double> loss_sum_distribution(const LossTable& loss, int m_c) {
  std::vector<double> dist(static_cast<std::size_t>(m_c), 0.0);
  for (int la = 0; la <= loss.l_max(); ++la)
    for (int lb = 0; lb <= loss.l_max(); ++lb)
      dist[static_cast<std::size_t>(mod(la + lb, m_c))] += loss.at(la) * loss.at(lb);
  return dist;
}

double loss_likelihood(const ProtocolParams& params, const LossTable& loss, int A2, int B2, int v) {
  const auto dist = loss_sum_distribution(loss, params.m_c);
  return dist[static_cast<std::size_t>(
      mod(-(A2 + B2) - static_cast<long long>(v) * params.delta_f(), params.m_c))];
}

RotationDict rotation_dict(const ProtocolParams& params, const DephasingTable& deph) {
  params.validate();
  if (deph.d() != params.d) throw InvalidArgument("rotation_dict: table dimension mismatch");
  const int dc = params.delta_c(), mc = params.m_c;

  // Candidate order 0, +1, -1, +2, -2, ... realises the tie rule: the first
  // maximiser encountered wins.
  std::vector<int> order{0};
  for (int k = 1; 2 * k <= mc; ++k) {
    order.push_back(k);
    if (2 * k < mc) order.push_back(-k);
  }

  std::vector<int> table(static_cast<std::size_t>(dc) * dc);
  for (int a1 = 0; a1 < dc; ++a1)
    for (int b1 = 0; b1 < dc; ++b1) {
      int best_u = 0;
      double best = -1.0;
      for (int u : order) {
        const double l = rotation_likelihood(params, deph, a1, b1, u);
        if (l > best * (1.0 + kTieTolerance) && l > best) {
          best = l;
          best_u = u;
        }
      }
      table[static_cast<std::size_t>(a1 * dc + b1)] = mod(-best_u, mc);
    }
  return RotationDict(dc, mc, std::move(table));
}

LossDict loss_dict(const ProtocolParams& params, const LossTable& loss) {
  params.validate();
  const int df = params.delta_f(), mc = params.m_c, mf = params.m_f;
  const auto dist = loss_sum_distribution(loss, mc);
  std::vector<int> table(static_cast<std::size_t>(df) * df);
  for (int a2 = 0; a2 < df; ++a2)
    for (int b2 = 0; b2 < df; ++b2) {
      int best_v = 0;
      double best = -1.0;
      for (int v = 0; v < mf; ++v) {
        const double l = dist[static_cast<std::size_t>(mod(-(a2 + b2) - v * df, mc))];
        if (l > best * (1.0 + kTieTolerance) && l > best) {
          best = l;
          best_v = v;
        }
      }
      table[static_cast<std::size_t>(a2 * df + b2)] = best_v;
    }
  return LossDict(df, mf, std::move(table));
}

bool in_compat_set(const OutcomeTuple& o, const ProtocolParams& p, Stage stage,
                   const ErrorConfig& x) {
  const int di = p.delta_i(), dc = p.delta_c();
  const bool first = mod(x.s_A - o.A1, di) == 0 && mod(x.s_B - o.B1, di) == 0 &&
                     mod((x.s_A - x.s_B) - (o.A1 - o.B1), dc) == 0;
  if (stage == Stage::one || !first) return first;
  return mod(x.l_A + x.l_B + o.A2 + o.B2, p.delta_f()) == 0;
}

bool in_success_set(const OutcomeTuple& o, const ProtocolParams& p, int u_B, int v_B,
                    const ErrorConfig& x) {
  if (!in_compat_set(o, p, Stage::two, x)) return false;
  const int dc = p.delta_c();
  const bool realigned =
      mod((x.s_A - x.s_B) - (o.A1 - o.B1) - static_cast<long long>(u_B) * dc, dc * p.m_f) == 0;
  const bool loss_fixed =
      mod(x.l_A + x.l_B + (o.A2 + o.B2) + static_cast<long long>(v_B) * p.delta_f(), p.m_c) == 0;
  return realigned && loss_fixed;
}

DistillationReport evaluate_corrections(const ProtocolParams& params, const DephasingTable& deph,
                                        const LossTable& loss, const StageOneCorrection& c1,
                                        const StageTwoCorrection& c2) {
  params.validate();
  if (deph.d() != params.d) throw InvalidArgument("dephasing table dimension does not match d");

  const int dc = params.delta_c(), df = params.delta_f();
  const auto dist = loss_sum_distribution(loss, params.m_c);
  const double weight = static_cast<double>(params.m_f) / params.m_i;

  std::vector<StageOneSums> s1(static_cast<std::size_t>(dc) * dc);
  for (int a1 = 0; a1 < dc; ++a1)
    for (int b1 = 0; b1 < dc; ++b1)
      s1[static_cast<std::size_t>(a1 * dc + b1)] = stage_one_sums(params, deph, a1, b1, c1(a1, b1));
  std::vector<StageTwoSums> s2(static_cast<std::size_t>(df) * df);
  for (int a2 = 0; a2 < df; ++a2)
    for (int b2 = 0; b2 < df; ++b2)
      s2[static_cast<std::size_t>(a2 * df + b2)] = stage_two_sums(params, dist, a2, b2, c2(a2, b2));

  DistillationReport rep;
  rep.params = params;
  rep.l_max = loss.l_max();
  for (const auto& o : all_outcomes(params)) {
    const auto& one = s1[static_cast<std::size_t>(o.A1 * dc + o.B1)];
    const auto& two = s2[static_cast<std::size_t>(o.A2 * df + o.B2)];
    OutcomeRecord r;
    r.outcome = o;
    const double total = one.compatible * two.compatible;
    r.probability = weight * total;
    r.possible = total > 0.0;
    if (r.possible) {
      r.fidelity = one.success * two.success / total;
      // Failure mass summed directly keeps small infidelities accurate.
      r.infidelity = (one.failure * two.compatible + one.success * two.failure) / total;
    }
    rep.records.push_back(r);
  }
  finalise(rep);
  return rep;
}

double conditional_fidelity(const OutcomeTuple& o, const ProtocolParams& params,
                            const DephasingTable& deph, const LossTable& loss,
                            const RotationDict& rot, const LossDict& ld) {
  params.validate();
  const auto one = stage_one_sums(params, deph, o.A1, o.B1, rot.at(o.A1, o.B1));
  const auto two =
      stage_two_sums(params, loss_sum_distribution(loss, params.m_c), o.A2, o.B2, ld.at(o.A2, o.B2));
  const double total = one.compatible * two.compatible;
  if (!(total > 0.0)) throw EngineError("conditional_fidelity: impossible outcome");
  return one.success * two.success / total;
}

double outcome_probability(const OutcomeTuple& o, const ProtocolParams& params,
                           const DephasingTable& deph, const LossTable& loss) {
  params.validate();
  const auto one = stage_one_sums(params, deph, o.A1, o.B1, 0);
  const auto two = stage_two_sums(params, loss_sum_distribution(loss, params.m_c), o.A2, o.B2, 0);
  return static_cast<double>(params.m_f) / params.m_i * one.compatible * two.compatible;
}

DistillationReport evaluate_protocol(const ProtocolParams& params, const DephasingTable& deph,
                                     const LossTable& loss, const RotationDict& rot,
                                     const LossDict& ld) {
  return evaluate_corrections(
      params, deph, loss, [&](int a1, int b1) { return rot.at(a1, b1); },
      [&](int a2, int b2) { return ld.at(a2, b2); });
}

DistillationReport run_protocol(const ProtocolParams& params, const NoiseParams& noise,
                                std::optional<int> l_max) {
  params.validate();
  noise.validate();
  const auto deph = dephasing_probs(noise.gamma_phi, params.d);
  const auto loss = l_max ? loss_probs(noise.gamma_l, noise.n_bar, *l_max)
                          : loss_probs(noise.gamma_l, noise.n_bar);
  auto rep = evaluate_protocol(params, deph, loss, rotation_dict(params, deph),
                               loss_dict(params, loss));
  rep.noise = noise;
  return rep;
}

std::vector<int> mc_candidates(const ProtocolParams& params) {
  std::vector<int> out;
  for (int m = params.m_f; m <= params.m_i; m *= 2) out.push_back(m);
  return out;
}

OptimalMc optimal_mc(const ProtocolParams& params, const NoiseParams& noise,
                     std::optional<int> l_max) {
  std::optional<OptimalMc> best;
  std::optional<OptimalMc> fallback;
  for (int mc : mc_candidates(params)) {
    ProtocolParams p = params;
    p.m_c = mc;
    auto rep = run_protocol(p, noise, l_max);
    if (!fallback) fallback = OptimalMc{mc, rep};
    if (rep.all_aborted()) continue;
    if (!best) {
      best = OptimalMc{mc, std::move(rep)};
      continue;
    }
    const double cur = *best->report.infidelity_avg;
    const double cand = *rep.infidelity_avg;
    if (cand < cur * (1.0 - 1e-9) - 1e-15) best = OptimalMc{mc, std::move(rep)};
  }
  return best ? *best : *fallback;
}

ProtocolParams four_level_params() { return ProtocolParams{4, 4, 2, 2, 0.5}; }

FourLevel four_level_closed_form(double gamma_phi) {
  const auto q = dephasing_probs(gamma_phi, 4);
  auto shift = [&](int delta) {
    double s = 0.0;
    for (int k = q.s_min(); k <= q.s_max(); ++k) s += q.at(k) * q.at(k + delta);
    return s;
  };
  FourLevel out;
  out.p0 = shift(0);
  out.p1 = shift(1);
  out.p2 = shift(2);
  out.fidelity = out.p0 / (out.p0 + out.p2);
  out.p_abort = 2.0 * out.p1;
  out.nocomm_fidelity = 1.0 - out.p1 - out.p2;
  return out;
}

}  // namespace rotor
