#include "rotor/qudit_oracle.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "rotor/errors.hpp"
#include "rotor/modmath.hpp"

namespace rotor {

namespace {

using cd = std::complex<double>;

constexpr int kMaxOracleDim = 16;
constexpr int kMaxOracleLoss = 4;

// Rows are <k_+|, so F * v gives dual coordinates of v.
Eigen::MatrixXcd dual_matrix(int d) {
  Eigen::MatrixXcd f(d, d);
  for (int k = 0; k < d; ++k) f.row(k) = dual_basis_vector(d, k).adjoint();
  return f;
}

Eigen::MatrixXcd shift_rows(const Eigen::MatrixXcd& m, int by) {
  const int d = static_cast<int>(m.rows());
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (int k = 0; k < d; ++k) out.row(mod(k + by, d)) = m.row(k);
  return out;
}

Eigen::MatrixXcd shift_cols(const Eigen::MatrixXcd& m, int by) {
  const int d = static_cast<int>(m.cols());
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (int k = 0; k < d; ++k) out.col(mod(k + by, d)) = m.col(k);
  return out;
}

}  // namespace

QuditState::QuditState(int d) : d_(d), amp_(Eigen::VectorXcd::Zero(d * d)) {
  if (d < 1) throw InvalidArgument("QuditState: dimension must be positive");
}

QuditState::QuditState(int d, Eigen::VectorXcd amplitudes) : d_(d), amp_(std::move(amplitudes)) {
  if (amp_.size() != static_cast<Eigen::Index>(d) * d)
    throw InvalidArgument("QuditState: amplitude vector must have d^2 entries");
}

Eigen::MatrixXcd QuditState::as_matrix() const {
  Eigen::MatrixXcd m(d_, d_);
  for (int a = 0; a < d_; ++a)
    for (int b = 0; b < d_; ++b) m(a, b) = at(a, b);
  return m;
}

QuditState QuditState::from_matrix(const Eigen::MatrixXcd& m) {
  const int d = static_cast<int>(m.rows());
  QuditState s(d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) s.at(a, b) = m(a, b);
  return s;
}

double QuditMixture::total_weight() const {
  double w = 0.0;
  for (const auto& [p, s] : branches) w += p * s.amplitudes().squaredNorm();
  return w;
}

QuditState initial_state(int d, int m_i) {
  if (m_i < 1 || d % m_i != 0) throw InvalidArgument("initial_state: m_i must divide d");
  QuditState s(d);
  const int step = d / m_i;
  const double amp = 1.0 / std::sqrt(static_cast<double>(m_i));
  for (int k = 0; k < m_i; ++k) s.at(k * step, k * step) = amp;
  return s;
}

double entanglement_entropy(const QuditState& state) {
  const Eigen::MatrixXcd m = state.as_matrix();
  const Eigen::MatrixXcd rho = m * m.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  const double tr = rho.trace().real();
  double h = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i) / tr;
    if (l > 1e-15) h -= l * std::log2(l);
  }
  return h;
}

QuditState apply_pauli(const QuditState& state, Cavity which, PauliKind kind, int power) {
  const int d = state.d();
  Eigen::MatrixXcd m = state.as_matrix();
  if (kind == PauliKind::X) {
    m = which == Cavity::A ? shift_rows(m, power) : shift_cols(m, power);
  } else {
    for (int j = 0; j < d; ++j) {
      const cd phase = std::polar(1.0, -2.0 * std::numbers::pi * mod(static_cast<long long>(j) * power, d) / d);
      if (which == Cavity::A)
        m.row(j) *= phase;
      else
        m.col(j) *= phase;
    }
  }
  return QuditState::from_matrix(m);
}

Eigen::VectorXcd dual_basis_vector(int d, int k) {
  Eigen::VectorXcd v(d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j)
    v(j) = norm * std::polar(1.0, -2.0 * std::numbers::pi * mod(static_cast<long long>(j) * k, d) / d);
  return v;
}

QuditState dual_transform(const QuditState& state, Cavity which, bool inverse) {
  Eigen::MatrixXcd f = dual_matrix(state.d());
  if (inverse) f = f.adjoint().eval();
  const Eigen::MatrixXcd m = state.as_matrix();
  return QuditState::from_matrix(which == Cavity::A ? Eigen::MatrixXcd(f * m)
                                                    : Eigen::MatrixXcd(m * f.transpose()));
}

QuditState target_state(const ProtocolParams& params) {
  params.validate();
  const int d = params.d, mc = params.m_c, dc = params.delta_c(), df = params.delta_f();
  auto modular_dual = [&](int x) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
    for (int j = 0; j < dc; ++j) v += dual_basis_vector(d, mod(x + j * mc, d));
    return Eigen::VectorXcd(v / std::sqrt(static_cast<double>(dc)));
  };
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k < params.m_f; ++k) {
    const Eigen::VectorXcd a = modular_dual(df * k);
    const Eigen::VectorXcd b = modular_dual(-df * k);
    m += a * b.transpose();
  }
  m /= m.norm();
  return QuditState::from_matrix(m);
}

QuditMixture noisy_mixture(const QuditState& initial, const DephasingTable& deph,
                           const LossTable& loss) {
  QuditMixture mix;
  for_each_error(deph, loss, [&](const ErrorConfig& x, double p) {
    auto s = apply_pauli(initial, Cavity::A, PauliKind::X, x.s_A);
    s = apply_pauli(s, Cavity::B, PauliKind::X, x.s_B);
    s = apply_pauli(s, Cavity::A, PauliKind::Z, -x.l_A);
    s = apply_pauli(s, Cavity::B, PauliKind::Z, -x.l_B);
    mix.branches.emplace_back(p, std::move(s));
  });
  return mix;
}

OracleCorrections protocol_corrections(const RotationDict& rot, const LossDict& ld) {
  return {[](int, int) { return 0; }, [rot](int a1, int b1) { return rot.at(a1, b1); },
          [](int, int) { return 0; }, [ld](int a2, int b2) { return ld.at(a2, b2); }};
}

OracleCorrections nocomm_corrections(const std::vector<int>& f) {
  return {[f](int a1, int) { return f[static_cast<std::size_t>(a1)]; },
          [f](int, int b1) { return f[static_cast<std::size_t>(b1)]; },
          [](int, int) { return 0; }, [](int, int) { return 0; }};
}

OracleReport simulate_with(const QuditState& initial, const ProtocolParams& params,
                           const DephasingTable& deph, const LossTable& loss,
                           const OracleCorrections& corr) {
  if (params.d > kMaxOracleDim) throw InvalidArgument("oracle supports d <= 16");
  if (loss.l_max() > kMaxOracleLoss) throw InvalidArgument("oracle supports l_max <= 4");
  if (initial.d() != params.d || deph.d() != params.d)
    throw InvalidArgument("oracle: dimension mismatch");
  return simulate_mixture(noisy_mixture(initial, deph, loss), params, corr);
}

OracleReport simulate_mixture(const QuditMixture& mix, const ProtocolParams& params,
                              const OracleCorrections& corr) {
  params.validate();
  const int d = params.d, dc = params.delta_c(), df = params.delta_f();
  if (d > kMaxOracleDim) throw InvalidArgument("oracle supports d <= 16");

  const Eigen::MatrixXcd f = dual_matrix(d);
  const Eigen::MatrixXcd target = f * target_state(params).as_matrix() * f.transpose();

  const auto outcomes = all_outcomes(params);
  auto index = [&](int a1, int b1, int a2, int b2) {
    return static_cast<std::size_t>(((a1 * dc + b1) * df + a2) * df + b2);
  };
  std::vector<double> prob(outcomes.size(), 0.0), overlap(outcomes.size(), 0.0);

  for (const auto& [p, branch] : mix.branches) {
    if (p == 0.0) continue;
    if (branch.d() != d) throw InvalidArgument("oracle: dimension mismatch");
    const Eigen::MatrixXcd m = branch.as_matrix();
    for (int a1 = 0; a1 < dc; ++a1)
      for (int b1 = 0; b1 < dc; ++b1) {
        Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(d, d);
        for (int ka = a1; ka < d; ka += dc)
          for (int kb = b1; kb < d; kb += dc) proj(ka, kb) = m(ka, kb);
        if (proj.squaredNorm() == 0.0) continue;
        proj = shift_rows(proj, -a1 + corr.alice1(a1, b1) * dc);
        proj = shift_cols(proj, -b1 + corr.bob1(a1, b1) * dc);
        const Eigen::MatrixXcd dual = f * proj * f.transpose();
        for (int a2 = 0; a2 < df; ++a2)
          for (int b2 = 0; b2 < df; ++b2) {
            Eigen::MatrixXcd second = Eigen::MatrixXcd::Zero(d, d);
            for (int ka = a2; ka < d; ka += df)
              for (int kb = b2; kb < d; kb += df) second(ka, kb) = dual(ka, kb);
            const double w = second.squaredNorm();
            if (w == 0.0) continue;
            // Z^{-l} moves dual label k to k - l.
            second = shift_rows(second, -a2 - corr.alice2(a2, b2) * df);
            second = shift_cols(second, -b2 - corr.bob2(a2, b2) * df);
            const cd ov = (target.conjugate().cwiseProduct(second)).sum();
            const auto i = index(a1, b1, a2, b2);
            prob[i] += p * w;
            overlap[i] += p * std::norm(ov);
          }
      }
  }

  OracleReport rep;
  double kept_p = 0.0, kept_f = 0.0, dropped = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    OracleRecord r{outcomes[i], prob[i] > 0.0 ? overlap[i] / prob[i] : 0.0, prob[i]};
    if (prob[i] > 0.0) {
      const bool kept = params.f_cut == 0.0 || r.fidelity - params.f_cut > 1e-12;
      (kept ? kept_p : dropped) += r.probability;
      if (kept) kept_f += r.probability * r.fidelity;
    }
    rep.records.push_back(r);
  }
  rep.p_abort = dropped / (kept_p + dropped);
  if (kept_p > 0.0)
    rep.f_avg = kept_f / kept_p;
  else
    rep.p_abort = 1.0;
  return rep;
}

OracleReport simulate_protocol(const ProtocolParams& params, const DephasingTable& deph,
                               const LossTable& loss) {
  return simulate_with(initial_state(params.d, params.m_i), params, deph, loss,
                       protocol_corrections(rotation_dict(params, deph), loss_dict(params, loss)));
}

QuditMixture relative_shift_mixture(const QuditState& initial, const DephasingTable& deph) {
  const int d = deph.d();
  QuditMixture mix;
  for (int delta = deph.s_min(); delta <= deph.s_max(); ++delta) {
    double w = 0.0;
    for (int s = deph.s_min(); s <= deph.s_max(); ++s) w += deph.at(s) * deph.at(s + delta);
    mix.branches.emplace_back(w, apply_pauli(initial, Cavity::B, PauliKind::X, mod(delta, d)));
  }
  return mix;
}

LowEntanglement low_entanglement_check(double gamma_phi) {
  const auto params = four_level_params();
  const auto deph = dephasing_probs(gamma_phi, params.d);
  const auto loss = loss_probs(0.0, 1.0);
  const auto corr = protocol_corrections(rotation_dict(params, deph), loss_dict(params, loss));

  const auto four_leg = initial_state(params.d, params.m_i);
  QuditState two_leg(params.d);
  two_leg.at(0, 0) = two_leg.at(2, 2) = 1.0 / std::sqrt(2.0);

  LowEntanglement out;
  out.f_high = *simulate_mixture(relative_shift_mixture(four_leg, deph), params, corr).f_avg;
  out.f_low = *simulate_mixture(relative_shift_mixture(two_leg, deph), params, corr).f_avg;
  out.independent_gap = *simulate_with(four_leg, params, deph, loss, corr).f_avg -
                        *simulate_with(two_leg, params, deph, loss, corr).f_avg;
  return out;
}

}  // namespace rotor
