#include "rotor/cv_protocol.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rotor/csv.hpp"
#include "rotor/errors.hpp"
#include "rotor/modmath.hpp"
#include "rotor/parallel.hpp"
#include "rotor/qudit_oracle.hpp"

namespace rotor {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Tr[(A ⊗ B) rho] without forming the product.
double local_expectation(const TwoModeDensity& r, const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
  const int n = r.space.dim();
  std::complex<double> sum = 0.0;
  for (int a = 0; a < n; ++a)
    for (int ap = 0; ap < n; ++ap) {
      if (A(a, ap) == 0.0) continue;
      const auto blk = r.rho.block(ap * n, a * n, n, n);
      sum += A(a, ap) * (B.transpose().cwiseProduct(blk)).sum();
    }
  return sum.real();
}

}  // namespace

void CvRunConfig::validate() const {
  params.validate();
  NoiseParams rates = noise;
  rates.n_bar = 1.0;
  rates.validate();
  if (cutoff < 0) throw InvalidArgument("cv: cutoff must be >= 0");
  if (decoder_s < 0) throw InvalidArgument("cv: decoder s must be >= 0");
  if (!(orthogonality_budget > 0.0)) throw InvalidArgument("cv: orthogonality budget must be > 0");
  if (!(deficit_tolerance > 0.0)) throw InvalidArgument("cv: deficit tolerance must be > 0");
  if (noise.gamma_l >= 1.0) throw InvalidArgument("cv: gamma_l must be < 1");
}

Eigen::VectorXcd adjusted_target(const OutcomeTuple& o, const ProtocolParams& params, int v_B) {
  const int d = params.d;
  Eigen::VectorXcd t = target_state(params).amplitudes();
  const long long shift_B = o.B2 + static_cast<long long>(v_B) * params.delta_f();
  for (int kA = 0; kA < d; ++kA)
    for (int kB = 0; kB < d; ++kB) {
      const long long ph = static_cast<long long>(kA) * o.A2 + kB * shift_B;
      t(kA * d + kB) *= std::polar(1.0, -kTwoPi * static_cast<double>(mod(ph, d)) / d);
    }
  return t;
}

CvReport run_cv(const CvRunConfig& config) {
  config.validate();
  const ProtocolParams& p = config.params;
  CvReport rep;
  rep.config = config;
  rep.cutoff = config.cutoff > 0 ? config.cutoff : default_cutoff(config.primitive);
  const FockSpace space{rep.cutoff};
  const PeggBarnettBasis basis =
      config.decoder_s > 0 ? PeggBarnettBasis{config.decoder_s, p.d} : PeggBarnettBasis::for_cutoff(space.N, p.d);
  basis.validate();
  if (basis.s < space.dim()) throw InvalidArgument("cv: decoder s must be >= cutoff + 1");
  rep.decoder_s = basis.s;

  const Primitive prim = primitive_state(config.primitive, space);
  rep.mean_n = prim.mean_n;
  rep.delta_n = prim.delta_n;
  rep.leakage = prim.leakage;
  const EntangledState ent =
      prepare_entangled(space, prim.ket, p.m_i, config.variant, config.orthogonality_budget);
  rep.max_overlap = ent.max_overlap;
  rep.floor_bound = fmax_bound(prim.ket, p.delta_c(), p.d, space);

  TwoModeDensity rho = TwoModeDensity::pure(space, ent.ket);
  if (config.noise.gamma_phi > 0.0) rho = dephasing_apply(rho, config.noise.gamma_phi);
  if (config.noise.gamma_l > 0.0) {
    auto lr = loss_apply(rho, config.noise.gamma_l);
    rep.loss_deficit = lr.deficit;
    rho = std::move(lr.state);
  }
  rep.deficit = 2.0 * rep.leakage + rep.loss_deficit;
  if (rep.deficit > config.deficit_tolerance)
    throw EngineError("cv: truncation deficit " + csv::format(rep.deficit) + " exceeds tolerance " +
                      csv::format(config.deficit_tolerance) + "; raise the cutoff");

  NoiseParams dict_noise = config.noise;
  dict_noise.n_bar = prim.mean_n;
  const RotationDict rot = rotation_dict(p, dephasing_probs(dict_noise.gamma_phi, p.d));
  const LossDict ld = loss_dict(p, loss_probs(dict_noise.gamma_l, dict_noise.n_bar));
  const int dc = p.delta_c(), df = p.delta_f();
  for (int a = 0; a < dc; ++a)
    for (int b = 0; b < dc; ++b) rep.rotation_table.push_back(rot.at(a, b));
  for (int a = 0; a < df; ++a)
    for (int b = 0; b < df; ++b) rep.loss_table.push_back(ld.at(a, b));

  std::vector<Eigen::MatrixXcd> phase(static_cast<std::size_t>(dc)), number(static_cast<std::size_t>(df));
  for (int x = 0; x < dc; ++x) phase[static_cast<std::size_t>(x)] = modular_phase_pvm(x, dc, p.d, space).matrix;
  for (int x = 0; x < df; ++x) number[static_cast<std::size_t>(x)] = modular_number_pvm(x, df, space).matrix;

  rep.records.resize(static_cast<std::size_t>(dc * dc * df * df));
  parallel_for(
      static_cast<std::size_t>(dc * dc),
      [&](std::size_t task) {
        const int A1 = static_cast<int>(task) / dc, B1 = static_cast<int>(task) % dc;
        const auto& PA = phase[static_cast<std::size_t>(A1)];
        const auto& PB = phase[static_cast<std::size_t>(B1)];
        const double p1 = local_expectation(rho, PA, PB);
        TwoModeDensity r1 = apply_local(rho, PA, PB);
        const double u_B = rot.at(A1, B1);
        r1 = rotate_local(r1, -A1 * kTwoPi / p.d, (-B1 + u_B * dc) * kTwoPi / p.d);
        const double t1 = r1.trace();
        for (int A2 = 0; A2 < df; ++A2)
          for (int B2 = 0; B2 < df; ++B2) {
            const OutcomeTuple o{A1, B1, A2, B2};
            auto& rec = rep.records[static_cast<std::size_t>(((A1 * dc + B1) * df + A2) * df + B2)];
            rec.outcome = o;
            const TwoModeDensity r2 = number_project(r1, A2, B2, df);
            const double t2 = r2.trace();
            rec.probability = t1 > 0.0 ? p1 * t2 / t1 : 0.0;
            if (!(t2 > 1e-300) || !(rec.probability > 0.0)) {
              rec.probability = std::max(0.0, rec.probability);
              continue;
            }
            rec.possible = true;
            const Eigen::MatrixXcd sigma = decode_two_mode(r2, basis);
            const Eigen::VectorXcd target = adjusted_target(o, p, ld.at(A2, B2));
            rec.fidelity = logical_fidelity(sigma, target);
            rec.infidelity = 1.0 - rec.fidelity;
          }
      },
      config.workers);

  double kept_p = 0.0, kept_f = 0.0, kept_inf = 0.0, dropped = 0.0;
  for (auto& r : rep.records) {
    rep.total_probability += r.probability;
    if (!r.possible) continue;
    r.kept = outcome_kept(r.fidelity, p.f_cut);
    if (r.kept) {
      kept_p += r.probability;
      kept_f += r.probability * r.fidelity;
      kept_inf += r.probability * r.infidelity;
    } else {
      dropped += r.probability;
    }
  }
  if (kept_p > 0.0) {
    rep.f_avg = kept_f / kept_p;
    rep.infidelity_avg = kept_inf / kept_p;
    rep.p_abort = dropped / rep.total_probability;
  } else {
    rep.p_abort = 1.0;
  }
  return rep;
}

}  // namespace rotor
