// Acceptance suite: one line per criterion, PASS or FAIL with the measured values.
// Exit status is nonzero when any criterion fails unless --report-only is given.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rotor/cv_protocol.hpp"
#include "rotor/discrete_protocol.hpp"
#include "rotor/errors.hpp"
#include "rotor/experiments.hpp"
#include "rotor/fock_engine.hpp"
#include "rotor/nocomm_baseline.hpp"
#include "rotor/noise_model.hpp"
#include "rotor/qudit_oracle.hpp"

using namespace rotor;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Two-cavity shift distribution on Z_4 composed from the dephasing table.
struct ShiftProbs {
  double p0, p1, p2;
};
ShiftProbs shift_probs(double gamma_phi) {
  const auto t = dephasing_probs(gamma_phi, 4);
  auto pd = [&](int delta) {
    double s = 0.0;
    for (int a = -1; a <= 2; ++a) s += t.at(a) * t.at(a + delta);
    return s;
  };
  return {pd(0), pd(1), pd(2)};
}

Outcome four_level() {
  const auto p = four_level_params();
  double err_f = 0.0, err_a = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (double g : {1e-3, 1e-2, 5e-2}) {
    const auto sp = shift_probs(g);
    const auto rep = run_protocol(p, {0.0, g, 16.0});
    err_f = std::max(err_f, std::abs(*rep.f_avg - sp.p0 / (sp.p0 + sp.p2)));
    err_a = std::max(err_a, std::abs(rep.p_abort - 2.0 * sp.p1));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {err_f < 1e-12 && err_a < 1e-12 && secs < 1.0,
          fmt("max |dF| = %.2e, max |dp_abort| = %.2e, %.3f s", err_f, err_a, secs)};
}

Outcome nocomm_closed_form() {
  auto p = four_level_params();
  double err = 0.0;
  for (double g : {1e-3, 1e-2, 5e-2}) {
    const auto sp = shift_probs(g);
    err = std::max(err, std::abs(optimize_strategy(p, {0.0, g, 16.0}).f_avg - (1.0 - sp.p1 - sp.p2)));
  }
  int agree = 0;
  // The two fidelities differ by O(p1); below gamma ~ 1e-2 p1 underflows and they coincide.
  const auto grid = logspace(2e-2, 2.0, 20);
  for (double g : grid) {
    const auto sp = shift_probs(g);
    const double f_dist = *run_protocol(p, {0.0, g, 16.0}).f_avg;
    const double f_nc = optimize_strategy(p, {0.0, g, 16.0}).f_avg;
    const bool beats = f_dist > f_nc;
    const bool predicted = sp.p2 < 0.5 * (1.0 - 2.0 * sp.p1);
    agree += beats == predicted;
  }
  return {err < 1e-12 && agree == static_cast<int>(grid.size()),
          fmt("max |F_nc - (1-p1-p2)| = %.2e, inequality agrees at %d/%zu points", err, agree, grid.size())};
}

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Noise {
    double gl, gp, nbar;
  };
  const std::vector<Noise> noises = {{0.02, 0.05, 2.0}, {0.05, 0.01, 1.0}, {0.01, 0.1, 3.0}};
  int combos = 0, bad = 0;
  double worst = 0.0;
  for (int d : {4, 8, 16})
    for (int m_i = 2; m_i <= d; m_i *= 2)
      for (int m_c = 2; m_c <= m_i; m_c *= 2)
        for (int m_f = 2; m_f <= m_c; m_f *= 2) {
          // Keep the d = 16 share small; each of its runs is the slowest.
          if (d == 16 && m_i != 16 && m_i != 8) continue;
          for (std::size_t k = 0; k < noises.size(); ++k) {
            const ProtocolParams p{d, m_i, m_c, m_f, k == 1 ? 0.9 : 0.0};
            try {
              p.validate();
            } catch (const InvalidArgument&) {
              continue;
            }
            const auto& n = noises[k];
            const auto deph = dephasing_probs(n.gp, d);
            const auto loss = loss_probs(n.gl, n.nbar, 4, 1.0);
            const auto orc = simulate_protocol(p, deph, loss);
            const auto rep = evaluate_protocol(p, deph, loss, rotation_dict(p, deph), loss_dict(p, loss));
            ++combos;
            double diff = 0.0;
            for (std::size_t i = 0; i < rep.records.size(); ++i) {
              diff = std::max(diff, std::abs(orc.records[i].probability - rep.records[i].probability));
              if (rep.records[i].possible)
                diff = std::max(diff, std::abs(orc.records[i].fidelity - rep.records[i].fidelity));
            }
            worst = std::max(worst, diff);
            bad += diff >= 1e-10;
          }
        }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {combos >= 50 && bad == 0 && secs < 300.0,
          fmt("%d combinations, max per-outcome |diff| = %.2e, %d over 1e-10, %.1f s", combos, worst, bad, secs)};
}

Outcome fig3_shape() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = preset("fig3");
  const auto surf = optimal_mc_surface(cfg);
  const auto& gl = cfg.gamma_l;
  const auto& gp = cfg.gamma_phi;
  std::map<std::pair<double, double>, int> m;
  for (const auto& s : surf) m[{s.gamma_l, s.gamma_phi}] = s.m_c_star;
  auto at = [&](double l, double p) {
    double bl = gl[0], bp = gp[0];
    for (double x : gl)
      if (std::abs(std::log(x / l)) < std::abs(std::log(bl / l))) bl = x;
    for (double x : gp)
      if (std::abs(std::log(x / p)) < std::abs(std::log(bp / p))) bp = x;
    return m.at({bl, bp});
  };
  const int deph_corner = at(1e-4, std::pow(10.0, -1.5));
  const int loss_corner = at(std::pow(10.0, -1.5), 1e-4);
  // Loss favours larger m_c, dephasing smaller.
  int violations = 0;
  std::string where;
  for (std::size_t i = 0; i < gl.size(); ++i)
    for (std::size_t j = 0; j < gp.size(); ++j) {
      const int v = m.at({gl[i], gp[j]});
      bool bad = false;
      if (i + 1 < gl.size() && m.at({gl[i + 1], gp[j]}) < v) bad = true;
      if (j + 1 < gp.size() && m.at({gl[i], gp[j + 1]}) > v) bad = true;
      if (bad) {
        ++violations;
        where += fmt(" (gl=%.3g, gp=%.3g, m_c*=%d)", gl[i], gp[j], v);
      }
    }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {deph_corner == 2 && loss_corner == 16 && violations == 0 && secs < 300.0,
          fmt("dephasing corner m_c*=%d, loss corner m_c*=%d, %d monotonicity violations%s, %.1f s", deph_corner,
              loss_corner, violations, where.c_str(), secs)};
}

Outcome fig4_dominance() {
  const auto res = run_sweep(preset("fig4"));
  std::map<double, double> dist, nc;
  for (const auto& r : res.rows) {
    if (!r.ok || !r.infidelity) continue;
    (r.point.engine == Engine::discrete ? dist : nc)[r.point.gamma_l] = *r.infidelity;
  }
  int points = 0, dominated = 0, strict = 0;
  for (const auto& [g, e_nc] : nc) {
    if (!dist.count(g)) continue;
    ++points;
    const double e_d = dist.at(g);
    dominated += e_d <= e_nc + 1e-12;
    strict += e_d < e_nc * (1.0 - 1e-9);
  }
  const bool expected = points == static_cast<int>(preset("fig4").gamma.size());
  return {expected && dominated == points && strict >= 0.9 * points,
          fmt("%d points, F_dist >= F_nc at %d, strict at %d", points, dominated, strict)};
}

Outcome fig5_abort() {
  const auto cfg = preset("fig5");
  int compared = 0, worse = 0, kept_bad = 0, all_abort = 0;
  double first_abort = 0.0;
  for (double g : cfg.gamma) {
    const NoiseParams n{g, g, cfg.n_bar[0]};
    const auto plain = optimal_mc({cfg.d, cfg.m_i, 2, 2, 0.0}, n);
    const auto cut = optimal_mc({cfg.d, cfg.m_i, 2, 2, 0.9}, n);
    if (cut.report.all_aborted()) {
      if (all_abort++ == 0) first_abort = g;
      continue;
    }
    ++compared;
    worse += *cut.report.f_avg < *plain.report.f_avg - 1e-12;
    for (const auto& r : cut.report.records)
      if (r.kept && r.probability > 0.0 && !(r.fidelity > 0.9)) ++kept_bad;
  }
  return {compared > 0 && worse == 0 && kept_bad == 0,
          fmt("%d points compared, %d with lower kept fidelity, %d kept outcomes with F <= 0.9; all-abort at %d "
              "points (from gamma = %.3g)",
              compared, worse, kept_bad, all_abort, first_abort)};
}

TwoModeDensity random_density(const FockSpace& space, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  const int D = space.dim() * space.dim();
  Eigen::MatrixXcd m(D, 3);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = {g(rng), g(rng)};
  Eigen::MatrixXcd rho = m * m.adjoint();
  rho /= rho.trace().real();
  return {space, rho};
}

Outcome channel_invariants() {
  const auto t0 = std::chrono::steady_clock::now();
  const FockSpace space{40};
  const int n = space.dim();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  double povm = 0.0, pvm = 0.0;
  for (int d : {8, 16}) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
    for (int k = 0; k < d; ++k) s += phase_povm(k, d, space).matrix;
    povm = std::max(povm, (s - id).cwiseAbs().maxCoeff());
  }
  for (int df : {2, 4, 8}) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
    for (int x = 0; x < df; ++x) s += modular_number_pvm(x, df, space).matrix;
    pvm = std::max(pvm, (s - id).cwiseAbs().maxCoeff());
  }

  const auto prim = primitive_state({PrimitiveSpec::Kind::coherent, {3.0, 0.0}, {0.0, 0.0}}, space);
  const auto ent = prepare_entangled(space, prim.ket, 8, EntangledVariant::ancilla_equivalent, 1e-2);
  const auto lossy = loss_apply(TwoModeDensity::pure(space, ent.ket), 0.1);
  const double deficit = std::abs(1.0 - lossy.state.trace());

  // Elementwise average of e^{i theta (n - n')} over Gaussian angles, by
  // 64-node probabilists' Gauss-Hermite quadrature (Golub-Welsch).
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(64, 64);
  for (int k = 1; k < 64; ++k) j(k - 1, k) = j(k, k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  const Eigen::VectorXd x = es.eigenvalues();
  const Eigen::VectorXd w = es.eigenvectors().row(0).transpose().array().square();
  double quad = 0.0;
  const auto r = random_density(space, 7);
  for (double gamma : {0.01, 0.05}) {
    std::vector<std::complex<double>> q(2 * n - 1);
    for (int dn = -(n - 1); dn <= n - 1; ++dn) {
      std::complex<double> s = 0.0;
      for (int i = 0; i < 64; ++i) s += w(i) * std::exp(std::complex<double>(0.0, std::sqrt(gamma) * x(i) * dn));
      q[dn + n - 1] = s;
    }
    const auto deph = dephasing_apply(r, gamma);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int a2 = 0; a2 < n; ++a2)
          for (int b2 = 0; b2 < n; ++b2) {
            const int row = space.joint(a, b), col = space.joint(a2, b2);
            const auto ref = r.rho(row, col) * q[a - a2 + n - 1] * q[b - b2 + n - 1];
            quad = std::max(quad, std::abs(deph.rho(row, col) - ref));
          }
  }

  double commute = 0.0;
  for (unsigned seed = 0; seed < 10; ++seed) {
    const auto rr = random_density(space, 100 + seed);
    const auto ld = dephasing_apply(loss_apply(rr, 0.05).state, 0.03);
    const auto dl = loss_apply(dephasing_apply(rr, 0.03), 0.05).state;
    commute = std::max(commute, (ld.rho - dl.rho).cwiseAbs().maxCoeff());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {povm < 1e-12 && pvm < 1e-12 && deficit < 1e-8 && quad < 1e-8 && commute < 1e-9 && secs < 120.0,
          fmt("cutoff 40: |sum M_k - I| = %.1e, |sum P_x - I| = %.1e, loss trace deficit %.1e, dephasing vs "
              "quadrature %.1e, commutator %.1e, %.1f s",
              povm, pvm, deficit, quad, commute, secs)};
}

struct CvRun {
  double gamma, zeta, infidelity, floor_bound, discrete, band_lo, band_hi;
};

std::vector<CvRun> cv_runs() {
  auto cfg = preset("fig7");
  auto extra = cfg;
  extra.zeta = {0.0};
  extra.gamma = {0.2, 0.3};
  std::vector<CvRun> out;
  for (const auto* c : {&cfg, &extra})
    for (const auto& r : run_sweep(*c).rows) {
      if (!r.ok) throw EngineError("cv point failed: " + r.message);
      out.push_back({r.point.gamma_l, r.point.zeta, *r.infidelity, *r.floor_bound, *r.discrete_infidelity,
                     *r.band_lo, *r.band_hi});
    }
  return out;
}

double plateau(const std::vector<CvRun>& runs, double zeta) {
  double g = 1e9, v = 0.0;
  for (const auto& r : runs)
    if (r.zeta == zeta && r.gamma < g) g = r.gamma, v = r.infidelity;
  return v;
}

Outcome cv_desk(const std::vector<CvRun>& runs, double secs) {
  const double floor0 = plateau(runs, 0.0);
  const double floor_sq = plateau(runs, -0.2);
  double bound = 0.0;
  for (const auto& r : runs)
    if (r.zeta == 0.0) bound = r.floor_bound;
  const bool a = floor0 <= bound;
  int in_regime = 0, in_band = 0;
  std::string band;
  for (const auto& r : runs) {
    if (r.zeta != 0.0 || r.discrete <= 10.0 * floor0) continue;
    ++in_regime;
    const bool ok = r.infidelity >= r.band_lo && r.infidelity <= r.band_hi;
    in_band += ok;
    band += fmt(" g=%.3g: %.4f in [%.4f, %.4f]%s;", r.gamma, r.infidelity, r.band_lo, r.band_hi, ok ? "" : " no");
  }
  const bool b = in_regime > 0 && in_band == in_regime;
  const bool c = floor_sq < floor0;
  return {a && b && c && secs < 1800.0,
          fmt("(a) %s floor %.4f vs 2*delta = %.4f; (b) %s %d/%d in band:%s (c) %s floor %.4f at zeta=-0.2 vs "
              "%.4f; %.0f s",
              a ? "pass" : "FAIL", floor0, bound, b ? "pass" : "FAIL", in_band, in_regime, band.c_str(),
              c ? "pass" : "FAIL", floor_sq, floor0, secs)};
}

Outcome two_leg_equivalence() {
  double worst = 0.0;
  for (double g : {1e-3, 1e-2, 5e-2, 0.1, 0.2}) {
    const auto r = low_entanglement_check(g);
    worst = std::max(worst, std::abs(r.f_high - r.f_low));
  }
  return {worst < 1e-10, fmt("max |F(m_i=4) - F(two-leg)| = %.2e over 5 dephasing rates", worst)};
}

Outcome fig8_ordering() {
  const auto res = run_sweep(preset("fig8"));
  std::map<double, double> f2, f4;
  int failed = 0;
  for (const auto& r : res.rows) {
    if (!r.ok || !r.f_avg) {
      ++failed;
      continue;
    }
    (r.point.params.m_f == 2 ? f2 : f4)[r.point.gamma_l] = *r.f_avg;
  }
  int points = 0, ordered = 0;
  for (const auto& [g, v4] : f4)
    if (f2.count(g)) {
      ++points;
      ordered += v4 <= f2.at(g) + 1e-12;
    }
  return {failed == 0 && points > 0 && ordered == points,
          fmt("%zu rows, %d failed, F(m_f=4) <= F(m_f=2) at %d/%d points", res.rows.size(), failed, ordered, points)};
}

}  // namespace

int main(int argc, char** argv) {
  bool report_only = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--report-only") == 0) report_only = true;

  int failed = 0;
  auto line = [&](const char* name, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  };

  line("four-level closed form", four_level);
  line("no-comm closed form", nocomm_closed_form);
  line("oracle equivalence", oracle_equivalence);
  line("optimal m_c map shape", fig3_shape);
  line("no-comm dominance", fig4_dominance);
  line("abort threshold", fig5_abort);
  line("channel invariants", channel_invariants);
  line("cv desk-scale claims", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto runs = cv_runs();
    return cv_desk(runs, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  });
  line("two-leg equivalence", two_leg_equivalence);
  line("final dimension ordering", fig8_ordering);

  std::printf("%d of 10 criteria failed\n", failed);
  return report_only ? 0 : (failed ? 1 : 0);
}
