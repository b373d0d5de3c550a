#include "doctest.h"
#include "rotor/nocomm_baseline.hpp"
#include "rotor/qudit_oracle.hpp"

using namespace rotor;

TEST_CASE("noiseless no-communication rule") {
  const NoiseParams clean{0.0, 0.0, 16.0};
  CHECK(nocomm_fidelity(ProtocolParams{16, 16, 2, 2, 0.0}, clean, Strategy{}) == doctest::Approx(1.0));
  // Without a message the dual outcomes cannot be reconciled once Delta_f > 1.
  CHECK(nocomm_fidelity(ProtocolParams{16, 16, 4, 2, 0.0}, clean, Strategy{}) == doctest::Approx(0.5));
  CHECK(nocomm_fidelity(ProtocolParams{16, 16, 8, 2, 0.0}, clean, Strategy{}) == doctest::Approx(0.25));
  const auto best = optimize_strategy_and_mc(ProtocolParams{16, 16, 8, 2, 0.0}, clean);
  CHECK(best.f_avg == doctest::Approx(1.0));
  CHECK(best.m_c == 2);
}

TEST_CASE("four-level no-communication closed form") {
  auto p = four_level_params();
  for (double g : {1e-3, 1e-2, 5e-2, 0.2}) {
    const auto cf = four_level_closed_form(g);
    const double f = nocomm_fidelity(p, NoiseParams{0.0, g, 16.0}, Strategy{});
    CHECK(std::abs(f - (1.0 - cf.p1 - cf.p2)) < 1e-12);
    CHECK(std::abs(f - cf.nocomm_fidelity) < 1e-12);
    CHECK(optimize_strategy(p, NoiseParams{0.0, g, 16.0}).strategy.family ==
          Strategy::Family::constant);
  }
}

TEST_CASE("no-communication matches the explicit qudit simulation") {
  for (ProtocolParams p : {four_level_params(), ProtocolParams{8, 8, 2, 2, 0.0},
                           ProtocolParams{8, 8, 4, 2, 0.0}, ProtocolParams{16, 16, 4, 2, 0.0}}) {
    p.f_cut = 0.0;
    const auto deph = dephasing_probs(0.04, p.d);
    const auto loss = loss_probs(0.03, 4.0, 3, 1.0);
    for (const auto& s : strategy_candidates(p)) {
      std::vector<int> f;
      for (int o = 0; o < p.delta_c(); ++o) f.push_back(strategy_map(s, p, o));
      const auto rep = nocomm_report(p, deph, loss, f);
      const auto orc = simulate_with(initial_state(p.d, p.m_i), p, deph, loss, nocomm_corrections(f));
      CHECK(std::abs(*rep.f_avg - *orc.f_avg) < 1e-10);
    }
  }
}

TEST_CASE("families versus exhaustive binary maps") {
  for (ProtocolParams p : {ProtocolParams{8, 8, 2, 2, 0.0}, ProtocolParams{8, 8, 4, 2, 0.0},
                           ProtocolParams{8, 4, 2, 2, 0.0}})
    for (double g : {1e-3, 1e-2, 5e-2, 0.1}) {
      const NoiseParams n{g, g, 16.0};
      const auto best = optimize_strategy(p, n);
      CHECK(best.f_avg == doctest::Approx(nocomm_bruteforce(p, n)).epsilon(1e-12));
    }
}

TEST_CASE("step index is arbitrary by translation symmetry") {
  const ProtocolParams p{16, 4, 2, 2, 0.0};
  for (double g : {1e-2, 5e-2}) {
    const NoiseParams n{0.0, g, 16.0};
    const double f0 = nocomm_fidelity(p, n, Strategy{Strategy::Family::step, 0});
    for (int k = 1; k < p.m_i / p.m_c; ++k)
      CHECK(nocomm_fidelity(p, n, Strategy{Strategy::Family::step, k}) ==
            doctest::Approx(f0).epsilon(1e-12));
  }
}

TEST_CASE("strategy admissibility") {
  const ProtocolParams p{8, 4, 2, 2, 0.0};  // Delta_i = 2
  CHECK_FALSE(strategy_allowed(Strategy{Strategy::Family::step, 0}, p));
  CHECK(strategy_candidates(p).size() == 1);
  CHECK_THROWS(nocomm_fidelity(p, NoiseParams{}, Strategy{Strategy::Family::step, 0}));
}
