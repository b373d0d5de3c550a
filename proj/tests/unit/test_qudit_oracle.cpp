#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rotor/errors.hpp"
#include "rotor/modmath.hpp"
#include "rotor/qudit_oracle.hpp"

using namespace rotor;

namespace {

QuditState random_state(int d, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(d * d);
  for (auto& z : v) z = {g(rng), g(rng)};
  return QuditState(d, v / v.norm());
}

}  // namespace

TEST_CASE("initial state") {
  const auto s = initial_state(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) CHECK(std::abs(s.at(a, b) - (a == b ? 0.5 : 0.0)) < 1e-15);
  CHECK(entanglement_entropy(initial_state(8, 1)) == doctest::Approx(0.0));
  CHECK(entanglement_entropy(initial_state(16, 8)) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(initial_state(16, 8).norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(initial_state(8, 3), InvalidArgument);
}

TEST_CASE("Pauli algebra") {
  const int d = 8;
  const auto psi = random_state(d, 7);
  const auto xd = apply_pauli(psi, Cavity::A, PauliKind::X, d);
  CHECK((xd.amplitudes() - psi.amplitudes()).norm() < 1e-14);

  QuditState plus0(d);
  const Eigen::VectorXcd v0 = dual_basis_vector(d, 0);
  for (int j = 0; j < d; ++j) plus0.at(j, 0) = v0(j);
  const auto shifted = apply_pauli(plus0, Cavity::A, PauliKind::Z, -1);
  const Eigen::VectorXcd vd = dual_basis_vector(d, d - 1);
  for (int j = 0; j < d; ++j) CHECK(std::abs(shifted.at(j, 0) - vd(j)) < 1e-14);

  for (auto c : {Cavity::A, Cavity::B}) {
    const auto zx = apply_pauli(apply_pauli(psi, c, PauliKind::X, 1), c, PauliKind::Z, 1);
    const auto xz = apply_pauli(apply_pauli(psi, c, PauliKind::Z, 1), c, PauliKind::X, 1);
    const auto phase = std::polar(1.0, -2.0 * std::numbers::pi / d);
    CHECK((zx.amplitudes() - phase * xz.amplitudes()).norm() < 1e-13);
    CHECK(zx.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("dual transform") {
  const int d = 8;
  QuditState zero(d);
  zero.at(0, 0) = 1.0;
  const auto dz = dual_transform(zero, Cavity::A);
  for (int k = 0; k < d; ++k) CHECK(std::abs(dz.at(k, 0) - 1.0 / std::sqrt(8.0)) < 1e-14);

  const auto psi = random_state(d, 3);
  for (auto c : {Cavity::A, Cavity::B}) {
    const auto t = dual_transform(psi, c);
    CHECK(t.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((dual_transform(t, c, true).amplitudes() - psi.amplitudes()).norm() < 1e-13);
  }
}

TEST_CASE("intermediate state rewrites in the modular dual basis") {
  const ProtocolParams p{16, 16, 4, 4, 0.0};
  // With m_f = m_c the target is the intermediate m_c-leg state itself.
  const auto t = target_state(p);
  const auto ref = initial_state(16, 4);
  CHECK(std::abs(t.amplitudes().dot(ref.amplitudes())) == doctest::Approx(1.0).epsilon(1e-12));

  const auto four = target_state(four_level_params());
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const double expect = (a == b && a % 2 == 0) ? 1.0 / std::sqrt(2.0) : 0.0;
      CHECK(std::abs(four.at(a, b) - expect) < 1e-14);
    }
}

TEST_CASE("noiseless and normalised simulation") {
  const ProtocolParams p{8, 8, 4, 2, 0.0};
  const auto rep = simulate_protocol(p, dephasing_probs(0.0, 8), loss_probs(0.0, 4.0));
  REQUIRE(rep.f_avg);
  CHECK(*rep.f_avg == doctest::Approx(1.0).epsilon(1e-12));

  const auto noisy = simulate_protocol(p, dephasing_probs(0.05, 8), loss_probs(0.05, 4.0, 4, 1.0));
  double total = 0.0;
  for (const auto& r : noisy.records) total += r.probability;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(simulate_protocol(ProtocolParams{32, 32, 4, 2, 0.0}, dephasing_probs(0.0, 32),
                                    loss_probs(0.0, 1.0)),
                  InvalidArgument);
}

TEST_CASE("four-level bookkeeping") {
  const auto p = four_level_params();
  const auto rep = simulate_protocol(p, dephasing_probs(0.05, 4), loss_probs(0.0, 1.0));
  const auto cf = four_level_closed_form(0.05);
  for (const auto& r : rep.records) {
    if (r.outcome.A1 != r.outcome.B1)
      CHECK(r.fidelity == doctest::Approx(0.5).epsilon(1e-12));
    else
      CHECK(r.fidelity == doctest::Approx(cf.fidelity).epsilon(1e-12));
  }
  CHECK(rep.p_abort == doctest::Approx(cf.p_abort).epsilon(1e-12));
}

TEST_CASE("oracle equals the factorised evaluator") {
  struct Case {
    ProtocolParams p;
    double gl, gp, nbar;
  };
  const std::vector<Case> cases = {
      {{4, 4, 2, 2, 0.0}, 0.02, 0.05, 2.0},  {{8, 8, 4, 2, 0.0}, 0.03, 0.02, 4.0},
      {{8, 8, 2, 2, 0.9}, 0.01, 0.08, 4.0},  {{8, 4, 4, 2, 0.0}, 0.05, 0.01, 2.0},
      {{8, 8, 8, 4, 0.0}, 0.02, 0.02, 3.0},  {{16, 16, 8, 2, 0.0}, 0.01, 0.01, 3.0},
      {{16, 8, 4, 4, 0.0}, 0.04, 0.03, 2.0}, {{16, 16, 16, 2, 0.0}, 0.1, 0.004, 4.0},
  };
  for (const auto& c : cases) {
    const auto deph = dephasing_probs(c.gp, c.p.d);
    const auto loss = loss_probs(c.gl, c.nbar, 4, 1.0);
    const auto orc = simulate_protocol(c.p, deph, loss);
    const auto rep =
        evaluate_protocol(c.p, deph, loss, rotation_dict(c.p, deph), loss_dict(c.p, loss));
    REQUIRE(orc.records.size() == rep.records.size());
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
      CHECK(std::abs(orc.records[i].probability - rep.records[i].probability) < 1e-10);
      if (rep.records[i].possible)
        CHECK(std::abs(orc.records[i].fidelity - rep.records[i].fidelity) < 1e-10);
    }
    CHECK(std::abs(*orc.f_avg - *rep.f_avg) < 1e-10);
  }
}

TEST_CASE("relative-shift ensemble reproduces the independent one on the four-leg state") {
  const auto p = four_level_params();
  const auto deph = dephasing_probs(0.1, 4);
  const auto corr = protocol_corrections(rotation_dict(p, deph), loss_dict(p, loss_probs(0.0, 1.0)));
  const auto a = simulate_mixture(relative_shift_mixture(initial_state(4, 4), deph), p, corr);
  const auto b = simulate_with(initial_state(4, 4), p, deph, loss_probs(0.0, 1.0), corr);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].probability == doctest::Approx(b.records[i].probability).epsilon(1e-12));
    CHECK(a.records[i].fidelity == doctest::Approx(b.records[i].fidelity).epsilon(1e-12));
  }
}

TEST_CASE("two-leg input gives the same fidelity") {
  for (double g : {0.0, 0.05, 0.2}) {
    const auto r = low_entanglement_check(g);
    CHECK(std::abs(r.f_high - r.f_low) < 1e-10);
    if (g > 0.0) CHECK(r.f_high == doctest::Approx(four_level_closed_form(g).fidelity).epsilon(1e-12));
  }
  // Independent rotations of both cavities move the two-leg state off its
  // even sublattice; the gap is second order in the one-section probability.
  const double q1 = dephasing_probs(0.05, 4).at(1);
  CHECK(std::abs(low_entanglement_check(0.05).independent_gap) < 10.0 * q1 * q1);
  CHECK(low_entanglement_check(0.0).f_low == doctest::Approx(1.0));
}
