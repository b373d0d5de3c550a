#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "rotor/discrete_protocol.hpp"
#include "rotor/errors.hpp"
#include "rotor/experiments.hpp"

using namespace rotor;

namespace {

std::string csv_text(const SweepResult& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

}  // namespace

TEST_CASE("logspace") {
  const auto g = logspace(1e-4, 1e-1, 4);
  REQUIRE(g.size() == 4);
  CHECK(g[0] == 1e-4);
  CHECK(g[3] == 1e-1);
  CHECK(g[1] == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK_THROWS_AS(logspace(0.0, 1.0, 3), InvalidArgument);
}

TEST_CASE("presets") {
  const auto f3 = preset("fig3");
  CHECK(f3.d == 16);
  CHECK(f3.m_i == 16);
  CHECK(f3.n_bar == std::vector<double>{16.0});
  CHECK(f3.m_c == std::vector<int>{2, 4, 8, 16});
  CHECK(f3.gamma_l.front() == 1e-4);
  CHECK(f3.gamma_l.back() == 1e-1);
  CHECK(expand_grid(f3).size() == 4 * 13 * 13);
  const auto f5 = preset("fig5");
  CHECK(f5.d == 32);
  CHECK(f5.m_i == 16);
  CHECK(f5.f_cut == std::vector<double>{0.0, 0.9});
  CHECK(f5.n_bar == std::vector<double>{49.0});
  CHECK(preset("fig7").d == 8);
  CHECK(preset("fig7", "paper").alpha == std::vector<double>{7.0});
  for (const char* id : {"fig3", "fig4", "fig5", "fig7", "fig8", "custom"}) CHECK_NOTHROW(preset(id).validate());
  CHECK_THROWS_AS(preset("fig6"), InvalidArgument);
}

TEST_CASE("YAML and JSON configs agree") {
  const std::string yaml =
      "preset: fig3\n"
      "gamma_l: {logspace: [1e-4, 1e-1, 4]}\n"
      "gamma_phi: [1e-3, 1e-2]\n"
      "m_c: [2, opt]\n"
      "workers: 2\n";
  const std::string js =
      R"({"preset": "fig3", "gamma_l": {"logspace": [1e-4, 0.1, 4]},
          "gamma_phi": [0.001, 0.01], "m_c": [2, "opt"], "workers": 2})";
  const auto a = parse_sweep_config(yaml, false);
  const auto b = parse_sweep_config(js, true);
  CHECK(a.m_c == std::vector<int>{2, 0});
  CHECK(a.workers == 2);
  CHECK(config_hash(a) == config_hash(b));
  CHECK(csv_text(run_sweep(a)) == csv_text(run_sweep(b)));
}

TEST_CASE("invalid configs") {
  CHECK_THROWS_AS(parse_sweep_config("preset: fig3\nbogus: 1\n", false), InvalidArgument);
  CHECK_THROWS_AS(parse_sweep_config("{not json", true), InvalidArgument);
  CHECK_THROWS_AS(parse_sweep_config("experiment: fig3\nengines: [cv]\ngamma: [0.01]\nm_c: [4]\n", false),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_sweep_config("gamma: []\n", false), InvalidArgument);
  CHECK_THROWS_AS(parse_sweep_config("m_c: [3]\n", false), InvalidArgument);
  CHECK_THROWS_AS(parse_sweep_config("engines: [cv]\nd: 32\nm_i: 16\nm_c: [4]\n", false), InvalidArgument);
  CHECK_THROWS_AS(parse_sweep_config("gamma_l: [-1]\ngamma: []\ngamma_phi: [0.1]\n", false), InvalidArgument);
}

TEST_CASE("custom point equals a direct engine call") {
  const auto c = parse_sweep_config("d: 16\nm_i: 16\nm_c: [4]\nn_bar: 49\ngamma: [0.003]\nf_cut: 0.9\n", false);
  const auto res = run_sweep(c);
  REQUIRE(res.rows.size() == 1);
  const auto direct = run_protocol({16, 16, 4, 2, 0.9}, {0.003, 0.003, 49.0});
  CHECK(res.rows[0].ok);
  CHECK(*res.rows[0].f_avg == *direct.f_avg);
  CHECK(*res.rows[0].infidelity == *direct.infidelity_avg);
  CHECK(res.rows[0].p_abort == direct.p_abort);
}

TEST_CASE("CSV is identical for any worker count") {
  auto c = preset("fig4");
  c.gamma = logspace(1e-3, 1e-1, 7);
  c.workers = 1;
  const std::string one = csv_text(run_sweep(c));
  c.workers = 3;
  const std::string three = csv_text(run_sweep(c));
  CHECK(one == three);
  CHECK(one.find("runtime_s") == std::string::npos);
  c.with_timing = true;
  CHECK(csv_text(run_sweep(c)).find("runtime_s") != std::string::npos);
  // Header plus one row per point, LF endings.
  std::size_t lines = 0;
  for (char ch : one) lines += ch == '\n';
  CHECK(lines == 1 + 14);
  CHECK(one.find('\r') == std::string::npos);
}

TEST_CASE("failing points are flagged and the sweep continues") {
  auto c = parse_sweep_config("engines: [oracle, discrete]\nd: 8\nm_i: 8\nm_c: [4]\nn_bar: 49\ngamma: [1e-4, 0.05]\n", false);
  const auto res = run_sweep(c);
  REQUIRE(res.rows.size() == 4);
  CHECK(res.rows[0].ok);        // small loss: oracle fits its l_max guard
  CHECK_FALSE(res.rows[1].ok);  // heavy loss exceeds it
  CHECK(res.failures() == 1);
  CHECK(res.rows[3].ok);
  std::ostringstream m;
  write_manifest(m, res);
  CHECK(m.str().find("\"failures\": 1") != std::string::npos);
  CHECK(m.str().find("config_hash") != std::string::npos);
}

TEST_CASE("optimal m_c surface edges") {
  SweepConfig c = preset("fig3");
  c.gamma_l = {0.0};
  c.gamma_phi = logspace(1e-4, 1e-1, 7);
  for (const auto& s : optimal_mc_surface(c)) CHECK(s.m_c_star == 2);
  c.gamma_l = logspace(1e-4, 1e-1, 7);
  c.gamma_phi = {0.0};
  for (const auto& s : optimal_mc_surface(c)) CHECK(s.m_c_star == 16);
}

TEST_CASE("cv rows carry truncation diagnostics and the discrete band") {
  auto c = parse_sweep_config("experiment: fig7\nengines: [cv]\nd: 8\nm_i: 8\nm_c: [4]\ngamma: [0.03]\nalpha: [3]\n", false);
  const auto res = run_sweep(c);
  REQUIRE(res.rows.size() == 1);
  const auto& r = res.rows[0];
  REQUIRE(r.ok);
  CHECK(r.cutoff > 0);
  CHECK(*r.band_lo <= *r.discrete_infidelity);
  CHECK(*r.discrete_infidelity <= *r.band_hi);
  CHECK(*r.delta_n == doctest::Approx(3.0).epsilon(1e-6));
}
