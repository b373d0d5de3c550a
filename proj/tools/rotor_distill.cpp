#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rotor/csv.hpp"
#include "rotor/cv_protocol.hpp"
#include "rotor/discrete_protocol.hpp"
#include "rotor/errors.hpp"
#include "rotor/experiments.hpp"
#include "rotor/nocomm_baseline.hpp"
#include "rotor/noise_model.hpp"
#include "rotor/qudit_oracle.hpp"

using namespace rotor;
using nlohmann::json;

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitEngine = 2;

struct DiscreteFlags {
  int d = 16;
  int m_i = 16;
  std::string m_c = "8";
  int m_f = 2;
  double f_cut = 0.0;
  double n_bar = 16.0;
  double gamma_l = 0.0;
  double gamma_phi = 0.0;
  int l_max = -1;
  std::string csv_path;
  std::string json_path;

  void add(CLI::App* app) {
    app->add_option("--d", d, "qudit dimension")->capture_default_str();
    app->add_option("--m-i", m_i, "initial legs")->capture_default_str();
    app->add_option("--m-c", m_c, "intermediate dimension, or 'opt'")->capture_default_str();
    app->add_option("--m-f", m_f, "final dimension")->capture_default_str();
    app->add_option("--f-cut", f_cut, "abort threshold (0 disables)")->capture_default_str();
    app->add_option("--n-bar", n_bar, "mean photon number")->capture_default_str();
    app->add_option("--gamma-l", gamma_l, "loss rate")->capture_default_str();
    app->add_option("--gamma-phi", gamma_phi, "dephasing rate")->capture_default_str();
    app->add_option("--l-max", l_max, "loss table cutoff (default: tail < 1e-10)");
    app->add_option("--csv", csv_path, "per-outcome CSV ('-' for stdout)");
    app->add_option("--json", json_path, "JSON summary (default stdout)");
  }
  bool optimise() const { return m_c == "opt"; }
  ProtocolParams params() const {
    int mc = m_f;
    if (!optimise()) {
      try {
        mc = std::stoi(m_c);
      } catch (const std::exception&) {
        throw InvalidArgument("--m-c must be an integer or 'opt'");
      }
    }
    ProtocolParams p{d, m_i, mc, m_f, f_cut};
    p.validate();
    return p;
  }
  NoiseParams noise() const {
    NoiseParams n{gamma_l, gamma_phi, n_bar};
    n.validate();
    return n;
  }
  std::optional<int> lmax() const { return l_max >= 0 ? std::optional<int>(l_max) : std::nullopt; }
  // An explicit --l-max accepts whatever tail it drops; the summary reports it.
  LossTable loss_table() const {
    const auto n = noise();
    return l_max >= 0 ? loss_probs(n.gamma_l, n.n_bar, l_max, 1.0) : loss_probs(n.gamma_l, n.n_bar);
  }
};

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// "-" writes to stdout; an empty path writes nothing.
template <class F>
void emit(const std::string& path, F&& body) {
  if (path.empty()) return;
  if (path == "-") {
    body(std::cout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw EngineError("cannot write '" + path + "'");
  body(f);
}

void emit_json(const std::string& path, const json& j) {
  emit(path.empty() ? "-" : path, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

void write_outcomes(std::ostream& o, const std::vector<OutcomeRecord>& recs) {
  csv::write_row(o, {"A1", "B1", "A2", "B2", "probability", "fidelity", "infidelity", "possible", "kept"});
  for (const auto& r : recs)
    csv::write_row(o, {std::to_string(r.outcome.A1), std::to_string(r.outcome.B1), std::to_string(r.outcome.A2),
                       std::to_string(r.outcome.B2), csv::format(r.probability), csv::format(r.fidelity),
                       csv::format(r.infidelity), r.possible ? "1" : "0", r.kept ? "1" : "0"});
}

json report_json(const DistillationReport& rep, int m_c) {
  return {{"d", rep.params.d},       {"m_i", rep.params.m_i},           {"m_c", m_c},
          {"m_f", rep.params.m_f},   {"f_cut", rep.params.f_cut},       {"gamma_l", rep.noise.gamma_l},
          {"gamma_phi", rep.noise.gamma_phi}, {"n_bar", rep.noise.n_bar}, {"l_max", rep.l_max},
          {"f_avg", opt_json(rep.f_avg)}, {"infidelity", opt_json(rep.infidelity_avg)},
          {"p_abort", rep.p_abort},  {"all_aborted", rep.all_aborted()}};
}

int cmd_discrete(const DiscreteFlags& f) {
  const auto p = f.params();
  const auto noise = f.noise();
  const OptimalMc best = f.optimise() ? optimal_mc(p, noise, f.lmax()) : OptimalMc{p.m_c, run_protocol(p, noise, f.lmax())};
  emit(f.csv_path, [&](std::ostream& o) { write_outcomes(o, best.report.records); });
  if (f.csv_path != "-" || !f.json_path.empty()) emit_json(f.json_path, report_json(best.report, best.m_c));
  return 0;
}

int cmd_nocomm(const DiscreteFlags& f, const std::string& strategy) {
  const auto p = f.params();
  const auto noise = f.noise();
  json j;
  if (!strategy.empty()) {
    const auto colon = strategy.find(':');
    Strategy s;
    const std::string fam = strategy.substr(0, colon);
    if (fam == "constant") s.family = Strategy::Family::constant;
    else if (fam == "step") s.family = Strategy::Family::step;
    else throw InvalidArgument("--strategy must be constant:n or step:n");
    s.n = colon == std::string::npos ? 0 : std::stoi(strategy.substr(colon + 1));
    if (!strategy_allowed(s, p)) throw InvalidArgument("strategy " + s.describe() + " not allowed here");
    const double fid = nocomm_fidelity(p, noise, s, f.lmax());
    j = {{"strategy", s.describe()}, {"m_c", p.m_c}, {"f_avg", fid}, {"infidelity", 1.0 - fid}};
  } else {
    const auto best = f.optimise() ? optimize_strategy_and_mc(p, noise, f.lmax()) : optimize_strategy(p, noise, f.lmax());
    j = {{"strategy", best.strategy.describe()}, {"m_c", best.m_c}, {"f_avg", best.f_avg}, {"infidelity", best.infidelity}};
  }
  emit_json(f.json_path, j);
  return 0;
}

int cmd_oracle(const DiscreteFlags& f) {
  auto p = f.params();
  const auto noise = f.noise();
  if (f.optimise()) p.m_c = optimal_mc(p, noise, f.lmax()).m_c;
  const auto deph = dephasing_probs(noise.gamma_phi, p.d);
  const auto loss = f.loss_table();
  const auto oracle = simulate_protocol(p, deph, loss);
  const auto rep = evaluate_protocol(p, deph, loss, rotation_dict(p, deph), loss_dict(p, loss));
  double max_df = 0.0, max_dp = 0.0;
  for (std::size_t i = 0; i < oracle.records.size(); ++i) {
    max_dp = std::max(max_dp, std::abs(oracle.records[i].probability - rep.records[i].probability));
    if (rep.records[i].possible)
      max_df = std::max(max_df, std::abs(oracle.records[i].fidelity - rep.records[i].fidelity));
  }
  emit(f.csv_path, [&](std::ostream& o) {
    csv::write_row(o, {"A1", "B1", "A2", "B2", "probability", "fidelity", "engine_probability", "engine_fidelity"});
    for (std::size_t i = 0; i < oracle.records.size(); ++i) {
      const auto& r = oracle.records[i];
      csv::write_row(o, {std::to_string(r.outcome.A1), std::to_string(r.outcome.B1), std::to_string(r.outcome.A2),
                         std::to_string(r.outcome.B2), csv::format(r.probability), csv::format(r.fidelity),
                         csv::format(rep.records[i].probability), csv::format(rep.records[i].fidelity)});
    }
  });
  json j = {{"m_c", p.m_c}, {"f_avg", opt_json(oracle.f_avg)}, {"p_abort", oracle.p_abort},
            {"engine_f_avg", opt_json(rep.f_avg)}, {"max_fidelity_diff", max_df}, {"max_probability_diff", max_dp},
            {"l_max", loss.l_max()}, {"loss_tail_mass", loss.tail_mass()}};
  if (f.csv_path != "-" || !f.json_path.empty()) emit_json(f.json_path, j);
  return 0;
}

int cmd_cv(const DiscreteFlags& f, double alpha, double zeta, int cutoff, int decoder_s, double budget) {
  if (f.optimise()) throw InvalidArgument("cv needs an explicit --m-c");
  CvRunConfig c;
  c.params = f.params();
  c.noise = {f.gamma_l, f.gamma_phi, 0.0};
  c.primitive = zeta == 0.0 ? PrimitiveSpec{PrimitiveSpec::Kind::coherent, {alpha, 0.0}, {0.0, 0.0}}
                            : PrimitiveSpec{PrimitiveSpec::Kind::squeezed_coherent, {alpha, 0.0}, {zeta, 0.0}};
  c.cutoff = cutoff;
  c.decoder_s = decoder_s;
  c.orthogonality_budget = budget;
  const auto rep = run_cv(c);
  emit(f.csv_path, [&](std::ostream& o) {
    csv::write_row(o, {"A1", "B1", "A2", "B2", "probability", "fidelity", "infidelity", "possible", "kept"});
    for (const auto& r : rep.records)
      csv::write_row(o, {std::to_string(r.outcome.A1), std::to_string(r.outcome.B1), std::to_string(r.outcome.A2),
                         std::to_string(r.outcome.B2), csv::format(r.probability), csv::format(r.fidelity),
                         csv::format(r.infidelity), r.possible ? "1" : "0", r.kept ? "1" : "0"});
  });
  json j = {{"alpha", alpha},
            {"zeta", zeta},
            {"cutoff", rep.cutoff},
            {"decoder_s", rep.decoder_s},
            {"mean_n", rep.mean_n},
            {"delta_n", rep.delta_n},
            {"f_avg", opt_json(rep.f_avg)},
            {"infidelity", opt_json(rep.infidelity_avg)},
            {"p_abort", rep.p_abort},
            {"floor_bound", rep.floor_bound},
            {"total_probability", rep.total_probability},
            {"truncation", {{"leakage", rep.leakage}, {"loss_deficit", rep.loss_deficit}, {"deficit", rep.deficit},
                            {"max_overlap", rep.max_overlap}}},
            {"u_B", rep.rotation_table},
            {"v_B", rep.loss_table}};
  if (f.csv_path != "-" || !f.json_path.empty()) emit_json(f.json_path, j);
  return 0;
}

int cmd_dict(const DiscreteFlags& f) {
  const auto p = f.params();
  const auto noise = f.noise();
  const auto rot = rotation_dict(p, dephasing_probs(noise.gamma_phi, p.d));
  const auto ld = loss_dict(p, f.loss_table());
  emit(f.csv_path.empty() ? "-" : f.csv_path, [&](std::ostream& o) {
    csv::write_row(o, {"table", "first", "second", "correction"});
    for (int a = 0; a < p.delta_c(); ++a)
      for (int b = 0; b < p.delta_c(); ++b)
        csv::write_row(o, {"u_B", std::to_string(a), std::to_string(b), std::to_string(rot.at(a, b))});
    for (int a = 0; a < p.delta_f(); ++a)
      for (int b = 0; b < p.delta_f(); ++b)
        csv::write_row(o, {"v_B", std::to_string(a), std::to_string(b), std::to_string(ld.at(a, b))});
  });
  return 0;
}

int cmd_tables(const DiscreteFlags& f, const std::string& deph_path, const std::string& loss_path) {
  const auto noise = f.noise();
  const auto deph = dephasing_probs(noise.gamma_phi, f.d);
  const auto loss = f.loss_table();
  emit(deph_path.empty() ? "-" : deph_path, [&](std::ostream& o) { write_csv(o, deph); });
  emit(loss_path.empty() ? "-" : loss_path, [&](std::ostream& o) { write_csv(o, loss); });
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& preset_name, const std::string& scale,
              const std::string& out, const std::string& manifest, const std::string& surface, int workers,
              bool timing) {
  if (config_path.empty() == preset_name.empty()) throw InvalidArgument("give exactly one of --config or --preset");
  SweepConfig c = config_path.empty() ? preset(preset_name, scale) : load_sweep_config(config_path);
  if (!out.empty()) c.csv_path = out;
  if (!manifest.empty()) c.manifest_path = manifest;
  if (!surface.empty()) c.surface_path = surface;
  if (workers > 0) c.workers = workers;
  if (timing) c.with_timing = true;
  c.validate();
  const auto res = run_sweep(c);
  if (c.csv_path.empty())
    write_csv(std::cout, res);
  write_outputs(res);
  if (res.failures() > 0) {
    std::cerr << "rotor-distill: " << res.failures() << " of " << res.rows.size() << " points failed\n";
    return kExitEngine;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete and continuous-variable simulation of rotation-code entanglement distillation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", software_version());

  DiscreteFlags flags;
  auto* discrete = app.add_subcommand("discrete", "exact discrete-model run");
  flags.add(discrete);
  auto* nocomm = app.add_subcommand("nocomm", "no-communication baseline");
  flags.add(nocomm);
  std::string strategy;
  nocomm->add_option("--strategy", strategy, "constant:n or step:n (default: optimise)");
  auto* oracle = app.add_subcommand("oracle", "brute-force qudit simulation, compared with the engine");
  flags.add(oracle);
  auto* cv = app.add_subcommand("cv", "truncated-Fock run");
  flags.add(cv);
  double alpha = 3.0, zeta = 0.0, budget = 1e-2;
  int cutoff = 0, decoder_s = 0;
  cv->add_option("--alpha", alpha, "primitive amplitude")->capture_default_str();
  cv->add_option("--zeta", zeta, "squeezing (negative squeezes phase)")->capture_default_str();
  cv->add_option("--cutoff", cutoff, "Fock cutoff N (0: automatic)");
  cv->add_option("--decoder-s", decoder_s, "Pegg-Barnett dimension (0: automatic)");
  cv->add_option("--budget", budget, "orthogonality budget")->capture_default_str();
  auto* dict = app.add_subcommand("dict", "print the correction dictionaries");
  flags.add(dict);
  auto* tables = app.add_subcommand("dump-tables", "write the discretised error tables");
  flags.add(tables);
  std::string deph_path, loss_path;
  tables->add_option("--dephasing-out", deph_path, "dephasing table CSV (default stdout)");
  tables->add_option("--loss-out", loss_path, "loss table CSV (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "run a configured or preset sweep");
  std::string config_path, preset_name, scale = "desk", out, manifest, surface;
  int workers = 0;
  bool timing = false;
  sweep->add_option("--config", config_path, "YAML or JSON sweep config");
  sweep->add_option("--preset", preset_name, "fig3|fig4|fig5|fig7|fig8|custom");
  sweep->add_option("--scale", scale, "desk or paper (presets)")->capture_default_str();
  sweep->add_option("--out", out, "results CSV (default stdout)");
  sweep->add_option("--manifest", manifest, "JSON manifest");
  sweep->add_option("--surface", surface, "optimal m_c surface CSV");
  sweep->add_option("--workers", workers, "worker threads (ROTOR_WORKERS otherwise)");
  sweep->add_flag("--with-timing", timing, "add a runtime_s column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*discrete) return cmd_discrete(flags);
    if (*nocomm) return cmd_nocomm(flags, strategy);
    if (*oracle) return cmd_oracle(flags);
    if (*cv) return cmd_cv(flags, alpha, zeta, cutoff, decoder_s, budget);
    if (*dict) return cmd_dict(flags);
    if (*tables) return cmd_tables(flags, deph_path, loss_path);
    if (*sweep) return cmd_sweep(config_path, preset_name, scale, out, manifest, surface, workers, timing);
  } catch (const InvalidArgument& e) {
    std::cerr << "rotor-distill: invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "rotor-distill: " << e.what() << '\n';
    return kExitEngine;
  }
  return kExitInvalid;
}
