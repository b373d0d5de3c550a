#include "rotor/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "json.hpp"
#include "rotor/csv.hpp"
#include "rotor/cv_protocol.hpp"
#include "rotor/discrete_protocol.hpp"
#include "rotor/errors.hpp"
#include "rotor/modmath.hpp"
#include "rotor/nocomm_baseline.hpp"
#include "rotor/parallel.hpp"
#include "rotor/qudit_oracle.hpp"

#ifndef ROTOR_VERSION
#define ROTOR_VERSION "unknown"
#endif

namespace rotor {

using nlohmann::json;

namespace {

constexpr int kCvMaxDimension = 16;

// YAML scalars carry no type; integers, then floats, then booleans are tried.
json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Sequence: {
      json arr = json::array();
      for (const auto& item : node) arr.push_back(yaml_to_json(item));
      return arr;
    }
    case YAML::NodeType::Map: {
      json obj = json::object();
      for (const auto& kv : node) obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return obj;
    }
    case YAML::NodeType::Scalar: {
      const std::string text = node.Scalar();
      if (node.Tag() == "!") return text;  // quoted
      long long i = 0;
      if (YAML::convert<long long>::decode(node, i)) return i;
      double x = 0.0;
      if (YAML::convert<double>::decode(node, x)) return x;
      bool b = false;
      if (YAML::convert<bool>::decode(node, b)) return b;
      return text;
    }
  }
  return nullptr;
}

std::vector<double> read_grid(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>()};
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw InvalidArgument("config: '" + key + "' entries must be numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  if (v.is_object() && v.contains("logspace")) {
    const auto& ls = v.at("logspace");
    if (!ls.is_array() || ls.size() != 3)
      throw InvalidArgument("config: '" + key + "' logspace needs [lo, hi, points]");
    return logspace(ls[0].get<double>(), ls[1].get<double>(), ls[2].get<int>());
  }
  throw InvalidArgument("config: '" + key + "' must be a number, list or {logspace: [lo, hi, n]}");
}

std::vector<int> read_int_grid(const json& v, const std::string& key, bool allow_opt) {
  auto one = [&](const json& x) {
    if (allow_opt && x.is_string() && x.get<std::string>() == "opt") return 0;
    if (!x.is_number_integer()) throw InvalidArgument("config: '" + key + "' entries must be integers");
    return x.get<int>();
  };
  if (v.is_array()) {
    std::vector<int> out;
    for (const auto& x : v) out.push_back(one(x));
    return out;
  }
  return {one(v)};
}

json grid_json(const std::vector<double>& g) { return json(g); }

json config_json(const SweepConfig& c, bool with_io) {
  json j;
  j["experiment"] = c.experiment;
  json engines = json::array();
  for (Engine e : c.engines) engines.push_back(to_string(e));
  j["engines"] = engines;
  j["d"] = c.d;
  j["m_i"] = c.m_i;
  json mc = json::array();
  for (int m : c.m_c) mc.push_back(m == 0 ? json("opt") : json(m));
  j["m_c"] = mc;
  j["m_f"] = c.m_f;
  j["f_cut"] = grid_json(c.f_cut);
  j["n_bar"] = grid_json(c.n_bar);
  j["gamma_l"] = grid_json(c.gamma_l);
  j["gamma_phi"] = grid_json(c.gamma_phi);
  j["gamma"] = grid_json(c.gamma);
  j["alpha"] = grid_json(c.alpha);
  j["zeta"] = grid_json(c.zeta);
  j["cutoff"] = c.cutoff;
  j["decoder_s"] = c.decoder_s;
  j["orthogonality_budget"] = c.orthogonality_budget;
  j["scale"] = c.scale;
  if (with_io) {
    j["csv"] = c.csv_path;
    j["manifest"] = c.manifest_path;
    j["surface"] = c.surface_path;
    j["workers"] = c.workers;
    j["with_timing"] = c.with_timing;
  }
  return j;
}

void apply_json(SweepConfig& c, const json& j) {
  if (!j.is_object()) throw InvalidArgument("config: top level must be a mapping");
  for (const auto& [key, v] : j.items()) {
    if (key == "preset") continue;
    if (key == "experiment") c.experiment = v.get<std::string>();
    else if (key == "engines" || key == "engine") {
      c.engines.clear();
      if (v.is_array())
        for (const auto& e : v) c.engines.push_back(parse_engine(e.get<std::string>()));
      else
        c.engines.push_back(parse_engine(v.get<std::string>()));
    } else if (key == "d") c.d = v.get<int>();
    else if (key == "m_i") c.m_i = v.get<int>();
    else if (key == "m_c") c.m_c = read_int_grid(v, key, true);
    else if (key == "m_f") c.m_f = read_int_grid(v, key, false);
    else if (key == "f_cut") c.f_cut = read_grid(v, key);
    else if (key == "n_bar") c.n_bar = read_grid(v, key);
    else if (key == "gamma_l") c.gamma_l = read_grid(v, key);
    else if (key == "gamma_phi") c.gamma_phi = read_grid(v, key);
    else if (key == "gamma") c.gamma = read_grid(v, key);
    else if (key == "alpha") c.alpha = read_grid(v, key);
    else if (key == "zeta") c.zeta = read_grid(v, key);
    else if (key == "cutoff") c.cutoff = v.get<int>();
    else if (key == "decoder_s") c.decoder_s = v.get<int>();
    else if (key == "orthogonality_budget") c.orthogonality_budget = v.get<double>();
    else if (key == "scale") c.scale = v.get<std::string>();
    else if (key == "csv") c.csv_path = v.get<std::string>();
    else if (key == "manifest") c.manifest_path = v.get<std::string>();
    else if (key == "surface") c.surface_path = v.get<std::string>();
    else if (key == "workers") c.workers = v.get<int>();
    else if (key == "with_timing") c.with_timing = v.get<bool>();
    else throw InvalidArgument("config: unknown key '" + key + "'");
  }
}

std::string opt_field(const std::optional<double>& v) { return v ? csv::format(*v) : std::string(); }

double discrete_infidelity_at(const ProtocolParams& p, double gl, double gp, double n_bar) {
  const auto rep = run_protocol(p, {gl, gp, std::max(n_bar, 1e-3)});
  return rep.infidelity_avg ? *rep.infidelity_avg : 1.0;
}

}  // namespace

std::string to_string(Engine e) {
  switch (e) {
    case Engine::discrete: return "discrete";
    case Engine::nocomm: return "nocomm";
    case Engine::cv: return "cv";
    case Engine::oracle: return "oracle";
  }
  return "?";
}

Engine parse_engine(const std::string& name) {
  if (name == "discrete") return Engine::discrete;
  if (name == "nocomm") return Engine::nocomm;
  if (name == "cv") return Engine::cv;
  if (name == "oracle") return Engine::oracle;
  throw InvalidArgument("unknown engine '" + name + "' (discrete|nocomm|cv|oracle)");
}

std::vector<double> logspace(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1) throw InvalidArgument("logspace: need 0 < lo <= hi, points >= 1");
  if (points == 1) return {lo};
  std::vector<double> out;
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < points; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (points - 1)));
  out.back() = hi;
  out.front() = lo;
  return out;
}

void SweepConfig::validate() const {
  static const std::vector<std::string> ids{"fig3", "fig4", "fig5", "fig7", "fig8", "custom"};
  if (std::find(ids.begin(), ids.end(), experiment) == ids.end())
    throw InvalidArgument("config: unknown experiment '" + experiment + "'");
  if (engines.empty()) throw InvalidArgument("config: engines must be nonempty");
  if (m_c.empty() || m_f.empty() || f_cut.empty() || n_bar.empty() || alpha.empty() || zeta.empty())
    throw InvalidArgument("config: every grid must be nonempty");
  if (gamma.empty() && (gamma_l.empty() || gamma_phi.empty()))
    throw InvalidArgument("config: give 'gamma' or both 'gamma_l' and 'gamma_phi'");
  if (scale != "desk" && scale != "paper") throw InvalidArgument("config: scale must be desk or paper");
  if (workers < 0) throw InvalidArgument("config: workers must be >= 0");
  const bool has_cv = std::find(engines.begin(), engines.end(), Engine::cv) != engines.end();
  if (experiment == "fig7" && (!has_cv || engines.size() != 1))
    throw InvalidArgument("config: fig7 runs the cv engine only");
  if (experiment != "fig7" && experiment != "custom" && has_cv)
    throw InvalidArgument("config: " + experiment + " is a discrete-model figure; cv is not available");
  for (double g : gamma) NoiseParams{g, g, 1.0}.validate();
  for (double g : gamma_l) NoiseParams{g, 0.0, 1.0}.validate();
  for (double g : gamma_phi) NoiseParams{0.0, g, 1.0}.validate();
  for (double n : n_bar) NoiseParams{0.0, 0.0, n}.validate();
  if (!surface_path.empty() && !gamma.empty())
    throw InvalidArgument("config: the m_c surface needs a gamma_l x gamma_phi grid");
  for (Engine e : engines) {
    if ((e == Engine::cv || e == Engine::oracle) && d > kCvMaxDimension)
      throw InvalidArgument("config: " + to_string(e) + " engine is limited to d <= 16");
    for (int mf : m_f)
      for (int mc : m_c)
        for (double fc : f_cut) {
          if (e == Engine::cv && mc == 0) throw InvalidArgument("config: cv engine needs an explicit m_c");
          ProtocolParams{d, m_i, mc == 0 ? mf : mc, mf, fc}.validate();
        }
  }
}

SweepConfig preset(const std::string& experiment, const std::string& scale) {
  SweepConfig c;
  c.experiment = experiment;
  c.scale = scale;
  const auto rates = logspace(1e-4, 1e-1, 13);
  if (experiment == "fig3") {
    c.d = c.m_i = 16;
    c.m_c = {2, 4, 8, 16};
    c.n_bar = {16.0};
    c.gamma_l = c.gamma_phi = rates;
  } else if (experiment == "fig4") {
    c.engines = {Engine::discrete, Engine::nocomm};
    c.d = c.m_i = 16;
    c.n_bar = {49.0};
    c.gamma = logspace(1e-4, 1e-1, 25);
  } else if (experiment == "fig5") {
    c.d = 32;
    c.m_i = 16;
    c.n_bar = {49.0};
    c.f_cut = {0.0, 0.9};
    c.gamma = logspace(1e-4, 1e-1, 25);
  } else if (experiment == "fig7") {
    c.engines = {Engine::cv};
    if (scale == "paper") {
      c.d = c.m_i = 16;
      c.m_c = {8};
      c.alpha = {7.0};
      c.zeta = {0.0, -0.8};
      c.orthogonality_budget = 1e-3;
    } else {
      c.d = c.m_i = 8;
      c.m_c = {4};
      c.alpha = {3.0};
      c.zeta = {0.0, -0.2};
    }
    c.gamma = logspace(1e-4, 1e-1, 7);
  } else if (experiment == "fig8") {
    c.d = c.m_i = 16;
    c.m_f = {2, 4};
    c.n_bar = {49.0};
    c.gamma = logspace(1e-4, 1e-1, 25);
  } else if (experiment == "custom") {
    c.gamma = {1e-2};
  } else {
    throw InvalidArgument("unknown preset '" + experiment + "'");
  }
  return c;
}

SweepConfig parse_sweep_config(const std::string& text, bool as_json) {
  json j;
  try {
    j = as_json ? json::parse(text) : yaml_to_json(YAML::Load(text));
  } catch (const std::exception& e) {
    throw InvalidArgument(std::string("config: parse error: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config: top level must be a mapping");
  SweepConfig c;
  try {
    if (j.contains("preset")) {
      const std::string scale = j.contains("scale") ? j.at("scale").get<std::string>() : "desk";
      c = preset(j.at("preset").get<std::string>(), scale);
    }
    apply_json(c, j);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const bool as_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  return parse_sweep_config(ss.str(), as_json);
}

std::size_t SweepResult::failures() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.ok; }));
}

std::vector<SweepPoint> expand_grid(const SweepConfig& c) {
  std::vector<std::pair<double, double>> rates;
  if (!c.gamma.empty()) {
    for (double g : c.gamma) rates.emplace_back(g, g);
  } else {
    for (double gl : c.gamma_l)
      for (double gp : c.gamma_phi) rates.emplace_back(gl, gp);
  }
  std::vector<SweepPoint> out;
  for (Engine e : c.engines) {
    const bool cv = e == Engine::cv;
    const std::vector<double> nbars = cv ? std::vector<double>{0.0} : c.n_bar;
    const std::vector<double> alphas = cv ? c.alpha : std::vector<double>{0.0};
    const std::vector<double> zetas = cv ? c.zeta : std::vector<double>{0.0};
    for (int mf : c.m_f)
      for (int mc : c.m_c)
        for (double fc : c.f_cut)
          for (double nb : nbars)
            for (double a : alphas)
              for (double z : zetas)
                for (const auto& [gl, gp] : rates) {
                  SweepPoint p;
                  p.engine = e;
                  p.params = {c.d, c.m_i, mc, mf, fc};
                  p.n_bar = nb;
                  p.gamma_l = gl;
                  p.gamma_phi = gp;
                  p.alpha = a;
                  p.zeta = z;
                  out.push_back(p);
                }
  }
  return out;
}

SweepRow evaluate_point(const SweepPoint& point, const SweepConfig& config) {
  SweepRow row;
  row.point = point;
  const auto start = std::chrono::steady_clock::now();
  try {
    ProtocolParams p = point.params;
    const bool optimise = p.m_c == 0;
    if (optimise) p.m_c = p.m_f;
    const NoiseParams noise{point.gamma_l, point.gamma_phi, point.n_bar};
    switch (point.engine) {
      case Engine::discrete: {
        const auto rep = optimise ? optimal_mc(p, noise) : OptimalMc{p.m_c, run_protocol(p, noise)};
        row.m_c_star = rep.m_c;
        row.f_avg = rep.report.f_avg;
        row.infidelity = rep.report.infidelity_avg;
        row.p_abort = rep.report.p_abort;
        row.l_max = rep.report.l_max;
        if (rep.report.all_aborted()) row.message = "all outcomes abort";
        break;
      }
      case Engine::nocomm: {
        const auto best = optimise ? optimize_strategy_and_mc(p, noise) : optimize_strategy(p, noise);
        row.m_c_star = best.m_c;
        row.f_avg = best.f_avg;
        row.infidelity = best.infidelity;
        row.strategy = best.strategy.describe();
        row.l_max = default_lmax(noise.gamma_l, noise.n_bar);
        break;
      }
      case Engine::oracle: {
        if (optimise) p.m_c = optimal_mc(p, noise).m_c;
        const auto loss = loss_probs(noise.gamma_l, noise.n_bar);
        const auto rep = simulate_protocol(p, dephasing_probs(noise.gamma_phi, p.d), loss);
        row.m_c_star = p.m_c;
        row.f_avg = rep.f_avg;
        if (rep.f_avg) row.infidelity = 1.0 - *rep.f_avg;
        row.p_abort = rep.p_abort;
        row.l_max = loss.l_max();
        if (!rep.f_avg) row.message = "all outcomes abort";
        break;
      }
      case Engine::cv: {
        CvRunConfig cv;
        cv.params = p;
        cv.primitive = point.zeta == 0.0
                           ? PrimitiveSpec{PrimitiveSpec::Kind::coherent, {point.alpha, 0.0}, {0.0, 0.0}}
                           : PrimitiveSpec{PrimitiveSpec::Kind::squeezed_coherent, {point.alpha, 0.0}, {point.zeta, 0.0}};
        cv.noise = {point.gamma_l, point.gamma_phi, 0.0};
        cv.cutoff = config.cutoff;
        cv.decoder_s = config.decoder_s;
        cv.orthogonality_budget = config.orthogonality_budget;
        cv.workers = 1;
        const auto rep = run_cv(cv);
        row.m_c_star = p.m_c;
        row.f_avg = rep.f_avg;
        row.infidelity = rep.infidelity_avg;
        row.p_abort = rep.p_abort;
        row.mean_n = rep.mean_n;
        row.delta_n = rep.delta_n;
        row.floor_bound = rep.floor_bound;
        row.deficit = rep.deficit;
        row.cutoff = rep.cutoff;
        row.decoder_s = rep.decoder_s;
        row.discrete_infidelity = discrete_infidelity_at(p, point.gamma_l, point.gamma_phi, rep.mean_n);
        row.band_lo = discrete_infidelity_at(p, point.gamma_l, point.gamma_phi, rep.mean_n - rep.delta_n);
        row.band_hi = discrete_infidelity_at(p, point.gamma_l, point.gamma_phi, rep.mean_n + rep.delta_n);
        if (rep.all_aborted()) row.message = "all outcomes abort";
        break;
      }
    }
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.message = e.what();
  }
  row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  SweepResult res;
  res.config = config;
  const auto points = expand_grid(config);
  res.rows.resize(points.size());
  parallel_for(points.size(), [&](std::size_t i) { res.rows[i] = evaluate_point(points[i], config); },
               config.workers);
  return res;
}

void write_csv(std::ostream& out, const SweepResult& result) {
  std::vector<std::string> header{"experiment", "engine",   "d",         "m_i",       "m_c",       "m_f",
                                  "f_cut",      "n_bar",    "gamma_l",   "gamma_phi", "alpha",     "zeta",
                                  "m_c_star",   "f_avg",    "infidelity", "p_abort",  "strategy",  "mean_n",
                                  "delta_n",    "floor_bound", "deficit", "discrete_infidelity", "band_lo",
                                  "band_hi",    "status",   "message"};
  if (result.config.with_timing) header.push_back("runtime_s");
  csv::write_row(out, header);
  for (const auto& r : result.rows) {
    const auto& pt = r.point;
    const bool cv = pt.engine == Engine::cv;
    std::string msg = r.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::vector<std::string> f{result.config.experiment,
                               to_string(pt.engine),
                               std::to_string(pt.params.d),
                               std::to_string(pt.params.m_i),
                               pt.params.m_c == 0 ? "opt" : std::to_string(pt.params.m_c),
                               std::to_string(pt.params.m_f),
                               csv::format(pt.params.f_cut),
                               cv ? std::string() : csv::format(pt.n_bar),
                               csv::format(pt.gamma_l),
                               csv::format(pt.gamma_phi),
                               cv ? csv::format(pt.alpha) : std::string(),
                               cv ? csv::format(pt.zeta) : std::string(),
                               r.ok ? std::to_string(r.m_c_star) : std::string(),
                               opt_field(r.f_avg),
                               opt_field(r.infidelity),
                               r.ok ? csv::format(r.p_abort) : std::string(),
                               r.strategy,
                               opt_field(r.mean_n),
                               opt_field(r.delta_n),
                               opt_field(r.floor_bound),
                               opt_field(r.deficit),
                               opt_field(r.discrete_infidelity),
                               opt_field(r.band_lo),
                               opt_field(r.band_hi),
                               r.ok ? "ok" : "error",
                               msg};
    if (result.config.with_timing) f.push_back(csv::format(r.runtime_s));
    csv::write_row(out, f);
  }
}

void write_manifest(std::ostream& out, const SweepResult& result) {
  json m;
  m["experiment"] = result.config.experiment;
  m["scale"] = result.config.scale;
  m["software_version"] = software_version();
  m["config_hash"] = config_hash(result.config);
  m["config"] = config_json(result.config, false);
  m["points"] = result.rows.size();
  m["failures"] = result.failures();
  m["csv"] = result.config.csv_path;
  json trunc = json::array();
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& r = result.rows[i];
    if (!r.ok) continue;
    json t{{"row", i}, {"l_max", r.l_max}};
    if (r.point.engine == Engine::cv) {
      t["cutoff"] = r.cutoff;
      t["decoder_s"] = r.decoder_s;
      t["deficit"] = r.deficit.value_or(0.0);
    }
    trunc.push_back(t);
  }
  m["truncation"] = trunc;
  json errors = json::array();
  for (std::size_t i = 0; i < result.rows.size(); ++i)
    if (!result.rows[i].ok) errors.push_back({{"row", i}, {"message", result.rows[i].message}});
  m["errors"] = errors;
  out << m.dump(2) << '\n';
}

void write_outputs(const SweepResult& result) {
  auto open = [](const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw EngineError("cannot write '" + path + "'");
    return f;
  };
  if (!result.config.csv_path.empty()) {
    auto f = open(result.config.csv_path);
    write_csv(f, result);
  }
  if (!result.config.manifest_path.empty()) {
    auto f = open(result.config.manifest_path);
    write_manifest(f, result);
  }
  if (!result.config.surface_path.empty()) {
    auto f = open(result.config.surface_path);
    write_surface_csv(f, optimal_mc_surface(result.config));
  }
}

std::vector<SurfacePoint> optimal_mc_surface(const SweepConfig& config) {
  if (config.gamma_l.empty() || config.gamma_phi.empty())
    throw InvalidArgument("optimal_mc_surface: needs gamma_l and gamma_phi grids");
  ProtocolParams p{config.d, config.m_i, config.m_f.front(), config.m_f.front(), config.f_cut.front()};
  p.validate();
  std::vector<SurfacePoint> out(config.gamma_l.size() * config.gamma_phi.size());
  parallel_for(
      out.size(),
      [&](std::size_t i) {
        const double gl = config.gamma_l[i / config.gamma_phi.size()];
        const double gp = config.gamma_phi[i % config.gamma_phi.size()];
        const auto best = optimal_mc(p, {gl, gp, config.n_bar.front()});
        out[i] = {gl, gp, best.m_c, best.report.f_avg, best.report.infidelity_avg};
      },
      config.workers);
  return out;
}

void write_surface_csv(std::ostream& out, const std::vector<SurfacePoint>& surface) {
  csv::write_row(out, {"gamma_l", "gamma_phi", "m_c_star", "f_avg", "infidelity"});
  for (const auto& s : surface)
    csv::write_row(out, {csv::format(s.gamma_l), csv::format(s.gamma_phi), std::to_string(s.m_c_star),
                         opt_field(s.f_avg), opt_field(s.infidelity)});
}

std::string config_hash(const SweepConfig& config) {
  const std::string text = config_json(config, false).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

std::string software_version() { return ROTOR_VERSION; }

}  // namespace rotor
