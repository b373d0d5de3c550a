#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rotor/params.hpp"

namespace rotor {

enum class Engine { discrete, nocomm, cv, oracle };

std::string to_string(Engine e);
Engine parse_engine(const std::string& name);

/// Grid and engine selection for one experiment. A rate grid is either the
/// Cartesian product gamma_l x gamma_phi or, when `gamma` is nonempty, the
/// diagonal gamma_l = gamma_phi = gamma. m_c = 0 means "optimise".
struct SweepConfig {
  std::string experiment = "custom";
  std::vector<Engine> engines{Engine::discrete};
  int d = 16;
  int m_i = 16;
  std::vector<int> m_c{0};
  std::vector<int> m_f{2};
  std::vector<double> f_cut{0.0};
  std::vector<double> n_bar{16.0};
  std::vector<double> gamma_l;
  std::vector<double> gamma_phi;
  std::vector<double> gamma;
  // CV primitive and truncation.
  std::vector<double> alpha{3.0};
  std::vector<double> zeta{0.0};
  int cutoff = 0;
  int decoder_s = 0;
  double orthogonality_budget = 1e-2;
  std::string scale = "desk";
  // Output.
  std::string csv_path;
  std::string manifest_path;
  std::string surface_path;  // optimal-m_c surface CSV, rate-product grids only
  int workers = 0;
  bool with_timing = false;

  /// Throws InvalidArgument on empty grids, bad values or engine/figure mismatch.
  void validate() const;
};

/// fig3 | fig4 | fig5 | fig7 | fig8 | custom. fig7 defaults to desk scale;
/// "paper" selects alpha = 7, d = 16.
SweepConfig preset(const std::string& experiment, const std::string& scale = "desk");

/// Reads YAML (.yaml/.yml) or JSON (.json). A `preset` key seeds the config that
/// the remaining keys override.
SweepConfig load_sweep_config(const std::string& path);
SweepConfig parse_sweep_config(const std::string& text, bool json);

/// Number of log-spaced points from lo to hi inclusive.
std::vector<double> logspace(double lo, double hi, int points);

struct SweepPoint {
  Engine engine = Engine::discrete;
  ProtocolParams params;
  double n_bar = 0.0;
  double gamma_l = 0.0;
  double gamma_phi = 0.0;
  double alpha = 0.0;
  double zeta = 0.0;
};

struct SweepRow {
  SweepPoint point;
  bool ok = false;
  std::string message;
  int m_c_star = 0;
  std::optional<double> f_avg;
  std::optional<double> infidelity;
  double p_abort = 0.0;
  std::string strategy;  // nocomm only
  // cv only
  std::optional<double> mean_n, delta_n, floor_bound, deficit;
  std::optional<double> discrete_infidelity, band_lo, band_hi;
  int l_max = 0;
  int cutoff = 0;
  int decoder_s = 0;
  double runtime_s = 0.0;
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRow> rows;
  std::size_t failures() const;
};

/// Grid points in fixed order: engine, m_f, m_c, f_cut, n_bar, alpha, zeta, rates.
std::vector<SweepPoint> expand_grid(const SweepConfig& config);

SweepRow evaluate_point(const SweepPoint& point, const SweepConfig& config);

/// Evaluates every point on the worker pool; a failing point is flagged in its
/// row and the sweep continues.
SweepResult run_sweep(const SweepConfig& config);

void write_csv(std::ostream& out, const SweepResult& result);
void write_manifest(std::ostream& out, const SweepResult& result);

/// Writes the CSV and manifest to the configured paths (when set).
void write_outputs(const SweepResult& result);

struct SurfacePoint {
  double gamma_l = 0.0;
  double gamma_phi = 0.0;
  int m_c_star = 0;
  std::optional<double> f_avg;
  std::optional<double> infidelity;
};

/// Discrete optimal m_c over the gamma_l x gamma_phi grid (first m_f, f_cut, n_bar).
std::vector<SurfacePoint> optimal_mc_surface(const SweepConfig& config);
void write_surface_csv(std::ostream& out, const std::vector<SurfacePoint>& surface);

/// 64-bit FNV-1a of the canonical JSON form of the config.
std::string config_hash(const SweepConfig& config);
std::string software_version();

}  // namespace rotor
