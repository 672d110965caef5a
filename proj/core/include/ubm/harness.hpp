#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ubm/simulator.hpp"
#include "ubm/spectral.hpp"
#include "ubm/transport.hpp"

namespace ubm {

/// One row of a result table. For upper-bound rows, bound_satisfied is
/// estimate <= paper_bound + 3 std_error; rows that carry no bound use an
/// infinite paper_bound.
struct ExperimentRecord {
  std::string experiment;
  int n = 0;
  double t = 0.0;
  int replicas = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double paper_bound = std::numeric_limits<double>::infinity();
  bool bound_satisfied = true;
  std::uint64_t seed = 0;
  double wall_time = 0.0;
};

inline bool upper_bound_holds(double estimate, double bound, double std_error) {
  return estimate <= bound + 3.0 * std_error;
}

struct ExperimentReport {
  std::vector<ExperimentRecord> records;
  /// Named scalars that do not fit the row format: fitted constants, slopes,
  /// discretization errors.
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;

  bool all_satisfied() const;
  void append(ExperimentReport other);
  const ExperimentRecord* find(const std::string& experiment, int n, double t) const;
};

struct PowerLawFit {
  std::vector<std::pair<double, double>> points;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of log y on log x. Needs >= 3 points with
/// positive coordinates (domain error otherwise).
PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points);

/// Shared knobs for the Monte Carlo experiments.
struct HarnessConfig {
  std::vector<int> n_values;
  std::vector<double> t_values;
  int replicas = 200;
  std::uint64_t seed = 1;
  Integrator integrator = Integrator::geodesic;
  int step_count = 0;  ///< 0: SimConfig::default_step_count(t)
  int workers = 0;     ///< 0: hardware concurrency

  SimConfig sim_config(int n, double t) const;
};

/// Stream id of replica `replica` in grid cell `cell`.
inline std::uint64_t replica_stream(std::uint64_t cell, std::uint64_t replica) {
  return (cell << 32) | replica;
}

/// Sample mean and standard error of the mean.
std::pair<double, double> mean_and_se(std::span<const double> values);

/// Endpoint spectra of `cfg.replicas` independent replicas in grid cell `cell`.
std::vector<AngleSample> sample_spectra(const SimConfig& cfg, std::uint64_t cell, int workers,
                                        bool coupled = false);

/// Per-replica geodesic W1(mu_i, pooled) where pooled mixes all replicas.
std::vector<double> distances_to_pooled(std::span<const AngleSample> spectra, int workers = 1);

// Threshold on the fitted log-log slope of E W1(mu, mu-bar) against N.
inline constexpr double kAvgToAvgSlopeThreshold = -0.6;

struct AvgToAvgOptions {
  /// Recompute each cell with twice the replicas and record the shift.
  bool pool_bias_check = false;
};

/// E W1(mu_t, mu-bar_t) against c (t / N^2)^{1/3}, with c the smallest
/// constant that fits every cell, and log-log slopes across N at fixed t.
ExperimentReport run_rate_avg_to_avg(const HarnessConfig& cfg, const AvgToAvgOptions& options = {});

/// |(1/N) E tr U_t^k - int z^k dnu_t| against t^2 k^4 / N^2, k = 1..k_max.
ExperimentReport run_moment_convergence(const HarnessConfig& cfg, int k_max);

/// W1(pooled, nu_t) against C t^{2/5} log N / N^{2/5}; for t >= 8 also the
/// route through the uniform measure.
ExperimentReport run_avg_to_limit(const HarnessConfig& cfg, int m_atoms);

/// Exceedance frequency of W1(mu, mu-bar) > E W1 + x against 2 exp(-N^2 x^2 / t).
ExperimentReport run_concentration_tail(const HarnessConfig& cfg, std::span<const double> x_grid);

/// sup over a time grid on [0, T] of W1(mu_t, nu_t) per path. Grid times
/// below 0.5 are compared with nu_{0.5} and reported separately.
ExperimentReport run_path_sup(const HarnessConfig& cfg, double horizon, int grid_points,
                              int m_atoms = 512);

/// How s relates to r in the Brownian tail bound.
struct TailScale {
  bool relative = true;  ///< s = value * r when true, s = value otherwise
  double value = 0.5;
  double at(double r) const { return relative ? value * r : value; }
};

/// P(sup_{t < delta} d_g(U_t, I) >= r + 2s) against
/// 16 (1 + r/s)^{N^2} exp(-r^2 / (2 delta)).
ExperimentReport run_bm_tail(const HarnessConfig& cfg, double delta, std::span<const double> r_grid,
                             TailScale s = {});

/// |mean Re (1/N) tr U_t - e^{-t/2}| against the 0.01 t step-bias allowance.
/// Replicas share one path per cell observed at every t.
ExperimentReport run_mean_trace(const HarnessConfig& cfg);

/// Two-sample comparison of Re (1/N) tr U_t^k between the direct and the
/// circle x SU(N) simulators, k = 1..k_max.
ExperimentReport run_coupling_check(const HarnessConfig& cfg, int k_max);

/// W1(nu_t, uniform) for each t against C t^{3/2} e^{-t/4}, plus the
/// consecutive-ratio decay rows.
ExperimentReport run_biane_decay(std::span<const double> t_values, int m_atoms);

/// W1(nu_t, nu_s) over all pairs against c sqrt(t - s), c fitted.
ExperimentReport run_free_continuity(std::span<const double> t_values, int m_atoms);

}  // namespace ubm
