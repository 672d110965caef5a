#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ubm/harness.hpp"

namespace ubm {

inline constexpr const char* kCsvHeader =
    "experiment,n,t,replicas,estimate,std_error,paper_bound,bound_satisfied,seed,wall_time_s";

struct CsvOptions {
  /// Off by default: timings vary between runs and would break byte-identical
  /// reruns. The sidecar always carries them.
  bool include_wall_time = false;
};

/// One CSV line (no trailing newline); reals use %.17g.
std::string csv_line(const ExperimentRecord& record, const CsvOptions& options = {});
std::string format_csv(std::span<const ExperimentRecord> records, const CsvOptions& options = {});

/// Everything needed to reproduce a run.
struct RunManifest {
  std::string subcommand;
  std::vector<int> n_values;
  std::vector<double> t_values;
  int step_count = 0;  ///< 0: per-t default
  std::string integrator;
  int replicas = 0;
  std::uint64_t seed = 0;
  std::string cost_kind;
  int k_max = 0;
  int m_atoms = 0;
  int workers = 0;
  std::map<std::string, double> parameters;
  std::map<std::string, std::vector<double>> grids;
};

/// JSON sidecar: manifest, library version, notes, diagnostics, and per-record
/// wall times.
std::string format_sidecar(const RunManifest& manifest, const ExperimentReport& report);

/// Writes <stem>.csv and <stem>.json under `out_dir`, creating it if needed.
/// Returns the CSV path.
std::filesystem::path write_results(const std::filesystem::path& out_dir, const std::string& stem,
                                    const RunManifest& manifest, const ExperimentReport& report,
                                    const CsvOptions& options = {});

}  // namespace ubm
