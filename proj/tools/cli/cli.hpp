#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ubm::cli {

enum class Subcommand { simulate, rates, moments, concentration, paths, biane, tail };

const char* to_string(Subcommand s) noexcept;

inline constexpr int kExitOk = 0;
inline constexpr int kExitBoundViolated = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

struct CliConfig {
  Subcommand subcommand = Subcommand::simulate;
  std::optional<std::string> config_path;
  /// Every option that was set, from the command line or the config file.
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string out_dir = "results";

  std::vector<int> n;
  std::vector<double> t;
  std::vector<double> t_grid;
  int steps = 0;
  int replicas = 200;
  std::uint64_t seed = 1;
  std::string integrator = "geodesic";
  std::string cost = "geodesic";
  int k_max = 4;
  int atoms = 2048;
  std::vector<double> x{0.05, 0.1, 0.2};
  double delta = 0.01;
  std::vector<double> r;
  std::optional<double> s;
  double s_ratio = 0.5;
  int grid_points = 100;
  int workers = 0;
  std::string check = "mean";    ///< simulate: mean | coupling
  std::string target = "average";  ///< rates: average | limit
  bool pool_bias = false;
  bool continuity = false;
  bool wall_time = false;

  /// --t-grid when given, otherwise --t.
  const std::vector<double>& times() const { return t_grid.empty() ? t : t_grid; }
};

struct ParseResult {
  std::optional<CliConfig> config;  ///< empty when the caller should exit
  int exit_code = kExitOk;
  std::string message;              ///< usage or error text
};

ParseResult parse_args(int argc, const char* const* argv);

/// Runs the experiment, writes <out>/<subcommand>.csv and .json, prints one
/// line per record to `out`. Returns 0, 1 or 3.
int run(const CliConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace ubm::cli
