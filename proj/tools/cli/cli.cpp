#include "cli.hpp"

#include <cstdio>
#include <exception>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "ubm/errors.hpp"
#include "ubm/free_ubm.hpp"
#include "ubm/harness.hpp"
#include "ubm/results_io.hpp"

namespace ubm::cli {

namespace {

const std::map<std::string, std::string> kDescriptions{
    {"simulate", "exact-mean check of (1/N) tr U_t, or --check coupling"},
    {"rates", "E W1(mu, pooled average) against N, or --target limit"},
    {"moments", "trace moments against the limit moments"},
    {"concentration", "tail of W1(mu, pooled average) about its mean"},
    {"paths", "sup over [0, T] of W1(mu_t, nu_t) along paths"},
    {"biane", "W1(nu_t, uniform) decay, optionally --continuity"},
    {"tail", "sup of the distance to the identity over [0, delta]"},
};

const std::map<std::string, Subcommand> kSubcommands{
    {"simulate", Subcommand::simulate}, {"rates", Subcommand::rates},
    {"moments", Subcommand::moments},   {"concentration", Subcommand::concentration},
    {"paths", Subcommand::paths},       {"biane", Subcommand::biane},
    {"tail", Subcommand::tail},
};

// Flags each subcommand cannot run without.
std::vector<std::string> required_flags(Subcommand s) {
  switch (s) {
    case Subcommand::simulate:
    case Subcommand::rates:
    case Subcommand::moments:
    case Subcommand::concentration:
    case Subcommand::paths: return {"--n", "--t"};
    case Subcommand::biane: return {"--t"};
    case Subcommand::tail: return {"--n", "--r"};
  }
  return {};
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string summary_line(const ExperimentRecord& r) {
  std::ostringstream os;
  os << (r.bound_satisfied ? "ok   " : "FAIL ") << r.experiment << " n=" << r.n
     << " t=" << format_real(r.t) << " estimate=" << format_real(r.estimate)
     << " se=" << format_real(r.std_error) << " bound=" << format_real(r.paper_bound);
  return os.str();
}

}  // namespace

const char* to_string(Subcommand s) noexcept {
  for (const auto& [name, value] : kSubcommands) {
    if (value == s) return name.c_str();
  }
  return "unknown";
}

ParseResult parse_args(int argc, const char* const* argv) {
  CliConfig cfg;
  CLI::App app{"Monte Carlo lab for unitary Brownian motion spectra", "ubmlab"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value file; flags override its values");
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("--n", cfg.n, "matrix dimensions, comma separated")->delimiter(',')->check(CLI::PositiveNumber);
  app.add_option("--t", cfg.t, "times (horizon T for paths), comma separated")->delimiter(',');
  app.add_option("--t-grid", cfg.t_grid, "time grid, replaces --t when given")->delimiter(',');
  app.add_option("--steps", cfg.steps, "steps per path (0: max(100, ceil(100 t)))")->check(CLI::NonNegativeNumber);
  app.add_option("--replicas", cfg.replicas, "independent replicas per cell")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--integrator", cfg.integrator)->check(CLI::IsMember({"euler", "geodesic"}));
  app.add_option("--cost", cfg.cost)->check(CLI::IsMember({"geodesic", "chordal"}));
  app.add_option("--k-max", cfg.k_max, "highest moment order")->check(CLI::PositiveNumber);
  app.add_option("--atoms", cfg.atoms, "atoms in continuous-target discretizations")->check(CLI::Range(kMinContinuousAtoms, 1 << 22));
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--x", cfg.x, "concentration deviations")->delimiter(',');
  app.add_option("--delta", cfg.delta, "time window for the Brownian tail");
  app.add_option("--r", cfg.r, "tail radii")->delimiter(',');
  app.add_option("--s", cfg.s, "absolute tail slack s (default: s-ratio * r)");
  app.add_option("--s-ratio", cfg.s_ratio, "s as a multiple of r");
  app.add_option("--grid-points", cfg.grid_points, "path observation times")->check(CLI::Range(2, 1 << 20));
  app.add_option("--workers", cfg.workers, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--check", cfg.check, "simulate: exact mean or coupling comparison")->check(CLI::IsMember({"mean", "coupling"}));
  app.add_option("--target", cfg.target, "rates: distance to the average or to the limit")->check(CLI::IsMember({"average", "limit"}));
  app.add_flag("--pool-bias", cfg.pool_bias, "rates: repeat each cell with twice the replicas");
  app.add_flag("--continuity", cfg.continuity, "biane: also compare the limit measures pairwise");
  app.add_flag("--wall-time", cfg.wall_time, "write measured wall times into the CSV");

  for (const auto& [name, value] : kSubcommands) {
    app.add_subcommand(name, kDescriptions.at(name))->fallthrough();
  }

  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
  ParseResult result;
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out, err;
    const int code = app.exit(e, out, err);
    result.message = out.str() + err.str();
    result.exit_code = code == 0 ? kExitOk : kExitUsage;
    if (code != 0 && result.message.find("Usage") == std::string::npos) {
      result.message += app.help();
    }
    return result;
  }

  const auto* chosen = app.get_subcommands().front();
  cfg.subcommand = kSubcommands.at(chosen->get_name());
  if (auto* opt = app.get_config_ptr(); opt != nullptr && opt->count() > 0) {
    cfg.config_path = opt->as<std::string>();
  }

  std::vector<std::string> missing;
  for (const auto& flag : required_flags(cfg.subcommand)) {
    if (flag == "--t" && !cfg.times().empty()) continue;
    if (app.get_option(flag)->count() == 0) missing.push_back(flag);
  }
  if (!missing.empty()) {
    std::string text = "error: " + chosen->get_name() + " requires";
    for (const auto& m : missing) text += " " + m;
    result.message = text + "\n" + app.help();
    result.exit_code = kExitUsage;
    return result;
  }

  for (const auto* opt : app.get_options()) {
    if (opt->count() == 0 || opt->get_name().empty() || opt->get_name() == "--help") continue;
    std::string joined;
    for (const auto& v : opt->results()) joined += (joined.empty() ? "" : ",") + v;
    cfg.overrides.emplace_back(opt->get_name(), joined);
  }
  result.config = std::move(cfg);
  return result;
}

int run(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    HarnessConfig hc;
    hc.n_values = cfg.n;
    hc.t_values = cfg.times();
    hc.replicas = cfg.replicas;
    hc.seed = cfg.seed;
    hc.integrator = cfg.integrator == "euler" ? Integrator::euler_projected : Integrator::geodesic;
    hc.step_count = cfg.steps;
    hc.workers = cfg.workers;

    RunManifest manifest;
    manifest.subcommand = to_string(cfg.subcommand);
    manifest.n_values = hc.n_values;
    manifest.t_values = hc.t_values;
    manifest.step_count = hc.step_count;
    manifest.integrator = to_string(hc.integrator);
    manifest.replicas = hc.replicas;
    manifest.seed = hc.seed;
    manifest.cost_kind = cfg.cost == "chordal" ? to_string(CostKind::chordal_sandwich)
                                               : to_string(CostKind::geodesic);
    manifest.k_max = cfg.k_max;
    manifest.m_atoms = cfg.atoms;
    manifest.workers = cfg.workers;

    ExperimentReport report;
    switch (cfg.subcommand) {
      case Subcommand::simulate:
        report = cfg.check == "coupling" ? run_coupling_check(hc, cfg.k_max) : run_mean_trace(hc);
        break;
      case Subcommand::rates:
        if (cfg.target == "limit") {
          report = run_avg_to_limit(hc, cfg.atoms);
        } else {
          report = run_rate_avg_to_avg(hc, AvgToAvgOptions{cfg.pool_bias});
        }
        break;
      case Subcommand::moments:
        report = run_moment_convergence(hc, cfg.k_max);
        break;
      case Subcommand::concentration:
        report = run_concentration_tail(hc, cfg.x);
        manifest.grids["x"] = cfg.x;
        break;
      case Subcommand::paths:
        for (double horizon : hc.t_values) {
          report.append(run_path_sup(hc, horizon, cfg.grid_points, cfg.atoms));
        }
        manifest.parameters["grid_points"] = cfg.grid_points;
        break;
      case Subcommand::biane:
        report = run_biane_decay(hc.t_values, cfg.atoms);
        if (cfg.continuity) report.append(run_free_continuity(hc.t_values, cfg.atoms));
        break;
      case Subcommand::tail: {
        TailScale scale;
        scale.relative = !cfg.s.has_value();
        scale.value = cfg.s.value_or(cfg.s_ratio);
        report = run_bm_tail(hc, cfg.delta, cfg.r, scale);
        manifest.parameters["delta"] = cfg.delta;
        manifest.parameters[scale.relative ? "s_ratio" : "s"] = scale.value;
        manifest.grids["r"] = cfg.r;
        break;
      }
    }
    if (cfg.cost == "chordal") {
      report.notes.push_back("cost chordal: reported values are geodesic W1, the upper end of the "
                             "chordal sandwich [(2/pi) v, v]");
    }

    const auto csv = write_results(cfg.out_dir, manifest.subcommand, manifest, report,
                                   CsvOptions{cfg.wall_time});
    for (const auto& r : report.records) out << summary_line(r) << '\n';
    for (const auto& note : report.notes) out << "note: " << note << '\n';
    out << "wrote " << csv.string() << '\n';
    return report.all_satisfied() ? kExitOk : kExitBoundViolated;
  } catch (const Error& e) {
    err << "error [" << ubm::to_string(e.code()) << "]: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitRuntime;
}

}  // namespace ubm::cli
