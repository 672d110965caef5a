#include "ubm/results_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ubm/errors.hpp"
#include "ubm/version.hpp"

namespace ubm {

namespace {

std::string real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Quotes a CSV field when it contains a separator or quote.
std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// JSON has no infinity; non-finite values become strings.
nlohmann::json json_real(double x) {
  if (std::isfinite(x)) return x;
  return real(x);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::invalid_input, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) fail(ErrorCode::invalid_input, "failed writing " + path.string());
}

}  // namespace

std::string csv_line(const ExperimentRecord& r, const CsvOptions& options) {
  std::string line = field(r.experiment);
  line += ',' + std::to_string(r.n);
  line += ',' + real(r.t);
  line += ',' + std::to_string(r.replicas);
  line += ',' + real(r.estimate);
  line += ',' + real(r.std_error);
  line += ',' + real(r.paper_bound);
  line += r.bound_satisfied ? ",true" : ",false";
  line += ',' + std::to_string(r.seed);
  line += ',' + real(options.include_wall_time ? r.wall_time : 0.0);
  return line;
}

std::string format_csv(std::span<const ExperimentRecord> records, const CsvOptions& options) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : records) out += csv_line(r, options) + '\n';
  return out;
}

std::string format_sidecar(const RunManifest& m, const ExperimentReport& report) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["subcommand"] = m.subcommand;
  j["config"] = {
      {"n_values", m.n_values},
      {"t_values", m.t_values},
      {"step_count", m.step_count},
      {"integrator", m.integrator},
      {"replicas", m.replicas},
      {"master_seed", m.seed},
      {"cost_kind", m.cost_kind},
      {"k_max", m.k_max},
      {"m_atoms", m.m_atoms},
      {"workers", m.workers},
  };
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : m.parameters) params[k] = json_real(v);
  j["config"]["parameters"] = params;
  j["config"]["grids"] = m.grids;

  j["notes"] = report.notes;
  nlohmann::json diag = nlohmann::json::object();
  for (const auto& [k, v] : report.diagnostics) diag[k] = json_real(v);
  j["diagnostics"] = diag;

  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.records) {
    rows.push_back({{"experiment", r.experiment},
                    {"n", r.n},
                    {"t", r.t},
                    {"estimate", json_real(r.estimate)},
                    {"paper_bound", json_real(r.paper_bound)},
                    {"bound_satisfied", r.bound_satisfied},
                    {"wall_time_s", r.wall_time}});
  }
  j["records"] = rows;
  j["all_bounds_satisfied"] = report.all_satisfied();
  return j.dump(2) + "\n";
}

std::filesystem::path write_results(const std::filesystem::path& out_dir, const std::string& stem,
                                    const RunManifest& manifest, const ExperimentReport& report,
                                    const CsvOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::invalid_input, "cannot create " + out_dir.string() + ": " + ec.message());
  const auto csv = out_dir / (stem + ".csv");
  write_file(csv, format_csv(report.records, options));
  write_file(out_dir / (stem + ".json"), format_sidecar(manifest, report));
  return csv;
}

}  // namespace ubm
