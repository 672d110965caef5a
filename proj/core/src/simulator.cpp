#include "ubm/simulator.hpp"

#include <cmath>
#include <string>

#include "ubm/errors.hpp"
#include "ubm/lie_sampler.hpp"

namespace ubm {

namespace {

// Unchecked in-place update shared by every driver.
void advance(ComplexMatrix& u, double dt, RngStream& rng, Integrator integrator) {
  const int n = static_cast<int>(u.rows());
  const SkewMatrix x = gaussian_u(n, rng);
  const double root_dt = std::sqrt(dt);
  switch (integrator) {
    case Integrator::geodesic:
      u = u * expm_skew_hermitian(root_dt * x.matrix());
      break;
    case Integrator::euler_projected: {
      ComplexMatrix m = u * (root_dt * x.matrix());
      m += (1.0 - 0.5 * dt) * u;
      u = polar_unitary(m);
      break;
    }
  }
}

void advance_su(ComplexMatrix& v, double& phase, double dt, RngStream& rng) {
  const int n = static_cast<int>(v.rows());
  const SkewMatrix x = gaussian_su(n, rng);
  const double root_dt = std::sqrt(dt);
  v = v * expm_skew_hermitian(root_dt * x.matrix());
  phase += root_dt * rng.normal();
}

void validate_grid(const SimConfig& cfg, std::span<const double> grid) {
  if (grid.empty() || grid.front() != 0.0) {
    fail(ErrorCode::invalid_grid, "time grid must start at 0");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      fail(ErrorCode::invalid_grid, "time grid must be strictly increasing (index " +
                                        std::to_string(i) + ")");
    }
  }
  const double slack = 1e-12 * std::max(1.0, cfg.t_final);
  if (grid.back() > cfg.t_final + slack) {
    fail(ErrorCode::invalid_grid, "time grid extends past t_final");
  }
}

// Number of equal sub-steps covering `span` with none longer than `h`. The
// relative slack keeps lattice-aligned spans from picking up an extra step.
int substeps(double span, double h) {
  const double ratio = span / h;
  return std::max(1, static_cast<int>(std::ceil(ratio * (1.0 - 1e-12))));
}

}  // namespace

const char* to_string(Integrator integrator) noexcept {
  switch (integrator) {
    case Integrator::euler_projected: return "euler";
    case Integrator::geodesic: return "geodesic";
  }
  return "unknown";
}

int SimConfig::default_step_count(double t) {
  return std::max(100, static_cast<int>(std::ceil(100.0 * t)));
}

SimConfig SimConfig::with_defaults(int n, double t, int replicas, std::uint64_t seed) {
  SimConfig cfg;
  cfg.n = n;
  cfg.t_final = t;
  cfg.step_count = default_step_count(t);
  cfg.replicas = replicas;
  cfg.master_seed = seed;
  return cfg;
}

void SimConfig::validate() const {
  if (n < 1) fail(ErrorCode::invalid_dimension, "n must be >= 1");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
    fail(ErrorCode::invalid_input, "t_final must be finite and >= 0");
  }
  if (step_count < 1) fail(ErrorCode::invalid_input, "step_count must be >= 1");
  if (replicas < 1) fail(ErrorCode::invalid_input, "replicas must be >= 1");
}

UnitaryMatrix CoupledPath::compose(std::size_t index) const {
  const auto& v = su_states.at(index);
  const std::complex<double> z = std::polar(1.0, phase_walk.at(index) / v.dim());
  return UnitaryMatrix::assume_unitary(z * v.matrix());
}

UnitaryMatrix step(const UnitaryMatrix& u, double dt, RngStream& rng, Integrator integrator,
                   double tol) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) fail(ErrorCode::invalid_input, "dt must be >= 0");
  const double defect = u.unitarity_defect();
  if (!(defect <= tol)) {
    fail(ErrorCode::contract_violation,
         "step input is not unitary: max|U*U - I| = " + std::to_string(defect));
  }
  if (dt == 0.0) return u;
  ComplexMatrix next = u.matrix();
  advance(next, dt, rng, integrator);
  return UnitaryMatrix::assume_unitary(std::move(next));
}

UnitaryMatrix sample_endpoint(const SimConfig& cfg, std::uint64_t stream_id) {
  cfg.validate();
  ComplexMatrix u = ComplexMatrix::Identity(cfg.n, cfg.n);
  if (cfg.t_final > 0.0) {
    RngStream rng = derive_stream(cfg.master_seed, stream_id);
    const double dt = cfg.max_step();
    for (int i = 0; i < cfg.step_count; ++i) advance(u, dt, rng, cfg.integrator);
  }
  return UnitaryMatrix::assume_unitary(std::move(u));
}

PathSample sample_path(const SimConfig& cfg, std::span<const double> grid, std::uint64_t stream_id) {
  cfg.validate();
  validate_grid(cfg, grid);
  PathSample path;
  path.grid.assign(grid.begin(), grid.end());
  path.states.reserve(grid.size());

  ComplexMatrix u = ComplexMatrix::Identity(cfg.n, cfg.n);
  path.states.push_back(UnitaryMatrix::assume_unitary(u));
  RngStream rng = derive_stream(cfg.master_seed, stream_id);
  const double h = cfg.max_step();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double span = grid[i] - grid[i - 1];
    const int count = substeps(span, h);
    const double dt = span / count;
    for (int s = 0; s < count; ++s) advance(u, dt, rng, cfg.integrator);
    path.states.push_back(UnitaryMatrix::assume_unitary(u));
  }
  return path;
}

CoupledPath sample_coupled_path(const SimConfig& cfg, std::span<const double> grid,
                                std::uint64_t stream_id) {
  cfg.validate();
  validate_grid(cfg, grid);
  CoupledPath path;
  path.grid.assign(grid.begin(), grid.end());

  ComplexMatrix v = ComplexMatrix::Identity(cfg.n, cfg.n);
  double phase = 0.0;
  path.su_states.push_back(UnitaryMatrix::assume_unitary(v));
  path.phase_walk.push_back(phase);
  RngStream rng = derive_stream(cfg.master_seed, stream_id);
  const double h = cfg.max_step();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double span = grid[i] - grid[i - 1];
    const int count = substeps(span, h);
    const double dt = span / count;
    for (int s = 0; s < count; ++s) advance_su(v, phase, dt, rng);
    path.su_states.push_back(UnitaryMatrix::assume_unitary(v));
    path.phase_walk.push_back(phase);
  }
  return path;
}

UnitaryMatrix sample_endpoint_coupled(const SimConfig& cfg, std::uint64_t stream_id) {
  cfg.validate();
  if (cfg.t_final == 0.0) return UnitaryMatrix::identity(cfg.n);
  const double grid[] = {0.0, cfg.t_final};
  const CoupledPath path = sample_coupled_path(cfg, grid, stream_id);
  return path.compose(1);
}

}  // namespace ubm
