#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ubm/rng.hpp"
#include "ubm/unitary.hpp"

namespace ubm {

enum class Integrator {
  euler_projected,  ///< U (I + sqrt(dt) X - dt/2 I), then polar projection
  geodesic,         ///< U exp(sqrt(dt) X)
};

const char* to_string(Integrator integrator) noexcept;

struct SimConfig {
  int n = 1;
  double t_final = 0.0;
  int step_count = 100;
  Integrator integrator = Integrator::geodesic;
  int replicas = 1;
  std::uint64_t master_seed = 0;

  /// max(100, ceil(100 t)), which keeps dt <= 0.01.
  static int default_step_count(double t);
  static SimConfig with_defaults(int n, double t, int replicas, std::uint64_t seed);

  double max_step() const { return t_final / step_count; }
  void validate() const;
};

struct PathSample {
  std::vector<double> grid;
  std::vector<UnitaryMatrix> states;
};

/// The circle x SU(n) construction: U_t = exp(i b0_t / n) V_t.
struct CoupledPath {
  std::vector<double> grid;
  std::vector<double> phase_walk;        ///< b0 at each grid time
  std::vector<UnitaryMatrix> su_states;  ///< V at each grid time
  UnitaryMatrix compose(std::size_t index) const;
};

/// One Euler-Maruyama-type update of dU = U dW - U dt / 2. dt == 0 returns U
/// unchanged without consuming randomness. Rejects U whose unitarity defect
/// exceeds `tol` with a contract-violation error.
UnitaryMatrix step(const UnitaryMatrix& u, double dt, RngStream& rng, Integrator integrator,
                   double tol = kDefaultUnitarityTol);

/// U_{t_final} from step_count uniform steps; stream (cfg.master_seed, stream_id).
UnitaryMatrix sample_endpoint(const SimConfig& cfg, std::uint64_t stream_id);

/// A single path observed at `grid` (increasing, starting at 0, ending at or
/// before t_final). Every interval is split into equal sub-steps no longer
/// than t_final / step_count; grids lying on that lattice reuse the same
/// draws, so refining such a grid observes the same path.
PathSample sample_path(const SimConfig& cfg, std::span<const double> grid, std::uint64_t stream_id);

/// U_{t_final} built as exp(i b0 / n) V with b0 a scalar Gaussian walk and V
/// driven by gaussian_su through the geodesic integrator.
UnitaryMatrix sample_endpoint_coupled(const SimConfig& cfg, std::uint64_t stream_id);

CoupledPath sample_coupled_path(const SimConfig& cfg, std::span<const double> grid,
                                std::uint64_t stream_id);

}  // namespace ubm
