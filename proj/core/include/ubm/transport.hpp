#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ubm/spectral.hpp"

namespace ubm {

enum class CostKind {
  geodesic,          ///< arc length
  chordal_exact,     ///< |e^{ia} - e^{ib}|, exact LP solve
  chordal_sandwich,  ///< chordal bracketed by [(2/pi) geodesic, geodesic]
};

const char* to_string(CostKind kind) noexcept;

struct TransportResult {
  double value = 0.0;
  CostKind cost_kind = CostKind::geodesic;
  double lower = 0.0;
  double upper = 0.0;
  double discretization_error = 0.0;
};

struct TransportOptions {
  /// Largest total atom count accepted by chordal_exact.
  std::size_t chordal_atom_cap = 512;
};

/// Shortest arc between two angles, in [0, pi].
double arc_distance(double a, double b);
/// 2 sin(arc / 2)
double chord_distance(double a, double b);

/// Exact geodesic W1 between atomic measures on the circle:
/// min_s int |F_mu - F_nu - s| d theta, with s a weighted median of the
/// staircase difference (lowest median on ties). O(m log m).
double w1_geodesic(const CircleMeasure& mu, const CircleMeasure& nu);

TransportResult w1_discrete(const CircleMeasure& mu, const CircleMeasure& nu, CostKind kind,
                            const TransportOptions& options = {});

/// Optimal plan of a balanced transportation problem.
struct TransportPlan {
  double cost = 0.0;
  std::vector<double> flow;  ///< row-major supply.size() x demand.size()
};

/// Minimum-cost transport from `supply` to `demand` (equal totals) with a
/// row-major cost matrix, by successive shortest augmenting paths with
/// Johnson potentials. Exact up to floating-point rounding.
TransportPlan min_cost_transport(std::span<const double> supply, std::span<const double> demand,
                                 std::span<const double> cost);

/// Quantile function of a probability measure on (-pi, pi], callable on [0, 1].
using QuantileFunction = std::function<double(double)>;

struct ContinuousTarget {
  std::string name;
  QuantileFunction quantile;
};

ContinuousTarget uniform_target();

struct Discretization {
  CircleMeasure measure;
  /// Upper bound on the geodesic W1 between the target and `measure`.
  double discretization_error = 0.0;
};

/// Atoms at q((j - 1/2) / m), weight 1/m each. The monotone coupling moves
/// the mass of cell j by at most its width, so W1 <= (1/m) sum_j width_j,
/// which is the reported error (never larger than the widest cell).
Discretization quantile_discretize(const QuantileFunction& q, int m);

inline constexpr int kMinContinuousAtoms = 64;

/// w1_discrete against the m-point discretization of `target`, with the
/// discretization error folded into the upper bound.
TransportResult w1_to_continuous(const CircleMeasure& mu, const ContinuousTarget& target, int m,
                                 CostKind kind, const TransportOptions& options = {});

}  // namespace ubm
