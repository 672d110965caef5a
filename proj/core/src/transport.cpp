#include "ubm/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "ubm/errors.hpp"

namespace ubm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

}  // namespace

const char* to_string(CostKind kind) noexcept {
  switch (kind) {
    case CostKind::geodesic: return "geodesic";
    case CostKind::chordal_exact: return "chordal_exact";
    case CostKind::chordal_sandwich: return "chordal_sandwich";
  }
  return "unknown";
}

double arc_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 2.0 * kPi);
  return std::min(d, 2.0 * kPi - d);
}

double chord_distance(double a, double b) { return 2.0 * std::sin(0.5 * arc_distance(a, b)); }

double w1_geodesic(const CircleMeasure& mu, const CircleMeasure& nu) {
  const auto ma = mu.atoms(), mw = mu.weights();
  const auto na = nu.atoms(), nw = nu.weights();

  // Sweep the merged breakpoints; after breakpoint p the staircase difference
  // F_mu - F_nu is constant until the next breakpoint.
  std::vector<double> level;
  std::vector<double> length;
  level.reserve(ma.size() + na.size());
  length.reserve(ma.size() + na.size());
  std::size_t i = 0, j = 0;
  double diff = 0.0;
  double first = 0.0;
  bool have_first = false;
  double prev = 0.0;
  while (i < ma.size() || j < na.size()) {
    double p;
    if (j == na.size() || (i < ma.size() && ma[i] <= na[j])) {
      p = ma[i];
    } else {
      p = na[j];
    }
    if (have_first) {
      level.push_back(diff);
      length.push_back(p - prev);
    } else {
      first = p;
      have_first = true;
    }
    while (i < ma.size() && ma[i] == p) diff += mw[i++];
    while (j < na.size() && na[j] == p) diff -= nw[j++];
    prev = p;
  }
  // Wrap-around arc from the last breakpoint back to the first: both CDFs are
  // complete there, so the difference is zero.
  level.push_back(0.0);
  length.push_back(2.0 * kPi - (prev - first));

  std::vector<std::size_t> order(level.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return level[a] < level[b]; });
  const double half = 0.5 * std::accumulate(length.begin(), length.end(), 0.0);
  double cumulative = 0.0;
  double median = level[order.back()];
  for (std::size_t k : order) {
    cumulative += length[k];
    if (cumulative >= half) {
      median = level[k];
      break;
    }
  }
  double total = 0.0;
  for (std::size_t k = 0; k < level.size(); ++k) total += length[k] * std::abs(level[k] - median);
  return total;
}

TransportPlan min_cost_transport(std::span<const double> supply, std::span<const double> demand,
                                 std::span<const double> cost) {
  const std::size_t m1 = supply.size(), m2 = demand.size();
  if (m1 == 0 || m2 == 0 || cost.size() != m1 * m2) {
    fail(ErrorCode::invalid_input, "transport problem dimensions do not match");
  }
  constexpr double kMassEps = 1e-15;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> rem_supply(supply.begin(), supply.end());
  std::vector<double> rem_demand(demand.begin(), demand.end());
  std::vector<double> flow(m1 * m2, 0.0);
  // Nodes 0..m1-1 are sources, m1..m1+m2-1 sinks.
  const std::size_t nodes = m1 + m2;
  std::vector<double> potential(nodes, 0.0), dist(nodes);
  std::vector<std::size_t> prev(nodes);
  std::vector<char> done(nodes);
  const std::size_t none = std::numeric_limits<std::size_t>::max();

  const std::size_t max_rounds = 4 * nodes * nodes + 16;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(prev.begin(), prev.end(), none);
    std::fill(done.begin(), done.end(), 0);
    bool any_source = false;
    for (std::size_t s = 0; s < m1; ++s) {
      if (rem_supply[s] > kMassEps) {
        dist[s] = 0.0;
        any_source = true;
      }
    }
    if (!any_source) break;

    std::size_t target = none;
    for (;;) {
      std::size_t u = none;
      double best = kInf;
      for (std::size_t v = 0; v < nodes; ++v) {
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      }
      if (u == none) break;
      done[u] = 1;
      if (u >= m1 && rem_demand[u - m1] > kMassEps) {
        target = u;
        break;
      }
      if (u < m1) {
        for (std::size_t c = 0; c < m2; ++c) {
          const std::size_t v = m1 + c;
          if (done[v]) continue;
          const double rc = std::max(0.0, cost[u * m2 + c] + potential[u] - potential[v]);
          if (dist[u] + rc < dist[v]) {
            dist[v] = dist[u] + rc;
            prev[v] = u;
          }
        }
      } else {
        const std::size_t c = u - m1;
        for (std::size_t r = 0; r < m1; ++r) {
          if (done[r] || flow[r * m2 + c] <= kMassEps) continue;
          const double rc = std::max(0.0, -cost[r * m2 + c] + potential[u] - potential[r]);
          if (dist[u] + rc < dist[r]) {
            dist[r] = dist[u] + rc;
            prev[r] = u;
          }
        }
      }
    }
    if (target == none) break;  // leftover supply is rounding dust

    const double reach = dist[target];
    for (std::size_t v = 0; v < nodes; ++v) potential[v] += std::min(dist[v], reach);

    // Bottleneck along the path target <- ... <- source.
    double push = rem_demand[target - m1];
    std::size_t v = target;
    while (prev[v] != none) {
      const std::size_t u = prev[v];
      if (u >= m1) push = std::min(push, flow[v * m2 + (u - m1)]);  // backward arc sink->source
      v = u;
    }
    push = std::min(push, rem_supply[v]);

    rem_demand[target - m1] -= push;
    rem_supply[v] -= push;
    v = target;
    while (prev[v] != none) {
      const std::size_t u = prev[v];
      if (u < m1) {
        flow[u * m2 + (v - m1)] += push;
      } else {
        double& f = flow[v * m2 + (u - m1)];
        f = std::max(0.0, f - push);
      }
      v = u;
    }
  }

  TransportPlan plan;
  plan.flow = std::move(flow);
  for (std::size_t k = 0; k < plan.flow.size(); ++k) plan.cost += plan.flow[k] * cost[k];
  return plan;
}

TransportResult w1_discrete(const CircleMeasure& mu, const CircleMeasure& nu, CostKind kind,
                            const TransportOptions& options) {
  TransportResult r;
  r.cost_kind = kind;
  switch (kind) {
    case CostKind::geodesic: {
      r.value = r.lower = r.upper = w1_geodesic(mu, nu);
      break;
    }
    case CostKind::chordal_sandwich: {
      const double g = w1_geodesic(mu, nu);
      r.value = g;
      r.upper = g;
      r.lower = kTwoOverPi * g;
      break;
    }
    case CostKind::chordal_exact: {
      const std::size_t total = mu.size() + nu.size();
      if (total > options.chordal_atom_cap) {
        fail(ErrorCode::cap_exceeded,
             "chordal_exact supports at most " + std::to_string(options.chordal_atom_cap) +
                 " atoms in total (got " + std::to_string(total) + "); use chordal_sandwich");
      }
      std::vector<double> cost(mu.size() * nu.size());
      for (std::size_t i = 0; i < mu.size(); ++i) {
        for (std::size_t j = 0; j < nu.size(); ++j) {
          cost[i * nu.size() + j] = chord_distance(mu.atoms()[i], nu.atoms()[j]);
        }
      }
      const TransportPlan plan = min_cost_transport(mu.weights(), nu.weights(), cost);
      r.value = r.lower = r.upper = plan.cost;
      break;
    }
  }
  return r;
}

ContinuousTarget uniform_target() {
  return {"uniform", [](double p) { return -kPi + 2.0 * kPi * p; }};
}

Discretization quantile_discretize(const QuantileFunction& q, int m) {
  if (m < 1) fail(ErrorCode::invalid_input, "atom count must be >= 1");
  // Edges q(j/m) and midpoints q((j - 1/2)/m), interleaved.
  std::vector<double> samples(2 * static_cast<std::size_t>(m) + 1);
  for (std::size_t j = 0; j < samples.size(); ++j) {
    samples[j] = q(static_cast<double>(j) / (2.0 * m));
    if (!std::isfinite(samples[j]) || samples[j] < -kPi - 1e-12 || samples[j] > kPi + 1e-12) {
      fail(ErrorCode::invalid_quantile, "quantile value outside [-pi, pi]");
    }
    if (j > 0 && samples[j] < samples[j - 1]) {
      fail(ErrorCode::invalid_quantile,
           "quantile function is not monotone near p = " + std::to_string(j / (2.0 * m)));
    }
  }
  std::vector<double> atoms(static_cast<std::size_t>(m));
  std::vector<double> weights(static_cast<std::size_t>(m), 1.0 / m);
  for (int j = 0; j < m; ++j) atoms[static_cast<std::size_t>(j)] = samples[2 * static_cast<std::size_t>(j) + 1];
  const double width_sum = samples.back() - samples.front();
  return {CircleMeasure::from_unsorted(std::move(atoms), std::move(weights)), width_sum / m};
}

TransportResult w1_to_continuous(const CircleMeasure& mu, const ContinuousTarget& target, int m,
                                 CostKind kind, const TransportOptions& options) {
  if (m < kMinContinuousAtoms) {
    fail(ErrorCode::invalid_input, "continuous targets need at least " +
                                       std::to_string(kMinContinuousAtoms) + " atoms");
  }
  const Discretization d = quantile_discretize(target.quantile, m);
  TransportResult r = w1_discrete(mu, d.measure, kind, options);
  r.discretization_error = d.discretization_error;
  r.upper += d.discretization_error;
  return r;
}

}  // namespace ubm
