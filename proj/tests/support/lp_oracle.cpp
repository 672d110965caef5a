#include "lp_oracle.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace ubm::testing {

namespace {

constexpr double kEps = 1e-12;

struct Tableau {
  std::vector<std::vector<double>> t;  // rows x (cols + 1), last column is rhs
  std::vector<std::size_t> basis;

  void pivot(std::size_t r, std::size_t c) {
    const double p = t[r][c];
    for (double& v : t[r]) v /= p;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i == r || t[i][c] == 0.0) continue;
      const double f = t[i][c];
      for (std::size_t j = 0; j < t[i].size(); ++j) t[i][j] -= f * t[r][j];
    }
    basis[r] = c;
  }

  // Minimizes cost over the current basis; columns with allowed[j] false never enter.
  double optimize(const std::vector<double>& cost, const std::vector<bool>& allowed) {
    const std::size_t cols = cost.size();
    for (int guard = 0; guard < 100000; ++guard) {
      // Reduced costs from scratch keep the loop free of drift bookkeeping.
      std::size_t enter = cols;
      for (std::size_t j = 0; j < cols && enter == cols; ++j) {
        if (!allowed[j]) continue;
        double rc = cost[j];
        for (std::size_t i = 0; i < t.size(); ++i) rc -= cost[basis[i]] * t[i][j];
        if (rc < -kEps) enter = j;
      }
      if (enter == cols) {
        double z = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) z += cost[basis[i]] * t[i].back();
        return z;
      }
      std::size_t leave = t.size();
      double best = 0.0;
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i][enter] <= kEps) continue;
        const double ratio = t[i].back() / t[i][enter];
        if (leave == t.size() || ratio < best - kEps ||
            (std::abs(ratio - best) <= kEps && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == t.size()) throw std::runtime_error("LP is unbounded");
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex did not terminate");
  }
};

}  // namespace

double simplex_minimize(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                        const std::vector<double>& c) {
  const std::size_t rows = a.size(), cols = c.size();
  // Columns: originals, then one artificial per row.
  Tableau tab;
  tab.t.assign(rows, std::vector<double>(cols + rows + 1, 0.0));
  tab.basis.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < cols; ++j) tab.t[i][j] = sign * a[i][j];
    tab.t[i][cols + i] = 1.0;
    tab.t[i].back() = sign * b[i];
    tab.basis[i] = cols + i;
  }

  std::vector<double> phase1(cols + rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) phase1[cols + i] = 1.0;
  std::vector<bool> all(cols + rows, true);
  if (tab.optimize(phase1, all) > 1e-9) throw std::runtime_error("LP is infeasible");

  // Drive remaining (zero-level) artificials out of the basis where possible.
  for (std::size_t i = 0; i < rows; ++i) {
    if (tab.basis[i] < cols) continue;
    for (std::size_t j = 0; j < cols; ++j) {
      if (std::abs(tab.t[i][j]) > 1e-9) {
        tab.pivot(i, j);
        break;
      }
    }
  }

  std::vector<double> phase2(cols + rows, 0.0);
  for (std::size_t j = 0; j < cols; ++j) phase2[j] = c[j];
  std::vector<bool> originals(cols + rows, false);
  for (std::size_t j = 0; j < cols; ++j) originals[j] = true;
  return tab.optimize(phase2, originals);
}

double lp_transport_cost(const std::vector<double>& supply, const std::vector<double>& demand,
                         const std::vector<double>& cost) {
  const std::size_t m1 = supply.size(), m2 = demand.size();
  std::vector<std::vector<double>> a(m1 + m2, std::vector<double>(m1 * m2, 0.0));
  std::vector<double> b(m1 + m2);
  for (std::size_t i = 0; i < m1; ++i) {
    for (std::size_t j = 0; j < m2; ++j) {
      a[i][i * m2 + j] = 1.0;
      a[m1 + j][i * m2 + j] = 1.0;
    }
    b[i] = supply[i];
  }
  for (std::size_t j = 0; j < m2; ++j) b[m1 + j] = demand[j];
  return simplex_minimize(a, b, cost);
}

}  // namespace ubm::testing
