#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ubm/errors.hpp"
#include "ubm/harness.hpp"
#include "ubm/parallel.hpp"

using namespace ubm;

namespace {

HarnessConfig grid(std::vector<int> n, std::vector<double> t, int replicas, std::uint64_t seed) {
  HarnessConfig h;
  h.n_values = std::move(n);
  h.t_values = std::move(t);
  h.replicas = replicas;
  h.seed = seed;
  return h;
}

}  // namespace

TEST_CASE("parallel_map is ordered, deterministic, and rethrows the lowest failure") {
  const auto a = parallel_map(100, 1, [](std::size_t i) { return i * i; });
  const auto b = parallel_map(100, 7, [](std::size_t i) { return i * i; });
  CHECK(a == b);
  CHECK(a[9] == 81);
  try {
    (void)parallel_map(50, 4, [](std::size_t i) -> int {
      if (i == 13 || i == 40) throw std::runtime_error(std::to_string(i));
      return 0;
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "13");
  }
  CHECK(parallel_map(0, 4, [](std::size_t) { return 1; }).empty());
}

TEST_CASE("fit_power_law") {
  std::vector<std::pair<double, double>> exact, flat, noisy;
  for (double x : {2.0, 4.0, 8.0, 16.0, 32.0}) {
    exact.emplace_back(x, 1.0 / (x * x));
    flat.emplace_back(x, 3.0);
  }
  const auto f = fit_power_law(exact);
  CHECK(f.slope == doctest::Approx(-2.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(fit_power_law(flat).slope == doctest::Approx(0.0).epsilon(1e-12));
  const double noise[] = {0.01, -0.01, 0.005, -0.008, 0.01, -0.004};
  int i = 0;
  for (double x : {8.0, 16.0, 32.0, 64.0, 128.0, 256.0}) noisy.emplace_back(x, std::pow(x, -2.0 / 3.0) * (1 + noise[i++]));
  const auto n = fit_power_law(noisy);
  CHECK(n.slope >= -0.70);
  CHECK(n.slope <= -0.63);
  CHECK(n.r_squared >= 0.0);
  CHECK(n.r_squared <= 1.0);

  const std::vector<std::pair<double, double>> two{{1, 1}, {2, 2}};
  const std::vector<std::pair<double, double>> negative{{1, 1}, {2, -2}, {3, 1}};
  for (const auto* pts : {&two, &negative}) {
    try {
      (void)fit_power_law(*pts);
      FAIL("expected domain error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::domain);
    }
  }
}

TEST_CASE("record bound rule") {
  CHECK(upper_bound_holds(1.0, 1.0, 0.0));
  CHECK(upper_bound_holds(1.2, 1.0, 0.1));
  CHECK_FALSE(upper_bound_holds(1.31, 1.0, 0.1));
}

TEST_CASE("a single replica is at distance 0 from its own pool") {
  const auto r = run_rate_avg_to_avg(grid({8}, {1.0}, 1, 3));
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].estimate == 0.0);
  CHECK(r.records[0].std_error == 0.0);
}

TEST_CASE("records are bit-for-bit reproducible and worker independent") {
  auto h = grid({4, 6}, {0.5}, 40, 17);
  h.workers = 1;
  const auto a = run_rate_avg_to_avg(h);
  h.workers = 4;
  const auto b = run_rate_avg_to_avg(h);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].estimate == b.records[i].estimate);
    CHECK(a.records[i].std_error == b.records[i].std_error);
    CHECK(a.records[i].paper_bound == b.records[i].paper_bound);
  }
}

TEST_CASE("4x replicas shrink the reported SE by about 2") {
  const auto a = run_rate_avg_to_avg(grid({8}, {1.0}, 200, 5));
  const auto b = run_rate_avg_to_avg(grid({8}, {1.0}, 800, 5));
  const double ratio = a.records[0].std_error / b.records[0].std_error;
  CHECK(ratio >= 1.8);
  CHECK(ratio <= 2.2);
}

TEST_CASE("avg-to-avg over t at fixed N: increasing, single constant, slope rows") {
  const auto r = run_rate_avg_to_avg(grid({32}, {0.25, 1.0, 4.0}, 200, 6));
  REQUIRE(r.records.size() == 3);
  CHECK(r.records[0].estimate < r.records[1].estimate);
  CHECK(r.records[1].estimate < r.records[2].estimate);
  CHECK(r.all_satisfied());
  CHECK(r.diagnostics.count("rate_avg_to_avg.constant") == 1);
}

TEST_CASE("pool-bias check shifts the estimate by less than its SE") {
  AvgToAvgOptions opt;
  opt.pool_bias_check = true;
  const auto r = run_rate_avg_to_avg(grid({8}, {1.0}, 200, 7), opt);
  const auto* bias = r.find("rate_avg_to_avg_pool_bias", 8, 1.0);
  REQUIRE(bias != nullptr);
  CHECK(bias->bound_satisfied);
}

TEST_CASE("moment convergence rows") {
  auto r = run_moment_convergence(grid({16}, {1.0}, 1000, 8), 4);
  REQUIRE(r.records.size() == 4);
  CHECK(r.records[0].paper_bound == doctest::Approx(1.0 / 256));
  CHECK(r.records[3].paper_bound == doctest::Approx(1.0));
  CHECK(r.all_satisfied());
  const double mean1 = r.diagnostics.at("moment.mc_mean.n=16,t=1,k=1");
  CHECK(std::abs(mean1 - std::exp(-0.5)) <= 3 * r.records[0].std_error + 0.01);
}

TEST_CASE("second-moment error scales like N^-2") {
  // Finite-N oracle for k = 2: E (1/N) tr U_t^2 = e^{-t} (cosh(t/N) - N sinh(t/N)),
  // whose gap to the limit e^{-t} (1 - t) is ~0.12 / N^2 at t = 1. That gap is
  // below Monte Carlo resolution at N >= 16, so the scaling is observed at N = 2, 4.
  auto exact = [](int n, double t) {
    return std::exp(-t) * (std::cosh(t / n) - n * std::sinh(t / n));
  };
  const auto r = run_moment_convergence(grid({2, 4}, {1.0}, 40000, 9), 2);
  const auto* d2 = r.find("moment_k2", 2, 1.0);
  const auto* d4 = r.find("moment_k2", 4, 1.0);
  for (int n : {2, 4}) {
    const double mc = r.diagnostics.at("moment.mc_mean.n=" + std::to_string(n) + ",t=1,k=2");
    const double se = r.find("moment_k2", n, 1.0)->std_error;
    CAPTURE(n);
    CHECK(std::abs(mc - exact(n, 1.0)) <= 3 * se);
  }
  CAPTURE(d2->estimate);
  CAPTURE(d4->estimate);
  CHECK(d2->estimate / d4->estimate >= 2.0);
  CHECK(d2->estimate / d4->estimate <= 8.0);
  const double ratio_exact = (exact(16, 1.0) - 0.0) / (exact(32, 1.0) - 0.0);
  CHECK(ratio_exact == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("concentration tail rows") {
  const std::vector<double> xs{0.0, 0.2};
  const auto r = run_concentration_tail(grid({16}, {1.0}, 400, 10), xs);
  const auto* zero = r.find("concentration_tail_x=0", 16, 1.0);
  REQUIRE(zero != nullptr);
  CHECK(zero->paper_bound == doctest::Approx(2.0));
  CHECK(zero->bound_satisfied);
  const auto* far = r.find("concentration_tail_x=0.2", 16, 1.0);
  REQUIRE(far != nullptr);
  CHECK(far->paper_bound == doctest::Approx(2 * std::exp(-10.24)));
  CHECK(r.diagnostics.at("concentration.count.n=16,t=1,x=0.2") <= 3);
  CHECK(r.find("concentration_tail_adjusted_x=0.2", 16, 1.0) != nullptr);
}

TEST_CASE("concentration tail does not grow when N doubles") {
  const std::vector<double> xs{0.05};
  const auto a = run_concentration_tail(grid({8}, {1.0}, 1000, 11), xs);
  const auto b = run_concentration_tail(grid({16}, {1.0}, 1000, 11), xs);
  const auto* ra = a.find("concentration_tail_x=0.05", 8, 1.0);
  const auto* rb = b.find("concentration_tail_x=0.05", 16, 1.0);
  CHECK(rb->estimate <= ra->estimate + 3 * std::hypot(ra->std_error, rb->std_error));
}

TEST_CASE("avg-to-limit rows and the triangle route for t >= 8") {
  const auto r = run_avg_to_limit(grid({8, 16}, {1.0, 16.0}, 100, 12), 512);
  CHECK(r.find("avg_to_limit", 8, 1.0) != nullptr);
  const auto* tri = r.find("avg_to_limit_triangle", 16, 16.0);
  REQUIRE(tri != nullptr);
  CHECK(tri->bound_satisfied);
  CHECK(r.find("avg_to_uniform", 8, 16.0) != nullptr);
  CHECK(r.find("avg_to_limit_triangle", 8, 1.0) == nullptr);
  CHECK(r.diagnostics.at("avg_to_limit.constant") > 0.0);
}

TEST_CASE("avg-to-limit shrinks from N = 16 to N = 64 at t = 1") {
  const auto r = run_avg_to_limit(grid({16, 64}, {1.0}, 250, 13), 2048);
  const double e16 = r.find("avg_to_limit", 16, 1.0)->estimate;
  const double e64 = r.find("avg_to_limit", 64, 1.0)->estimate;
  CAPTURE(e16);
  CAPTURE(e64);
  CHECK(e64 / e16 <= std::pow(16.0 / 64.0, 0.3));
}

TEST_CASE("path sup with a single grid time reduces to one W1") {
  auto h = grid({8}, {0.5}, 5, 14);
  const auto r = run_path_sup(h, 0.5, 2, 256);
  const auto* med = r.find("path_sup_median", 8, 0.5);
  REQUIRE(med != nullptr);
  CHECK(med->estimate > 0.0);
  CHECK(r.find("path_sup_early_median", 8, 0.5) != nullptr);
}

TEST_CASE("refining a lattice-aligned path grid changes each sup by < 10%") {
  auto h = grid({32}, {2.0}, 4, 15);
  h.step_count = 200;
  const auto coarse = run_path_sup(h, 2.0, 51, 512);
  const auto fine = run_path_sup(h, 2.0, 101, 512);
  const double a = coarse.find("path_sup_max", 32, 2.0)->estimate;
  const double b = fine.find("path_sup_max", 32, 2.0)->estimate;
  CHECK(std::abs(a - b) / b < 0.10);
  const double ma = coarse.find("path_sup_median", 32, 2.0)->estimate;
  const double mb = fine.find("path_sup_median", 32, 2.0)->estimate;
  CHECK(std::abs(ma - mb) / mb < 0.10);
}

TEST_CASE("path sup ordering rows") {
  const auto r = run_path_sup(grid({8, 4}, {2.0}, 6, 16), 2.0, 21, 256);
  const auto* ord = r.find("path_sup_ordering", 8, 2.0);
  REQUIRE(ord != nullptr);
  CHECK(ord->bound_satisfied == (ord->estimate < ord->paper_bound));
}

TEST_CASE("Brownian tail: vacuous flag and an informative configuration") {
  auto h = grid({4}, {1.0}, 2000, 17);
  const std::vector<double> rs{0.1, 2.0};
  const auto r = run_bm_tail(h, 0.01, rs);
  const auto* vac = r.find("bm_tail_vacuous_r=0.1", 4, 0.01);
  REQUIRE(vac != nullptr);
  CHECK(vac->bound_satisfied);
  const auto* inf = r.find("bm_tail_r=2", 4, 0.01);
  REQUIRE(inf != nullptr);
  CHECK(inf->estimate == 0.0);
  CHECK(inf->paper_bound < 1e-70);
  CHECK(r.diagnostics.at("bm_tail.log_bound.n=4,r=2") ==
        doctest::Approx(std::log(16.0) + 16 * std::log(3.0) - 200.0));

  const std::vector<double> small{0.01};
  const auto w = run_bm_tail(grid({4}, {1.0}, 10, 1), 0.01, small);
  bool warned = false;
  for (const auto& note : w.notes) warned = warned || note.rfind("warning", 0) == 0;
  CHECK(warned);
}

TEST_CASE("Brownian tail: median sup scales like sqrt(delta)") {
  const std::vector<double> rs{1.0};
  const auto a = run_bm_tail(grid({4}, {1.0}, 1000, 18), 0.01, rs);
  const auto b = run_bm_tail(grid({4}, {1.0}, 1000, 18), 0.04, rs);
  const double ratio = b.find("bm_tail_median_sup", 4, 0.04)->estimate /
                       a.find("bm_tail_median_sup", 4, 0.01)->estimate;
  CHECK(ratio >= 1.7);
  CHECK(ratio <= 2.3);
  // Typical size sqrt(N^2 delta) = 0.4 at delta = 0.01.
  CHECK(a.find("bm_tail_median_sup", 4, 0.01)->estimate == doctest::Approx(0.4).epsilon(0.35));
}

TEST_CASE("mean trace rows use the 0.01 t allowance") {
  const auto r = run_mean_trace(grid({4}, {0.5, 1.0}, 500, 19));
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].paper_bound == doctest::Approx(0.005));
  CHECK(r.all_satisfied());
}

TEST_CASE("biane rows") {
  const std::vector<double> ts{4.0, 6.0, 8.0};
  const auto r = run_biane_decay(ts, 2048);
  CHECK(r.find("biane_to_uniform", 0, 4.0)->paper_bound ==
        doctest::Approx(r.find("biane_to_uniform", 0, 4.0)->estimate));
  CHECK(r.find("biane_ratio", 0, 8.0)->bound_satisfied);
  CHECK(r.all_satisfied());
}

TEST_CASE("harness input validation") {
  CHECK_THROWS_AS(run_rate_avg_to_avg(grid({}, {1.0}, 10, 1)), Error);
  CHECK_THROWS_AS(run_moment_convergence(grid({4}, {-1.0}, 10, 1), 2), Error);
  CHECK_THROWS_AS(run_moment_convergence(grid({4}, {1.0}, 10, 1), 0), Error);
  CHECK_THROWS_AS(run_path_sup(grid({4}, {1.0}, 10, 1), 0.2, 10), Error);
  const std::vector<double> none;
  CHECK_THROWS_AS(run_concentration_tail(grid({4}, {1.0}, 10, 1), none), Error);
  CHECK_THROWS_AS(run_bm_tail(grid({4}, {1.0}, 10, 1), 0.01, none), Error);
}
