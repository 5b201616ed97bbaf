#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "attnalloc/allocator.hpp"
#include "attnalloc/errors.hpp"
#include "attnalloc/random.hpp"

using namespace attnalloc;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

AllocationProblem random_problem(Rng& rng, int max_n) {
  AllocationProblem p;
  const int n = static_cast<int>(rng.uniform_int(1, max_n));
  for (int i = 0; i < n; ++i) p.weights.push_back(rng.uniform(0.05, 5.0));
  p.floor = rng.uniform(1.5, 20.0);
  p.budget = n * p.floor * rng.uniform(1.0, 4.0);
  return p;
}

}  // namespace

TEST_CASE("allocation examples") {
  const auto sym = allocate_weighted({{1, 1, 1}, 60, 15});
  CHECK(sym.capacities == std::vector<double>{20, 20, 20});

  const auto skew = allocate_weighted({{4, 1}, 40, 15});
  CHECK(skew.capacities == std::vector<double>{25, 15});
  CHECK(skew.lagrange_multiplier == doctest::Approx(4.0 / 25.0).epsilon(1e-15));
  CHECK(skew.objective == doctest::Approx(4 * std::log(25.0) + std::log(15.0)).epsilon(1e-15));

  const auto scene = allocate_weighted({std::vector<double>(56, 2.5), 56 * 20.0, 15});
  for (double c : scene.capacities) CHECK(c == doctest::Approx(20.0).epsilon(1e-14));
}

TEST_CASE("unconstrained split is proportional") {
  const auto r = allocate_weighted({{1, 2, 3}, 120, 15});
  CHECK(r.capacities[0] == 20.0);
  CHECK(r.capacities[1] == 40.0);
  CHECK(r.capacities[2] == 60.0);
  CHECK(r.lagrange_multiplier == doctest::Approx(0.05).epsilon(1e-15));
}

TEST_CASE("cascading clamps") {
  // first round clamps only the smallest, second round the next one
  const auto r = allocate_weighted({{10, 1, 1.8}, 60, 15});
  CHECK(r.capacities[1] == 15.0);
  CHECK(r.capacities[2] == 15.0);
  CHECK(r.capacities[0] == 30.0);
}

TEST_CASE("uniform allocation") {
  CHECK(allocate_uniform(3, 60, 15).capacities == std::vector<double>{20, 20, 20});
  const auto big = allocate_uniform(56, 1120, 15);
  for (double c : big.capacities) CHECK(c == 20.0);
  CHECK(allocate_uniform(1, 37.5, 15).capacities == std::vector<double>{37.5});
  CHECK(allocate_uniform(4, 80, 15).objective == doctest::Approx(4 * std::log(20.0)).epsilon(1e-15));
  CHECK_THROWS_AS(allocate_uniform(0, 10, 15), ConfigError);
}

TEST_CASE("infeasible budget reports the deficit") {
  try {
    allocate_weighted({{1, 1, 1}, 40, 15});
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.deficit() == 5.0);
  }
  CHECK_THROWS_AS(allocate_uniform(3, 44.9, 15), InfeasibleError);
  CHECK_THROWS_AS(allocate_weighted({{1}, 40, 1.0}), ConfigError);
  CHECK_THROWS_AS(allocate_weighted({{NAN}, 40, 15}), ConfigError);
  CHECK_THROWS_AS(allocate_weighted({{}, 40, 15}), ConfigError);
}

TEST_CASE("budget equal to n times floor pins every object") {
  const auto r = allocate_weighted({{5, 1, 3}, 45, 15});
  CHECK(r.capacities == std::vector<double>{15, 15, 15});
}

TEST_CASE("zero and negative weights get exactly the floor") {
  const auto r = allocate_weighted({{3, 0, -2, 1}, 100, 15});
  CHECK(r.capacities[1] == 15.0);
  CHECK(r.capacities[2] == 15.0);
  CHECK(sum(r.capacities) == doctest::Approx(100.0).epsilon(1e-15));
}

TEST_CASE("brute force oracle") {
  CHECK(brute_force_allocate({{2.0}, 33.3, 15}, 0.01).capacities == std::vector<double>{33.3});
  const auto r = brute_force_allocate({{4, 1}, 40, 15}, 0.01);
  CHECK(r.capacities[0] == doctest::Approx(25.0).epsilon(1e-12));
  CHECK(r.capacities[1] == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(std::isnan(r.lagrange_multiplier));

  CHECK_THROWS_AS(brute_force_allocate({{1, 1, 1, 1, 1}, 100, 15}, 1.0), SearchSpaceError);
  CHECK_THROWS_AS(brute_force_allocate({{1, 1}, 1e5, 15}, 0.01), SearchSpaceError);
  CHECK_THROWS_AS(brute_force_allocate({{1, 1, 1, 1}, 15 * 4 + 10000, 15}, 0.01), SearchSpaceError);
  CHECK_THROWS_AS(brute_force_allocate({{1, 1}, 40, 15}, 0.0), ConfigError);
}

TEST_CASE("solver agrees with brute force on small problems") {
  Rng rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    AllocationProblem p;
    const int n = static_cast<int>(rng.uniform_int(1, 3));
    for (int i = 0; i < n; ++i) p.weights.push_back(rng.uniform(0.1, 5.0));
    p.floor = 15.0;
    p.budget = n * rng.uniform(15.0, 25.0);
    const double step = 0.05;
    const auto exact = allocate_weighted(p);
    const auto grid = brute_force_allocate(p, step);
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(exact.capacities[static_cast<std::size_t>(i)] - grid.capacities[static_cast<std::size_t>(i)]) <= 2 * step);
    CHECK(exact.objective >= grid.objective - 1e-12);
  }
}

TEST_CASE("allocation properties") {
  Rng rng(77);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto p = random_problem(rng, 40);
    const auto r = allocate_weighted(p);
    const auto n = p.weights.size();
    REQUIRE(r.capacities.size() == n);
    CHECK(std::abs(sum(r.capacities) - p.budget) <= 1e-9 * p.budget);
    for (double c : r.capacities) CHECK(c >= p.floor - 1e-12);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (p.weights[i] > p.weights[j]) {
          CHECK(r.capacities[i] >= r.capacities[j]);
          if (r.capacities[j] > p.floor) CHECK(r.capacities[i] > r.capacities[j]);
        }
    CHECK(r.objective >= log_objective(p.weights, allocate_uniform(static_cast<int>(n), p.budget, p.floor).capacities) - 1e-9);

    // power-of-two scaling is exact in floating point
    auto scaled = p;
    for (double& w : scaled.weights) w *= 1024.0;
    CHECK(allocate_weighted(scaled).capacities == r.capacities);
    for (double& w : scaled.weights) w /= 1024.0 * 1024.0;
    CHECK(allocate_weighted(scaled).capacities == r.capacities);
  }
}

TEST_CASE("optimality: KKT conditions hold") {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = random_problem(rng, 30);
    const auto r = allocate_weighted(p);
    if (r.lagrange_multiplier == 0.0) continue;
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      const double marginal = p.weights[i] / r.capacities[i];
      if (r.capacities[i] > p.floor + 1e-9)
        CHECK(marginal == doctest::Approx(r.lagrange_multiplier).epsilon(1e-12));
      else
        CHECK(marginal <= r.lagrange_multiplier * (1 + 1e-12));
    }
  }
}

TEST_CASE("large budget approaches proportional shares") {
  const std::vector<double> w{0.3, 1.2, 2.5, 4.0};
  const auto r = allocate_weighted({w, 1e6, 15});
  const double total = sum(w);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(r.capacities[i] / 1e6 - w[i] / total) < 1e-3);
}
