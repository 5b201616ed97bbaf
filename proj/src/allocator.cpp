#include "attnalloc/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "attnalloc/errors.hpp"

namespace attnalloc {

namespace {

void check_budget(std::size_t n, double budget, double floor) {
  if (n == 0) throw ConfigError("allocation needs at least one object");
  if (!(floor > 1.0) || !std::isfinite(floor)) throw ConfigError("floor must be a finite value above 1 K");
  if (!std::isfinite(budget)) throw ConfigError("budget must be finite");
  const double required = static_cast<double>(n) * floor;
  if (budget < required) throw InfeasibleError(required - budget);
}

std::vector<double> effective_weights(std::span<const double> weights) {
  std::vector<double> w(weights.begin(), weights.end());
  for (double& v : w) v = std::max(v, kMinWeight);
  return w;
}

}  // namespace

void AllocationProblem::validate() const {
  for (double w : weights)
    if (!std::isfinite(w)) throw ConfigError("weights must be finite");
  check_budget(weights.size(), budget, floor);
}

double log_objective(std::span<const double> weights, std::span<const double> capacities) {
  double total = 0.0;
  for (std::size_t n = 0; n < weights.size(); ++n) total += std::max(weights[n], kMinWeight) * std::log(capacities[n]);
  return total;
}

AllocationResult allocate_weighted(const AllocationProblem& problem) {
  problem.validate();
  const auto w = effective_weights(problem.weights);
  const std::size_t n = w.size();
  std::vector<char> clamped(n, 0);
  std::size_t n_clamped = 0;
  double unclamped_weight = 0.0;
  double share = 0.0;  // capacity per unit weight for unclamped objects

  // Clamping only ever raises the multiplier, so no object needs to be released.
  for (;;) {
    unclamped_weight = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!clamped[i]) unclamped_weight += w[i];
    if (n_clamped == n) break;
    const double remaining = problem.budget - static_cast<double>(n_clamped) * problem.floor;
    share = remaining / unclamped_weight;
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!clamped[i] && w[i] * share < problem.floor) {
        clamped[i] = 1;
        ++n_clamped;
        changed = true;
      }
    }
    if (!changed) break;
  }

  AllocationResult result;
  result.capacities.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.capacities[i] = clamped[i] ? problem.floor : w[i] * share;
  result.lagrange_multiplier = n_clamped == n ? 0.0 : 1.0 / share;
  result.objective = log_objective(w, result.capacities);
  return result;
}

AllocationResult allocate_uniform(int n_objects, double budget, double floor) {
  check_budget(static_cast<std::size_t>(std::max(n_objects, 0)), budget, floor);
  AllocationResult result;
  result.capacities.assign(static_cast<std::size_t>(n_objects), budget / n_objects);
  result.lagrange_multiplier = n_objects / budget;
  result.objective = static_cast<double>(n_objects) * std::log(budget / n_objects);
  return result;
}

AllocationResult brute_force_allocate(const AllocationProblem& problem, double grid_step) {
  problem.validate();
  if (!(grid_step > 0.0)) throw ConfigError("grid step must be positive");
  const std::size_t n = problem.weights.size();
  if (n > 4) throw SearchSpaceError("brute force supports at most 4 objects");
  const double slack = problem.budget - static_cast<double>(n) * problem.floor;
  const double units = std::floor(slack / grid_step + 1e-9);
  if (units > 1e6) throw SearchSpaceError("grid has more than 1e6 steps along the budget slack");
  const auto m = static_cast<std::size_t>(units);
  double combos = 1.0;  // C(m + n - 1, n - 1)
  for (std::size_t k = 1; k < n; ++k) combos = combos * static_cast<double>(m + k) / static_cast<double>(k);
  if (combos > 1e9) throw SearchSpaceError("grid has more than 1e9 points");

  const auto w = effective_weights(problem.weights);
  const double residual = std::max(0.0, slack - static_cast<double>(m) * grid_step);
  // table[i][k] = w_i * ln(floor + k * step); the last coordinate also carries the residual
  std::vector<std::vector<double>> table(n, std::vector<double>(m + 1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k <= m; ++k)
      table[i][k] = w[i] * std::log(problem.floor + static_cast<double>(k) * grid_step + (i + 1 == n ? residual : 0.0));

  std::vector<std::size_t> current(n, 0), best(n, 0);
  double best_value = -std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> search = [&](std::size_t i, std::size_t left, double acc) {
    if (i + 1 == n) {
      const double value = acc + table[i][left];
      if (value > best_value) {
        best_value = value;
        current[i] = left;
        best = current;
      }
      return;
    }
    for (std::size_t k = 0; k <= left; ++k) {
      current[i] = k;
      search(i + 1, left - k, acc + table[i][k]);
    }
  };
  search(0, m, 0.0);

  AllocationResult result;
  result.capacities.resize(n);
  double assigned = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    result.capacities[i] = problem.floor + static_cast<double>(best[i]) * grid_step;
    assigned += result.capacities[i];
  }
  result.capacities[n - 1] = problem.budget - assigned;
  result.objective = log_objective(w, result.capacities);
  result.lagrange_multiplier = std::numeric_limits<double>::quiet_NaN();
  return result;
}

}  // namespace attnalloc
