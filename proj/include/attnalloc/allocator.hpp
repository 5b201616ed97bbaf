#pragma once

#include <span>
#include <vector>

namespace attnalloc {

/// maximize sum_n w_n ln(c_n)  s.t.  sum_n c_n = budget,  c_n >= floor.
struct AllocationProblem {
  std::vector<double> weights;
  double budget = 0.0;  // K
  double floor = 15.0;  // K

  /// Throws ConfigError on malformed input, InfeasibleError when budget < n * floor.
  void validate() const;
};

struct AllocationResult {
  std::vector<double> capacities;  // K
  double lagrange_multiplier = 0.0;
  double objective = 0.0;
};

/// Weights below this are raised to it before solving.
inline constexpr double kMinWeight = 1e-9;

double log_objective(std::span<const double> weights, std::span<const double> capacities);

/// Exact KKT water-filling with floors by active-set clamping. Terminates in at most n rounds.
AllocationResult allocate_weighted(const AllocationProblem& problem);

/// Every object receives budget / n.
AllocationResult allocate_uniform(int n_objects, double budget, double floor);

/// Exhaustive search over the grid {floor + k * step} (n <= 4). The last coordinate takes
/// whatever is left so the budget is met exactly. Test oracle only.
AllocationResult brute_force_allocate(const AllocationProblem& problem, double grid_step);

}  // namespace attnalloc
