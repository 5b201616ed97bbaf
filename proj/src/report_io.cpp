#include "attnalloc/report_io.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

#include "attnalloc/config.hpp"
#include "attnalloc/format.hpp"

namespace attnalloc {

void write_user_reports_csv(std::ostream& out, std::span<const UserReport> reports) {
  out << "user_id,n_objects,qoe_uniform,qoe_aware,qoe_oracle,improvement_pct\n";
  for (const auto& r : reports)
    out << r.user << ',' << r.n_objects << ',' << format_double(r.qoe_uniform) << ',' << format_double(r.qoe_aware)
        << ',' << format_double(r.qoe_oracle) << ',' << format_double(r.improvement_pct) << '\n';
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
  out << "budget_factor_k,mean_improvement_pct\n";
  for (const auto& p : report.points)
    out << format_double(p.budget_factor) << ',' << format_double(p.mean_improvement_pct) << '\n';
}

void write_allocation_csv(std::ostream& out, std::span<const double> weights, const AllocationResult& result) {
  out << "object_id,weight,capacity_k\n";
  for (std::size_t i = 0; i < result.capacities.size(); ++i)
    out << i << ',' << format_double(weights[i]) << ',' << format_double(result.capacities[i]) << '\n';
}

namespace {

nlohmann::json user_json(const UserReport& r) {
  return {{"user_id", r.user},
          {"n_objects", r.n_objects},
          {"budget_factor_k", r.budget_factor},
          {"qoe_uniform", r.qoe_uniform},
          {"qoe_aware", r.qoe_aware},
          {"qoe_oracle", r.qoe_oracle},
          {"improvement_pct", r.improvement_pct}};
}

}  // namespace

nlohmann::json run_report_json(const RunReport& report, const ExperimentConfig& config) {
  nlohmann::json users = nlohmann::json::array();
  for (const auto& r : report.users) users.push_back(user_json(r));
  return {{"version", kReportVersion},
          {"seed", config.seed},
          {"config", config_to_json(config)},
          {"aggregate",
           {{"max_improvement_pct", report.summary.max_improvement_pct},
            {"min_improvement_pct", report.summary.min_improvement_pct},
            {"mean_improvement_pct", report.summary.mean_improvement_pct},
            {"positive_users", report.summary.positive_users},
            {"num_users", report.users.size()}}},
          {"users", std::move(users)}};
}

nlohmann::json sweep_report_json(const SweepReport& report, const ExperimentConfig& config,
                                 std::span<const UserId> users) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : report.points)
    points.push_back({{"budget_factor_k", p.budget_factor}, {"mean_improvement_pct", p.mean_improvement_pct}});
  return {{"version", kReportVersion},
          {"seed", config.seed},
          {"config", config_to_json(config)},
          {"users", std::vector<UserId>(users.begin(), users.end())},
          {"slope_pct_per_k", sweep_slope(report)},
          {"points", std::move(points)}};
}

nlohmann::json allocation_summary_json(const AllocationProblem& problem, const AllocationResult& result) {
  const double total = std::accumulate(result.capacities.begin(), result.capacities.end(), 0.0);
  const double rel = std::abs(total - problem.budget) / problem.budget;
  return {{"version", kReportVersion},
          {"objective", result.objective},
          {"lagrange_multiplier", result.lagrange_multiplier},
          {"budget_k", problem.budget},
          {"floor_k", problem.floor},
          {"allocated_k", total},
          {"budget_relative_error", rel},
          {"budget_ok", rel <= 1e-9}};
}

}  // namespace attnalloc
