#pragma once

#include <iosfwd>
#include <span>

#include <json.hpp>

#include "attnalloc/allocator.hpp"
#include "attnalloc/experiment.hpp"

namespace attnalloc {

inline constexpr const char* kReportVersion = "attnalloc-report/1";

void write_user_reports_csv(std::ostream& out, std::span<const UserReport> reports);
void write_sweep_csv(std::ostream& out, const SweepReport& report);
void write_allocation_csv(std::ostream& out, std::span<const double> weights, const AllocationResult& result);

nlohmann::json run_report_json(const RunReport& report, const ExperimentConfig& config);
nlohmann::json sweep_report_json(const SweepReport& report, const ExperimentConfig& config,
                                 std::span<const UserId> users);
nlohmann::json allocation_summary_json(const AllocationProblem& problem, const AllocationResult& result);

}  // namespace attnalloc
