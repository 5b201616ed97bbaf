#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "attnalloc/allocator.hpp"
#include "attnalloc/attention_data.hpp"
#include "attnalloc/predict.hpp"
#include "attnalloc/qoe.hpp"

namespace attnalloc {

struct ExperimentConfig {
  std::uint64_t seed = 7;
  WorldConfig world;
  FitConfig fit;

  /// Link from the channel model, or the direct parameters in `link`.
  bool use_channel = true;
  ChannelConfig channel;
  LinkParams link;

  double floor = 15.0;          // K per object
  double budget_factor = 20.0;  // K per object; total budget = n_objects * budget_factor

  // Scene: objects seen in a uniform [min, max] percent of one random group's images.
  int scene_min_percent = 30;
  int scene_max_percent = 70;

  double sweep_start = 16.0;
  double sweep_stop = 40.0;
  double sweep_step = 2.0;
  UserId sweep_user = 2;

  /// Worker threads for per-user runs; results do not depend on it.
  int threads = 1;

  void validate() const;
  LinkParams resolved_link() const;
  std::vector<double> sweep_factors() const;
  bool operator==(const ExperimentConfig&) const = default;
};

/// The objects a user is looking at in the evaluated service session.
struct Scene {
  int group = 0;
  int retain_percent = 0;
  std::vector<ImageId> images;
  std::vector<ObjectId> objects;  // ascending
};

Scene draw_scene(const World& world, UserId user, const ExperimentConfig& config);

/// Everything shared by the per-user runs of one configuration.
struct ExperimentContext {
  World world;
  GroundTruth truth;
  SparseAttentionRecords history;
  FactorModel model;
  LinkParams link;
};

ExperimentContext prepare_experiment(const ExperimentConfig& config);

struct UserReport {
  UserId user = 0;
  int n_objects = 0;
  double budget_factor = 0.0;
  double qoe_uniform = 0.0;
  double qoe_aware = 0.0;
  double qoe_oracle = 0.0;
  double improvement_pct = 0.0;
  bool operator==(const UserReport&) const = default;
};

/// Allocates with uniform, predicted and true weights and scores all three with the true weights.
UserReport score_allocations(std::span<const double> true_weights, std::span<const double> predicted_weights,
                             double budget_factor, double floor, const LinkParams& link);

UserReport run_user_experiment(const ExperimentConfig& config, const ExperimentContext& context, UserId user,
                               std::optional<double> budget_factor = std::nullopt);
UserReport run_user_experiment(const ExperimentConfig& config, UserId user);

struct Aggregate {
  double max_improvement_pct = 0.0;
  double min_improvement_pct = 0.0;
  double mean_improvement_pct = 0.0;
  int positive_users = 0;
  bool operator==(const Aggregate&) const = default;
};

Aggregate aggregate(std::span<const UserReport> reports);

struct RunReport {
  std::vector<UserReport> users;  // ordered by user id
  Aggregate summary;
  bool operator==(const RunReport&) const = default;
};

RunReport run_all(const ExperimentConfig& config, const ExperimentContext& context);
RunReport run_all(const ExperimentConfig& config);

struct SweepPoint {
  double budget_factor = 0.0;
  double mean_improvement_pct = 0.0;
  bool operator==(const SweepPoint&) const = default;
};

struct SweepReport {
  std::vector<SweepPoint> points;  // strictly increasing budget factor
  bool operator==(const SweepReport&) const = default;
};

/// One run per budget factor for each user, sharing the fitted model; improvement averaged over users.
SweepReport run_sweep(const ExperimentConfig& config, const ExperimentContext& context, std::span<const UserId> users);
SweepReport run_sweep(const ExperimentConfig& config, UserId user);

/// Ordinary least-squares slope of improvement against budget factor.
double sweep_slope(const SweepReport& report);

}  // namespace attnalloc
