#include "attnalloc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include "attnalloc/errors.hpp"

namespace attnalloc {

void ExperimentConfig::validate() const {
  world.validate();
  fit.validate();
  if (use_channel)
    channel.validate();
  else
    link.validate();
  if (!(floor > 1.0)) throw ConfigError("floor must exceed 1 K");
  if (!(budget_factor > floor)) throw ConfigError("budget_factor must exceed floor");
  if (scene_min_percent < 1 || scene_max_percent > 100 || scene_min_percent > scene_max_percent)
    throw ConfigError("scene percent range must satisfy 1 <= min <= max <= 100");
  if (!(sweep_step > 0.0) || !(sweep_stop >= sweep_start)) throw ConfigError("sweep range is empty");
  if (!(sweep_start > floor)) throw ConfigError("every sweep budget factor must exceed floor");
  if (sweep_user < 0 || sweep_user >= world.num_users) throw ConfigError("sweep_user out of range");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

LinkParams ExperimentConfig::resolved_link() const { return use_channel ? link_from_channel(channel) : link; }

std::vector<double> ExperimentConfig::sweep_factors() const {
  std::vector<double> factors;
  const auto count = static_cast<int>(std::floor((sweep_stop - sweep_start) / sweep_step + 1e-9));
  for (int i = 0; i <= count; ++i) factors.push_back(sweep_start + i * sweep_step);
  return factors;
}

Scene draw_scene(const World& world, UserId user, const ExperimentConfig& config) {
  Rng rng(substream(config.seed, Stream::Scene, static_cast<std::uint64_t>(user)));
  Scene scene;
  scene.group = static_cast<int>(rng.uniform_int(0, world.num_groups() - 1));
  scene.retain_percent = static_cast<int>(rng.uniform_int(config.scene_min_percent, config.scene_max_percent));
  const auto members = world.group_images(scene.group);
  const int size = static_cast<int>(members.size());
  const int keep = std::max(1, (size * scene.retain_percent + 50) / 100);
  for (int idx : rng.sample_without_replacement(size, keep)) scene.images.push_back(members[static_cast<std::size_t>(idx)]);
  std::sort(scene.images.begin(), scene.images.end());
  std::vector<char> present(static_cast<std::size_t>(world.num_objects()), 0);
  for (ImageId id : scene.images)
    for (const auto& s : world.image(id).composition) present[static_cast<std::size_t>(s.object)] = 1;
  for (ObjectId o = 0; o < world.num_objects(); ++o)
    if (present[static_cast<std::size_t>(o)]) scene.objects.push_back(o);
  return scene;
}

ExperimentContext prepare_experiment(const ExperimentConfig& config) {
  config.validate();
  World world = generate_world(config.world, config.seed);
  GroundTruth truth = ground_truth(world);
  SparseAttentionRecords history = sparsify_all(world, config.seed);
  FitConfig fit = config.fit;
  fit.seed = config.seed;
  FactorModel model = fit_mf(history, fit, ModelShape{world.num_users(), world.num_objects()});
  LinkParams link = config.resolved_link();
  return {std::move(world), std::move(truth), std::move(history), std::move(model), link};
}

UserReport score_allocations(std::span<const double> true_weights, std::span<const double> predicted_weights,
                             double budget_factor, double floor, const LinkParams& link) {
  if (true_weights.empty() || true_weights.size() != predicted_weights.size())
    throw ConfigError("true and predicted weights must be non-empty and of equal length");
  const int n = static_cast<int>(true_weights.size());
  const double budget = n * budget_factor;

  const auto uniform = allocate_uniform(n, budget, floor);
  const auto aware = allocate_weighted({{predicted_weights.begin(), predicted_weights.end()}, budget, floor});
  const auto oracle = allocate_weighted({{true_weights.begin(), true_weights.end()}, budget, floor});

  UserReport report;
  report.n_objects = n;
  report.budget_factor = budget_factor;
  report.qoe_uniform = qoe(true_weights, uniform.capacities, link);
  report.qoe_aware = qoe(true_weights, aware.capacities, link);
  report.qoe_oracle = qoe(true_weights, oracle.capacities, link);
  report.improvement_pct = (report.qoe_aware - report.qoe_uniform) / report.qoe_uniform * 100.0;
  return report;
}

UserReport run_user_experiment(const ExperimentConfig& config, const ExperimentContext& context, UserId user,
                               std::optional<double> budget_factor) {
  if (user < 0 || user >= context.world.num_users()) throw ConfigError("user id out of range");
  const double factor = budget_factor.value_or(config.budget_factor);
  if (!(factor > config.floor)) throw InfeasibleError(config.floor - factor);
  const Scene scene = draw_scene(context.world, user, config);
  std::vector<double> truth;
  truth.reserve(scene.objects.size());
  for (ObjectId o : scene.objects) truth.push_back(context.truth.values(user, o));
  const auto predicted = predict_scene(context.model, user, scene.objects);
  UserReport report = score_allocations(truth, predicted, factor, config.floor, context.link);
  report.user = user;
  return report;
}

UserReport run_user_experiment(const ExperimentConfig& config, UserId user) {
  return run_user_experiment(config, prepare_experiment(config), user);
}

Aggregate aggregate(std::span<const UserReport> reports) {
  Aggregate agg;
  if (reports.empty()) return agg;
  agg.max_improvement_pct = reports.front().improvement_pct;
  agg.min_improvement_pct = reports.front().improvement_pct;
  double sum = 0.0;
  for (const auto& r : reports) {
    agg.max_improvement_pct = std::max(agg.max_improvement_pct, r.improvement_pct);
    agg.min_improvement_pct = std::min(agg.min_improvement_pct, r.improvement_pct);
    sum += r.improvement_pct;
    if (r.improvement_pct > 0.0) ++agg.positive_users;
  }
  agg.mean_improvement_pct = sum / static_cast<double>(reports.size());
  return agg;
}

namespace {

template <typename Fn>
void for_each_index(int count, int threads, Fn&& fn) {
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> workers;
  for (int t = 0; t < threads; ++t) {
    workers.push_back(std::async(std::launch::async, [&, t] {
      for (int i = t; i < count; i += threads) fn(i);
    }));
  }
  for (auto& w : workers) w.get();
}

}  // namespace

RunReport run_all(const ExperimentConfig& config, const ExperimentContext& context) {
  RunReport report;
  report.users.resize(static_cast<std::size_t>(context.world.num_users()));
  for_each_index(context.world.num_users(), config.threads, [&](int u) {
    report.users[static_cast<std::size_t>(u)] = run_user_experiment(config, context, u);
  });
  report.summary = aggregate(report.users);
  return report;
}

RunReport run_all(const ExperimentConfig& config) { return run_all(config, prepare_experiment(config)); }

SweepReport run_sweep(const ExperimentConfig& config, const ExperimentContext& context, std::span<const UserId> users) {
  if (users.empty()) throw ConfigError("sweep needs at least one user");
  const auto factors = config.sweep_factors();
  SweepReport report;
  report.points.resize(factors.size());
  for_each_index(static_cast<int>(factors.size()), config.threads, [&](int i) {
    const double factor = factors[static_cast<std::size_t>(i)];
    double sum = 0.0;
    for (UserId u : users) sum += run_user_experiment(config, context, u, factor).improvement_pct;
    report.points[static_cast<std::size_t>(i)] = {factor, sum / static_cast<double>(users.size())};
  });
  return report;
}

SweepReport run_sweep(const ExperimentConfig& config, UserId user) {
  const UserId users[] = {user};
  return run_sweep(config, prepare_experiment(config), users);
}

double sweep_slope(const SweepReport& report) {
  const auto n = static_cast<double>(report.points.size());
  if (report.points.size() < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (const auto& p : report.points) {
    mx += p.budget_factor;
    my += p.mean_improvement_pct;
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& p : report.points) {
    sxy += (p.budget_factor - mx) * (p.mean_improvement_pct - my);
    sxx += (p.budget_factor - mx) * (p.budget_factor - mx);
  }
  return sxy / sxx;
}

}  // namespace attnalloc
