#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "attnalloc/attention_data.hpp"
#include "attnalloc/matrix.hpp"

namespace attnalloc {

struct FitConfig {
  int factors = 6;
  double learning_rate = 0.01;
  double regularization = 0.05;
  int epochs = 200;
  /// Initial factors are uniform(-0.05, 0.05) * init_scale.
  double init_scale = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const FitConfig&) const = default;
};

/// Observed target for training. Levels are the usual source, but any real value is accepted.
struct Rating {
  UserId user = 0;
  ObjectId object = 0;
  double value = 0.0;
};

struct ModelShape {
  int num_users = 0;
  int num_objects = 0;
};

/// Bias-augmented latent factor model:
///   score(u, o) = mu + b_u[u] + b_o[o] + <U[u], V[o]>
/// Immutable once fitted; safe for concurrent prediction.
class FactorModel {
public:
  FactorModel(double mu, std::vector<double> user_bias, std::vector<double> object_bias,
              Matrix<double> user_factors, Matrix<double> object_factors);

  /// All factors and biases zero.
  static FactorModel constant(ModelShape shape, int factors, double mu);

  int num_users() const noexcept { return user_factors_.rows(); }
  int num_objects() const noexcept { return object_factors_.rows(); }
  int factors() const noexcept { return user_factors_.cols(); }
  double mu() const noexcept { return mu_; }
  const std::vector<double>& user_bias() const noexcept { return user_bias_; }
  const std::vector<double>& object_bias() const noexcept { return object_bias_; }
  const Matrix<double>& user_factors() const noexcept { return user_factors_; }
  const Matrix<double>& object_factors() const noexcept { return object_factors_; }

  /// Unclamped score. Throws std::out_of_range on a bad index.
  double predict_raw(UserId user, ObjectId object) const;
  /// Score clamped to [1, 5].
  double predict(UserId user, ObjectId object) const;

  bool operator==(const FactorModel&) const = default;

private:
  double mu_;
  std::vector<double> user_bias_;
  std::vector<double> object_bias_;
  Matrix<double> user_factors_;
  Matrix<double> object_factors_;
};

struct FitResult {
  FactorModel model;
  /// Mean squared training error seen during each epoch.
  std::vector<double> epoch_loss;
};

/// SGD on observed entries. Ratings are sorted by (user, object) and then visited in a seeded
/// permutation each epoch, so (ratings, config) determine the model. The L2 step is applied
/// in proximal form, which stays stable for arbitrarily large regularization.
/// Throws FitError on empty input.
FitResult fit_mf_traced(std::span<const Rating> ratings, const FitConfig& config,
                        std::optional<ModelShape> shape = std::nullopt);
FactorModel fit_mf(std::span<const Rating> ratings, const FitConfig& config,
                   std::optional<ModelShape> shape = std::nullopt);
FactorModel fit_mf(const SparseAttentionRecords& records, const FitConfig& config,
                   std::optional<ModelShape> shape = std::nullopt);

std::vector<Rating> to_ratings(const SparseAttentionRecords& records);

/// Element-wise predict, in input order.
std::vector<double> predict_scene(const FactorModel& model, UserId user, std::span<const ObjectId> objects);

/// mu + (user mean - mu) + (object mean - mu), missing terms dropped, clamped to [1, 5].
class BaselineModel {
public:
  BaselineModel(double mu, std::vector<std::optional<double>> user_mean,
                std::vector<std::optional<double>> object_mean);

  double mu() const noexcept { return mu_; }
  std::optional<double> user_mean(UserId user) const;
  std::optional<double> object_mean(ObjectId object) const;
  double predict(UserId user, ObjectId object) const;

private:
  double mu_;
  std::vector<std::optional<double>> user_mean_;
  std::vector<std::optional<double>> object_mean_;
};

BaselineModel fit_baseline(const SparseAttentionRecords& records);

struct Metrics {
  double rmse = 0.0;
  double mae = 0.0;
  std::size_t count = 0;
};

using Predictor = std::function<double(UserId, ObjectId)>;
using Pair = std::pair<UserId, ObjectId>;

/// Throws EvaluationError on an empty mask.
Metrics evaluate(const Predictor& predictor, const Matrix<int>& truth, std::span<const Pair> mask);

/// Pairs present in `truth` but not observed in `records`, sampled per user (at most
/// `max_per_user`, all when negative) and returned in (user, object) order.
std::vector<Pair> holdout_mask(const SparseAttentionRecords& records, const Matrix<int>& truth,
                               std::uint64_t seed, int max_per_user = -1);

}  // namespace attnalloc
