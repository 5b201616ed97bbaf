#include "attnalloc/predict.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "attnalloc/errors.hpp"
#include "attnalloc/random.hpp"

namespace attnalloc {

namespace {

double clamp_level(double score) {
  return std::clamp(score, static_cast<double>(kMinLevel), static_cast<double>(kMaxLevel));
}

}  // namespace

void FitConfig::validate() const {
  if (factors < 1) throw ConfigError("factors must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(regularization >= 0.0)) throw ConfigError("regularization must be non-negative");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(init_scale > 0.0)) throw ConfigError("init_scale must be positive");
}

FactorModel::FactorModel(double mu, std::vector<double> user_bias, std::vector<double> object_bias,
                         Matrix<double> user_factors, Matrix<double> object_factors)
    : mu_(mu),
      user_bias_(std::move(user_bias)),
      object_bias_(std::move(object_bias)),
      user_factors_(std::move(user_factors)),
      object_factors_(std::move(object_factors)) {
  if (user_factors_.cols() < 1 || user_factors_.cols() != object_factors_.cols())
    throw ConfigError("factor matrices must share a positive latent dimension");
  if (user_bias_.size() != static_cast<std::size_t>(user_factors_.rows()) ||
      object_bias_.size() != static_cast<std::size_t>(object_factors_.rows()))
    throw ConfigError("bias lengths must match factor rows");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::isfinite(mu_) || !std::all_of(user_bias_.begin(), user_bias_.end(), finite) ||
      !std::all_of(object_bias_.begin(), object_bias_.end(), finite) ||
      !std::all_of(user_factors_.data().begin(), user_factors_.data().end(), finite) ||
      !std::all_of(object_factors_.data().begin(), object_factors_.data().end(), finite))
    throw ConfigError("model parameters must be finite");
}

FactorModel FactorModel::constant(ModelShape shape, int factors, double mu) {
  return FactorModel(mu, std::vector<double>(static_cast<std::size_t>(shape.num_users), 0.0),
                     std::vector<double>(static_cast<std::size_t>(shape.num_objects), 0.0),
                     Matrix<double>(shape.num_users, factors), Matrix<double>(shape.num_objects, factors));
}

double FactorModel::predict_raw(UserId user, ObjectId object) const {
  if (user < 0 || user >= num_users()) throw std::out_of_range("user id " + std::to_string(user) + " outside model");
  if (object < 0 || object >= num_objects())
    throw std::out_of_range("object id " + std::to_string(object) + " outside model");
  const auto p = user_factors_.row(user);
  const auto q = object_factors_.row(object);
  return mu_ + user_bias_[static_cast<std::size_t>(user)] + object_bias_[static_cast<std::size_t>(object)] +
         std::inner_product(p.begin(), p.end(), q.begin(), 0.0);
}

double FactorModel::predict(UserId user, ObjectId object) const { return clamp_level(predict_raw(user, object)); }

std::vector<Rating> to_ratings(const SparseAttentionRecords& records) {
  std::vector<Rating> out;
  out.reserve(records.size());
  for (const auto& r : records.records()) out.push_back({r.user, r.object, static_cast<double>(r.level)});
  return out;
}

FitResult fit_mf_traced(std::span<const Rating> ratings, const FitConfig& config, std::optional<ModelShape> shape) {
  config.validate();
  if (ratings.empty()) throw FitError("cannot fit a factor model to zero records");

  std::vector<Rating> data(ratings.begin(), ratings.end());
  std::sort(data.begin(), data.end(), [](const Rating& a, const Rating& b) {
    return a.user != b.user ? a.user < b.user : a.object < b.object;
  });
  ModelShape dims{0, 0};
  for (const auto& r : data) {
    if (r.user < 0 || r.object < 0) throw FitError("negative id in training data");
    if (!std::isfinite(r.value)) throw FitError("non-finite training target");
    dims.num_users = std::max(dims.num_users, r.user + 1);
    dims.num_objects = std::max(dims.num_objects, r.object + 1);
  }
  if (shape) {
    if (shape->num_users < dims.num_users || shape->num_objects < dims.num_objects)
      throw FitError("model shape smaller than the ids in the training data");
    dims = *shape;
  }

  double mu = 0.0;
  for (const auto& r : data) mu += r.value;
  mu /= static_cast<double>(data.size());

  const int f = config.factors;
  Rng rng(substream(config.seed, Stream::Fit));
  Matrix<double> user_factors(dims.num_users, f);
  Matrix<double> object_factors(dims.num_objects, f);
  for (double& v : user_factors.data()) v = rng.uniform(-0.05, 0.05) * config.init_scale;
  for (double& v : object_factors.data()) v = rng.uniform(-0.05, 0.05) * config.init_scale;
  std::vector<double> user_bias(static_cast<std::size_t>(dims.num_users), 0.0);
  std::vector<double> object_bias(static_cast<std::size_t>(dims.num_objects), 0.0);

  const double lr = config.learning_rate;
  const double shrink = 1.0 / (1.0 + lr * config.regularization);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> epoch_loss;
  epoch_loss.reserve(static_cast<std::size_t>(config.epochs));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss = 0.0;
    for (std::size_t idx : order) {
      const Rating& r = data[idx];
      auto p = user_factors.row(r.user);
      auto q = object_factors.row(r.object);
      double& bu = user_bias[static_cast<std::size_t>(r.user)];
      double& bo = object_bias[static_cast<std::size_t>(r.object)];
      const double err = r.value - (mu + bu + bo + std::inner_product(p.begin(), p.end(), q.begin(), 0.0));
      loss += err * err;
      bu = (bu + lr * err) * shrink;
      bo = (bo + lr * err) * shrink;
      for (int k = 0; k < f; ++k) {
        const auto sk = static_cast<std::size_t>(k);
        const double pk = p[sk];
        const double qk = q[sk];
        p[sk] = (pk + lr * err * qk) * shrink;
        q[sk] = (qk + lr * err * pk) * shrink;
      }
    }
    epoch_loss.push_back(loss / static_cast<double>(data.size()));
    if (!std::isfinite(epoch_loss.back())) throw FitError("training diverged; lower the learning rate");
  }

  return {FactorModel(mu, std::move(user_bias), std::move(object_bias), std::move(user_factors),
                      std::move(object_factors)),
          std::move(epoch_loss)};
}

FactorModel fit_mf(std::span<const Rating> ratings, const FitConfig& config, std::optional<ModelShape> shape) {
  return fit_mf_traced(ratings, config, shape).model;
}

FactorModel fit_mf(const SparseAttentionRecords& records, const FitConfig& config, std::optional<ModelShape> shape) {
  const auto ratings = to_ratings(records);
  return fit_mf(ratings, config, shape);
}

std::vector<double> predict_scene(const FactorModel& model, UserId user, std::span<const ObjectId> objects) {
  std::vector<double> weights;
  weights.reserve(objects.size());
  for (ObjectId o : objects) weights.push_back(model.predict(user, o));
  return weights;
}

BaselineModel::BaselineModel(double mu, std::vector<std::optional<double>> user_mean,
                             std::vector<std::optional<double>> object_mean)
    : mu_(mu), user_mean_(std::move(user_mean)), object_mean_(std::move(object_mean)) {}

std::optional<double> BaselineModel::user_mean(UserId user) const {
  if (user < 0 || static_cast<std::size_t>(user) >= user_mean_.size()) return std::nullopt;
  return user_mean_[static_cast<std::size_t>(user)];
}

std::optional<double> BaselineModel::object_mean(ObjectId object) const {
  if (object < 0 || static_cast<std::size_t>(object) >= object_mean_.size()) return std::nullopt;
  return object_mean_[static_cast<std::size_t>(object)];
}

double BaselineModel::predict(UserId user, ObjectId object) const {
  double score = mu_;
  if (auto m = user_mean(user)) score += *m - mu_;
  if (auto m = object_mean(object)) score += *m - mu_;
  return clamp_level(score);
}

BaselineModel fit_baseline(const SparseAttentionRecords& records) {
  if (records.empty()) throw FitError("cannot fit a baseline to zero records");
  const auto n_users = static_cast<std::size_t>(records.user_extent());
  const auto n_objects = static_cast<std::size_t>(records.object_extent());
  std::vector<double> user_sum(n_users, 0.0), object_sum(n_objects, 0.0);
  std::vector<int> user_count(n_users, 0), object_count(n_objects, 0);
  double total = 0.0;
  for (const auto& r : records.records()) {
    const auto u = static_cast<std::size_t>(r.user);
    const auto o = static_cast<std::size_t>(r.object);
    user_sum[u] += r.level;
    ++user_count[u];
    object_sum[o] += r.level;
    ++object_count[o];
    total += r.level;
  }
  auto means = [](const std::vector<double>& sum, const std::vector<int>& count) {
    std::vector<std::optional<double>> out(sum.size());
    for (std::size_t i = 0; i < sum.size(); ++i)
      if (count[i] > 0) out[i] = sum[i] / count[i];
    return out;
  };
  return BaselineModel(total / static_cast<double>(records.size()), means(user_sum, user_count),
                       means(object_sum, object_count));
}

Metrics evaluate(const Predictor& predictor, const Matrix<int>& truth, std::span<const Pair> mask) {
  if (mask.empty()) throw EvaluationError("evaluation mask is empty");
  double sq = 0.0;
  double abs = 0.0;
  for (const auto& [u, o] : mask) {
    if (u < 0 || u >= truth.rows() || o < 0 || o >= truth.cols())
      throw EvaluationError("mask pair outside the ground-truth matrix");
    const double err = predictor(u, o) - static_cast<double>(truth(u, o));
    sq += err * err;
    abs += std::abs(err);
  }
  const auto n = static_cast<double>(mask.size());
  return {std::sqrt(sq / n), abs / n, mask.size()};
}

std::vector<Pair> holdout_mask(const SparseAttentionRecords& records, const Matrix<int>& truth, std::uint64_t seed,
                               int max_per_user) {
  std::vector<Pair> mask;
  for (UserId u = 0; u < truth.rows(); ++u) {
    std::vector<ObjectId> candidates;
    for (ObjectId o = 0; o < truth.cols(); ++o)
      if (!records.contains(u, o)) candidates.push_back(o);
    if (max_per_user >= 0 && static_cast<int>(candidates.size()) > max_per_user) {
      Rng rng(substream(seed, Stream::Holdout, static_cast<std::uint64_t>(u)));
      rng.shuffle(candidates);
      candidates.resize(static_cast<std::size_t>(max_per_user));
      std::sort(candidates.begin(), candidates.end());
    }
    for (ObjectId o : candidates) mask.emplace_back(u, o);
  }
  return mask;
}

}  // namespace attnalloc
