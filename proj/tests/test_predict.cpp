#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "attnalloc/errors.hpp"
#include "attnalloc/model_io.hpp"
#include "attnalloc/predict.hpp"

using namespace attnalloc;

namespace {

struct Split {
  std::vector<Rating> train;
  std::vector<Rating> test;
};

// 1 + a_u * b_o with a, b in [0, 2]: a rank-1 pattern on top of a constant.
Split rank1_split(std::uint64_t seed, int users, int objects, double observed) {
  Rng rng(seed);
  std::vector<double> a(static_cast<std::size_t>(users)), b(static_cast<std::size_t>(objects));
  for (double& v : a) v = rng.uniform(0.0, 2.0);
  for (double& v : b) v = rng.uniform(0.0, 2.0);
  Split split;
  for (int u = 0; u < users; ++u)
    for (int o = 0; o < objects; ++o) {
      const Rating r{u, o, 1.0 + a[static_cast<std::size_t>(u)] * b[static_cast<std::size_t>(o)]};
      (rng.uniform01() < observed ? split.train : split.test).push_back(r);
    }
  return split;
}

double rmse_of(const std::vector<Rating>& test, const std::function<double(const Rating&)>& predict) {
  double sq = 0.0;
  for (const auto& r : test) {
    const double e = predict(r) - r.value;
    sq += e * e;
  }
  return std::sqrt(sq / static_cast<double>(test.size()));
}

double frobenius(const Matrix<double>& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("constant records are learned") {
  std::vector<Rating> ratings;
  for (int u = 0; u < 10; ++u)
    for (int o = 0; o < 12; o += 1 + u % 3) ratings.push_back({u, o, 3.0});
  FitConfig cfg;
  cfg.regularization = 0.0;
  const auto model = fit_mf(ratings, cfg);
  for (const auto& r : ratings) CHECK(std::abs(model.predict(r.user, r.object) - 3.0) < 0.1);
}

TEST_CASE("rank-1 matrix beats the global mean on held-out entries") {
  const Split split = rank1_split(31, 40, 50, 0.6);
  double mean = 0.0;
  for (const auto& r : split.train) mean += r.value;
  mean /= static_cast<double>(split.train.size());
  const double baseline = rmse_of(split.test, [&](const Rating&) { return mean; });

  FitConfig cfg;
  cfg.factors = 2;
  const auto model = fit_mf(split.train, cfg, ModelShape{40, 50});
  const double mf = rmse_of(split.test, [&](const Rating& r) { return model.predict_raw(r.user, r.object); });
  CHECK(mf < baseline);
  CHECK(mf < 0.5 * baseline);
}

TEST_CASE("fitting is deterministic") {
  const Split split = rank1_split(2, 15, 20, 0.6);
  FitConfig cfg;
  cfg.seed = 99;
  CHECK(fit_mf(split.train, cfg) == fit_mf(split.train, cfg));
  // input order does not matter
  auto reversed = split.train;
  std::reverse(reversed.begin(), reversed.end());
  CHECK(fit_mf(reversed, cfg) == fit_mf(split.train, cfg));
  cfg.seed = 100;
  const auto other = fit_mf(split.train, cfg);
  cfg.seed = 99;
  CHECK_FALSE(other == fit_mf(split.train, cfg));
}

TEST_CASE("fit rejects empty input and bad config") {
  CHECK_THROWS_AS(fit_mf(std::vector<Rating>{}, FitConfig{}), FitError);
  CHECK_THROWS_AS(fit_mf(SparseAttentionRecords{}, FitConfig{}), FitError);
  FitConfig cfg;
  cfg.epochs = 0;
  CHECK_THROWS_AS(fit_mf(std::vector<Rating>{{0, 0, 3.0}}, cfg), ConfigError);
  CHECK_THROWS_AS(fit_mf(std::vector<Rating>{{0, 5, 3.0}}, FitConfig{}, ModelShape{1, 3}), FitError);
}

TEST_CASE("prediction clamps to the level range") {
  const auto flat = FactorModel::constant({3, 4}, 2, 3.0);
  for (int u = 0; u < 3; ++u)
    for (int o = 0; o < 4; ++o) CHECK(flat.predict(u, o) == 3.0);

  CHECK(FactorModel::constant({1, 1}, 1, 7.2).predict(0, 0) == 5.0);
  CHECK(FactorModel::constant({1, 1}, 1, -0.4).predict(0, 0) == 1.0);
  CHECK(FactorModel::constant({1, 1}, 1, 7.2).predict_raw(0, 0) == 7.2);

  CHECK_THROWS_AS(flat.predict(3, 0), std::out_of_range);
  CHECK_THROWS_AS(flat.predict(0, -1), std::out_of_range);
}

TEST_CASE("model parameters must be finite and consistent") {
  CHECK_THROWS_AS(FactorModel(NAN, {0.0}, {0.0}, Matrix<double>(1, 1), Matrix<double>(1, 1)), ConfigError);
  CHECK_THROWS_AS(FactorModel(3.0, {0.0}, {0.0}, Matrix<double>(1, 2), Matrix<double>(1, 1)), ConfigError);
  CHECK_THROWS_AS(FactorModel(3.0, {0.0, 0.0}, {0.0}, Matrix<double>(1, 1), Matrix<double>(1, 1)), ConfigError);
}

TEST_CASE("predict_scene is element-wise") {
  const World world = generate_world(WorldConfig{}, 7);
  const auto model = fit_mf(sparsify_all(world, 7), FitConfig{}, ModelShape{30, 96});
  const std::vector<ObjectId> one{17};
  CHECK(predict_scene(model, 2, one) == std::vector<double>{model.predict(2, 17)});
  const std::vector<ObjectId> dup{5, 5};
  const auto w = predict_scene(model, 2, dup);
  CHECK(w[0] == w[1]);

  std::vector<ObjectId> scene(56);
  std::iota(scene.begin(), scene.end(), 20);
  const auto weights = predict_scene(model, 4, scene);
  CHECK(weights.size() == 56);
  for (std::size_t i = 0; i < scene.size(); ++i) {
    CHECK(weights[i] >= 1.0);
    CHECK(weights[i] <= 5.0);
    CHECK(weights[i] == model.predict(4, scene[i]));
  }
}

TEST_CASE("evaluate computes RMSE and MAE") {
  Matrix<int> truth(2, 3, 5);
  std::vector<Pair> mask{{0, 0}, {0, 2}, {1, 1}};
  const auto perfect = evaluate([&](UserId u, ObjectId o) { return static_cast<double>(truth(u, o)); }, truth, mask);
  CHECK(perfect.rmse == 0.0);
  CHECK(perfect.mae == 0.0);
  CHECK(perfect.count == 3);

  const auto three = evaluate([](UserId, ObjectId) { return 3.0; }, truth, mask);
  CHECK(three.rmse == 2.0);
  CHECK(three.mae == 2.0);

  truth(0, 0) = 1;
  const auto mixed = evaluate([](UserId, ObjectId) { return 3.0; }, truth, mask);
  CHECK(mixed.rmse == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(mixed.mae == doctest::Approx(2.0).epsilon(1e-15));

  CHECK_THROWS_AS(evaluate([](UserId, ObjectId) { return 3.0; }, truth, std::vector<Pair>{}), EvaluationError);
  CHECK_THROWS_AS(evaluate([](UserId, ObjectId) { return 3.0; }, truth, std::vector<Pair>{{2, 0}}), EvaluationError);
}

TEST_CASE("baseline examples") {
  SparseAttentionRecords single;
  single.insert({1, 2, 4});
  const auto b1 = fit_baseline(single);
  CHECK(b1.mu() == 4.0);
  CHECK(b1.predict(0, 0) == 4.0);
  CHECK(b1.predict(1, 2) == 4.0);
  CHECK(b1.predict(9, 9) == 4.0);

  SparseAttentionRecords two;
  two.insert({0, 0, 1});
  two.insert({0, 1, 5});
  const auto b2 = fit_baseline(two);
  CHECK(b2.user_mean(0) == 3.0);
  CHECK(b2.object_mean(1) == 5.0);
  CHECK(b2.predict(7, 7) == b2.mu());
  // mu + (3 - 3) + (5 - 3)
  CHECK(b2.predict(0, 1) == 5.0);

  CHECK_THROWS_AS(fit_baseline(SparseAttentionRecords{}), FitError);
}

TEST_CASE("predictions shift with the labels") {
  const Split split = rank1_split(8, 20, 25, 0.6);
  auto shifted = split.train;
  for (auto& r : shifted) r.value += 1.5;
  FitConfig cfg;
  cfg.seed = 3;
  const auto base = fit_mf(split.train, cfg, ModelShape{20, 25});
  const auto moved = fit_mf(shifted, cfg, ModelShape{20, 25});
  for (int u = 0; u < 20; ++u)
    for (int o = 0; o < 25; ++o) CHECK(std::abs(moved.predict_raw(u, o) - base.predict_raw(u, o) - 1.5) < 0.05);
}

TEST_CASE("heavy regularization collapses the factors") {
  const Split split = rank1_split(5, 20, 25, 0.6);
  FitConfig cfg;
  cfg.regularization = 1e6;
  const auto model = fit_mf(split.train, cfg);
  CHECK(frobenius(model.user_factors()) < 1e-3);
  CHECK(frobenius(model.object_factors()) < 1e-3);
  for (double b : model.user_bias()) CHECK(std::abs(b) < 1e-3);
  double mean = 0.0;
  for (const auto& r : split.train) mean += r.value;
  mean /= static_cast<double>(split.train.size());
  CHECK(model.predict_raw(0, 0) == doctest::Approx(mean).epsilon(1e-3));
}

TEST_CASE("training loss decreases up to SGD noise") {
  const World world = generate_world(WorldConfig{}, 7);
  const auto ratings = to_ratings(sparsify_all(world, 7));
  const auto result = fit_mf_traced(ratings, FitConfig{}, ModelShape{30, 96});
  const auto& loss = result.epoch_loss;
  REQUIRE(loss.size() == 200);
  auto window = [&](std::size_t from) {
    double s = 0.0;
    for (std::size_t i = from; i < from + 10; ++i) s += loss[i];
    return s / 10.0;
  };
  for (std::size_t from = 10; from + 10 <= loss.size(); from += 10) CHECK(window(from) <= window(from - 10) * 1.01);
  CHECK(loss.back() < 0.5 * loss.front());
}

TEST_CASE("model file round-trips exactly") {
  const World world = generate_world(WorldConfig{}, 1);
  const auto model = fit_mf(sparsify_all(world, 1), FitConfig{}, ModelShape{30, 96});
  const auto path = std::filesystem::temp_directory_path() / "attnalloc_model_roundtrip.json";
  save_model(model, path);
  CHECK(load_model(path) == model);
  std::filesystem::remove(path);

  auto doc = model_to_json(model);
  CHECK(doc["version"] == "attn-mf/1");
  doc["mu"] = "three";
  CHECK_THROWS_AS(model_from_json(doc), ParseError);
}

TEST_CASE("holdout mask excludes observed pairs") {
  const World world = generate_world(WorldConfig{}, 7);
  const auto records = sparsify_all(world, 7);
  const auto truth = ground_truth_levels(world);
  const auto all = holdout_mask(records, truth, 7);
  CHECK(all.size() == 30u * 96u - records.size());
  const auto capped = holdout_mask(records, truth, 7, 5);
  CHECK(capped == holdout_mask(records, truth, 7, 5));
  for (const auto& [u, o] : capped) CHECK_FALSE(records.contains(u, o));
  CHECK(std::is_sorted(capped.begin(), capped.end()));
}

TEST_CASE("MF is no worse than the baseline on a noise-free world with 60 percent observed") {
  WorldConfig wc;
  wc.interest_noise = 0.0;
  double mf_total = 0.0, base_total = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const World world = generate_world(wc, seed);
    const auto truth = ground_truth_levels(world);
    Rng rng(substream(seed, Stream::Holdout, 1000));
    SparseAttentionRecords observed;
    for (int u = 0; u < truth.rows(); ++u)
      for (int o : rng.sample_without_replacement(truth.cols(), truth.cols() * 6 / 10)) observed.insert({u, o, truth(u, o)});
    const auto mask = holdout_mask(observed, truth, seed);
    FitConfig fc;
    fc.seed = seed;
    const auto model = fit_mf(observed, fc, ModelShape{truth.rows(), truth.cols()});
    const auto baseline = fit_baseline(observed);
    mf_total += evaluate([&](UserId u, ObjectId o) { return model.predict(u, o); }, truth, mask).rmse;
    base_total += evaluate([&](UserId u, ObjectId o) { return baseline.predict(u, o); }, truth, mask).rmse;
  }
  MESSAGE("mean RMSE mf=" << mf_total / 10 << " baseline=" << base_total / 10);
  CHECK(mf_total <= base_total);
}
