#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "attnalloc/matrix.hpp"
#include "attnalloc/random.hpp"

namespace attnalloc {

using UserId = int;
using ObjectId = int;
using ImageId = int;

inline constexpr std::int64_t kImageHeight = 360;
inline constexpr std::int64_t kImageWidth = 640;
inline constexpr std::int64_t kPixelBudget = kImageHeight * kImageWidth;
inline constexpr int kMinLevel = 1;
inline constexpr int kMaxLevel = 5;

struct ObjectCatalog {
  std::vector<std::string> labels;

  int size() const noexcept { return static_cast<int>(labels.size()); }
  /// Throws ConfigError on empty or duplicate labels.
  void validate() const;
  bool operator==(const ObjectCatalog&) const = default;
};

struct PixelShare {
  ObjectId object = 0;
  std::int64_t pixels = 0;
  bool operator==(const PixelShare&) const = default;
};

struct SceneImage {
  ImageId id = 0;
  int group = 0;
  std::vector<PixelShare> composition;
  bool operator==(const SceneImage&) const = default;
};

/// One occurrence of an object: the image it appears in and its pixel count there.
struct Occurrence {
  ImageId image = 0;
  std::int64_t pixels = 0;
};

struct WorldConfig {
  int num_users = 30;
  int num_objects = 96;
  int num_images = 1000;
  int num_groups = 5;
  int latent_rank = 6;
  /// Multiplicative interest noise half-width: interest *= U[1 - eta, 1 + eta].
  double interest_noise = 0.1;
  /// Per-occurrence gaze noise half-width; 0 makes gaze exactly proportional to pixels.
  double gaze_noise = 0.0;
  int min_objects_per_image = 3;
  int max_objects_per_image = 12;
  /// Frequency multiplier for the objects a group favours.
  double group_bias = 3.0;
  /// Zipf exponent of the base object frequency.
  double popularity_exponent = 2.5;
  /// interest = sigmoid(gain * latent_score + offset) before noise.
  double interest_gain = 2.0;
  double interest_offset = -2.0;

  void validate() const;
  bool operator==(const WorldConfig&) const = default;
};

/// Immutable synthetic ground truth. Safe to share across threads.
class World {
public:
  World(ObjectCatalog catalog, std::vector<SceneImage> images, int num_groups,
        Matrix<double> interest, double gaze_noise, std::uint64_t gaze_seed);

  int num_users() const noexcept { return interest_.rows(); }
  int num_objects() const noexcept { return catalog_.size(); }
  int num_images() const noexcept { return static_cast<int>(images_.size()); }
  int num_groups() const noexcept { return num_groups_; }
  double gaze_noise() const noexcept { return gaze_noise_; }
  std::uint64_t gaze_seed() const noexcept { return gaze_seed_; }

  const ObjectCatalog& catalog() const noexcept { return catalog_; }
  const std::vector<SceneImage>& images() const noexcept { return images_; }
  const SceneImage& image(ImageId id) const { return images_.at(static_cast<std::size_t>(id)); }
  const Matrix<double>& interest() const noexcept { return interest_; }

  /// Occurrences of an object, ordered by image id.
  std::span<const Occurrence> occurrences(ObjectId object) const;
  /// Image ids of a group, ascending.
  std::span<const ImageId> group_images(int group) const;

  /// Multiplicative gaze perturbation (1 + noise) for one occurrence; exactly 1 when gaze_noise is 0.
  double gaze_factor(UserId user, ImageId image, ObjectId object) const noexcept;

  bool operator==(const World& other) const;

private:
  ObjectCatalog catalog_;
  std::vector<SceneImage> images_;
  int num_groups_;
  Matrix<double> interest_;
  double gaze_noise_;
  std::uint64_t gaze_seed_;
  std::vector<std::vector<Occurrence>> by_object_;
  std::vector<std::vector<ImageId>> by_group_;
};

World generate_world(const WorldConfig& config, std::uint64_t seed);

/// (pixel count, gaze mass) of one occurrence.
struct GazeSample {
  double pixels = 0.0;
  double gaze = 0.0;
};

/// Total gaze mass over total pixels. Throws AbsentObjectError(-1) on an empty list.
double attention_ratio(std::span<const GazeSample> samples);

/// Attention of `user` to `object` over the images in `image_subset`.
/// Gaze mass of an occurrence is interest * pixels * gaze_factor.
double attention_value(const World& world, UserId user, std::span<const ImageId> image_subset,
                       ObjectId object);

struct ObjectValue {
  ObjectId object = 0;
  double value = 0.0;
};

struct ObjectLevel {
  ObjectId object = 0;
  int level = 0;
  bool operator==(const ObjectLevel&) const = default;
};

/// attention_value for every object present in the subset, ascending object id.
std::vector<ObjectValue> attention_values(const World& world, UserId user,
                                          std::span<const ImageId> image_subset);

/// Equal-frequency quintile binning of one user's values. Output keeps input order.
std::vector<ObjectLevel> quantize_levels(std::span<const ObjectValue> raw);

struct GroundTruth {
  Matrix<double> values;  // raw attention over all images
  Matrix<int> levels;     // per-user quintile levels of `values`
};

GroundTruth ground_truth(const World& world);
Matrix<int> ground_truth_levels(const World& world);

struct AttentionRecord {
  UserId user = 0;
  ObjectId object = 0;
  int level = 0;
  bool operator==(const AttentionRecord&) const = default;
};

/// Observed (user, object, level) triples, at most one per pair, ordered by (user, object).
class SparseAttentionRecords {
public:
  SparseAttentionRecords() = default;

  /// Throws ConfigError when the pair is already present or the level is outside 1..5.
  void insert(const AttentionRecord& record);
  void merge(const SparseAttentionRecords& other);

  bool contains(UserId user, ObjectId object) const;
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::vector<AttentionRecord> records() const;
  std::vector<AttentionRecord> for_user(UserId user) const;
  /// One past the largest user id / object id present (0 when empty).
  int user_extent() const noexcept;
  int object_extent() const noexcept;

  bool operator==(const SparseAttentionRecords&) const = default;

private:
  std::map<std::pair<UserId, ObjectId>, int> entries_;
};

/// Steps 1-3 of the sparse-history procedure: which services and images a user saw.
struct HistoryDraw {
  int services = 0;        // number of groups visited, uniform in {2,3,4}
  int retain_percent = 0;  // uniform integer in [30, 70]
  std::vector<int> groups;
  std::vector<ImageId> retained;  // ascending
  int selected_group_images = 0;  // images in the chosen groups before thinning
};

HistoryDraw draw_history(const World& world, Rng& rng);
/// Same as draw_history with steps 1 and 2 fixed.
HistoryDraw draw_history(const World& world, int services, int retain_percent, Rng& rng);

/// Steps 4-10: attention values over the retained images, quantized per user.
SparseAttentionRecords records_from_history(const World& world, UserId user, const HistoryDraw& draw);

struct SparseHistory {
  HistoryDraw draw;
  SparseAttentionRecords records;
};

/// Full procedure on the (seed, user) substream.
SparseHistory sparsify_history(const World& world, UserId user, std::uint64_t seed);
SparseAttentionRecords sparsify(const World& world, UserId user, std::uint64_t seed);
/// Every user's history merged into one record set.
SparseAttentionRecords sparsify_all(const World& world, std::uint64_t seed);

}  // namespace attnalloc
