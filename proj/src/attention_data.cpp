#include "attnalloc/attention_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "attnalloc/errors.hpp"

namespace attnalloc {

void ObjectCatalog::validate() const {
  if (labels.empty()) throw ConfigError("object catalog is empty");
  std::set<std::string> seen;
  for (const auto& label : labels) {
    if (label.empty()) throw ConfigError("object catalog contains an empty label");
    if (!seen.insert(label).second) throw ConfigError("duplicate object label '" + label + "'");
  }
}

void WorldConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(num_users >= 1, "num_users must be positive");
  require(num_objects >= 1, "num_objects must be positive");
  require(num_images >= 1, "num_images must be positive");
  require(num_groups >= 1, "num_groups must be positive");
  require(num_groups <= num_images, "num_groups cannot exceed num_images");
  require(latent_rank >= 1, "latent_rank must be at least 1");
  require(interest_noise >= 0.0 && interest_noise < 1.0, "interest_noise must lie in [0, 1)");
  require(gaze_noise >= 0.0 && gaze_noise < 1.0, "gaze_noise must lie in [0, 1)");
  require(min_objects_per_image >= 1, "min_objects_per_image must be positive");
  require(max_objects_per_image >= min_objects_per_image,
          "max_objects_per_image must be >= min_objects_per_image");
  require(group_bias > 0.0, "group_bias must be positive");
  require(popularity_exponent >= 0.0, "popularity_exponent must be non-negative");
  require(std::isfinite(interest_gain) && std::isfinite(interest_offset),
          "interest_gain and interest_offset must be finite");
}

World::World(ObjectCatalog catalog, std::vector<SceneImage> images, int num_groups,
             Matrix<double> interest, double gaze_noise, std::uint64_t gaze_seed)
    : catalog_(std::move(catalog)),
      images_(std::move(images)),
      num_groups_(num_groups),
      interest_(std::move(interest)),
      gaze_noise_(gaze_noise),
      gaze_seed_(gaze_seed) {
  catalog_.validate();
  const int n_obj = catalog_.size();
  if (num_groups_ < 1) throw ConfigError("world needs at least one group");
  if (images_.empty()) throw ConfigError("world has no images");
  if (interest_.rows() < 1 || interest_.cols() != n_obj)
    throw ConfigError("interest matrix must be num_users x num_objects");
  if (!(gaze_noise_ >= 0.0 && gaze_noise_ < 1.0)) throw ConfigError("gaze_noise must lie in [0, 1)");
  for (double v : interest_.data()) {
    if (!(v > 0.0 && v <= 1.0)) throw ConfigError("interest entries must lie in (0, 1]");
  }

  by_object_.assign(static_cast<std::size_t>(n_obj), {});
  by_group_.assign(static_cast<std::size_t>(num_groups_), {});
  for (std::size_t i = 0; i < images_.size(); ++i) {
    const auto& img = images_[i];
    const std::string where = "image " + std::to_string(i);
    if (img.id != static_cast<ImageId>(i)) throw ConfigError(where + ": image ids must be 0..n-1 in order");
    if (img.group < 0 || img.group >= num_groups_) throw ConfigError(where + ": group out of range");
    if (img.composition.empty()) throw ConfigError(where + ": no objects");
    std::int64_t total = 0;
    std::set<ObjectId> seen;
    for (const auto& share : img.composition) {
      if (share.object < 0 || share.object >= n_obj) throw ConfigError(where + ": object id out of range");
      if (!seen.insert(share.object).second) throw ConfigError(where + ": duplicate object");
      if (share.pixels < 1) throw ConfigError(where + ": pixel count must be positive");
      total += share.pixels;
      by_object_[static_cast<std::size_t>(share.object)].push_back({img.id, share.pixels});
    }
    if (total > kPixelBudget) throw ConfigError(where + ": pixel counts exceed 360x640");
    by_group_[static_cast<std::size_t>(img.group)].push_back(img.id);
  }
  for (int o = 0; o < n_obj; ++o) {
    if (by_object_[static_cast<std::size_t>(o)].empty())
      throw ConfigError("object " + std::to_string(o) + " appears in no image");
  }
}

std::span<const Occurrence> World::occurrences(ObjectId object) const {
  return by_object_.at(static_cast<std::size_t>(object));
}

std::span<const ImageId> World::group_images(int group) const {
  return by_group_.at(static_cast<std::size_t>(group));
}

double World::gaze_factor(UserId user, ImageId image, ObjectId object) const noexcept {
  if (gaze_noise_ == 0.0) return 1.0;
  std::uint64_t h = mix64(gaze_seed_ ^ static_cast<std::uint64_t>(user));
  h = mix64(h ^ static_cast<std::uint64_t>(image));
  h = mix64(h ^ static_cast<std::uint64_t>(object));
  return 1.0 + gaze_noise_ * (2.0 * to_unit(h) - 1.0);
}

bool World::operator==(const World& other) const {
  return catalog_ == other.catalog_ && images_ == other.images_ && num_groups_ == other.num_groups_ &&
         interest_ == other.interest_ && gaze_noise_ == other.gaze_noise_ && gaze_seed_ == other.gaze_seed_;
}

namespace {

std::string object_label(int index, int count) {
  const int width = static_cast<int>(std::to_string(std::max(count - 1, 0)).size());
  std::string digits = std::to_string(index);
  return "object_" + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(digits.size()))), '0') +
         digits;
}

std::int64_t composition_pixels(const SceneImage& img) {
  std::int64_t total = 0;
  for (const auto& s : img.composition) total += s.pixels;
  return total;
}

}  // namespace

World generate_world(const WorldConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(substream(seed, Stream::World));
  const int n_obj = config.num_objects;
  const int n_img = config.num_images;
  const int n_grp = config.num_groups;

  ObjectCatalog catalog;
  catalog.labels.reserve(static_cast<std::size_t>(n_obj));
  for (int o = 0; o < n_obj; ++o) catalog.labels.push_back(object_label(o, n_obj));

  // Disjoint favoured subsets, one per group.
  std::vector<int> order(static_cast<std::size_t>(n_obj));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<int> favoured_by(static_cast<std::size_t>(n_obj));
  for (int i = 0; i < n_obj; ++i) favoured_by[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i % n_grp;

  // Zipf base frequency over a random ranking.
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<double> popularity(static_cast<std::size_t>(n_obj));
  for (int rank = 0; rank < n_obj; ++rank)
    popularity[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])] =
        1.0 / std::pow(static_cast<double>(rank + 1), config.popularity_exponent);

  std::vector<SceneImage> images;
  images.reserve(static_cast<std::size_t>(n_img));
  std::vector<double> weights(static_cast<std::size_t>(n_obj));
  const int max_k = std::min(config.max_objects_per_image, n_obj);
  const int min_k = std::min(config.min_objects_per_image, max_k);
  for (int i = 0; i < n_img; ++i) {
    SceneImage img;
    img.id = i;
    img.group = static_cast<int>(static_cast<std::int64_t>(i) * n_grp / n_img);
    for (int o = 0; o < n_obj; ++o) {
      const auto so = static_cast<std::size_t>(o);
      weights[so] = popularity[so] * (favoured_by[so] == img.group ? config.group_bias : 1.0);
    }
    const int k = static_cast<int>(rng.uniform_int(min_k, max_k));
    auto picked = rng.weighted_sample_without_replacement(weights, k);
    std::sort(picked.begin(), picked.end());
    const double share = static_cast<double>(kPixelBudget / k);
    for (int object : picked) {
      const auto pixels = static_cast<std::int64_t>(std::floor(rng.uniform(0.05, 0.9) * share));
      img.composition.push_back({object, std::max<std::int64_t>(1, pixels)});
    }
    images.push_back(std::move(img));
  }

  // Every object must appear somewhere: place stragglers into an image of their favoured group.
  std::vector<char> present(static_cast<std::size_t>(n_obj), 0);
  for (const auto& img : images)
    for (const auto& s : img.composition) present[static_cast<std::size_t>(s.object)] = 1;
  std::vector<std::vector<ImageId>> group_members(static_cast<std::size_t>(n_grp));
  for (const auto& img : images) group_members[static_cast<std::size_t>(img.group)].push_back(img.id);
  for (int o = 0; o < n_obj; ++o) {
    if (present[static_cast<std::size_t>(o)]) continue;
    const auto& members = group_members[static_cast<std::size_t>(favoured_by[static_cast<std::size_t>(o)])];
    const auto& pool = members.empty() ? group_members[0] : members;
    for (;;) {
      auto& img = images[static_cast<std::size_t>(
          pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))])];
      const std::int64_t free = kPixelBudget - composition_pixels(img);
      if (free < 1) continue;
      const auto pixels = static_cast<std::int64_t>(std::floor(rng.uniform(0.05, 0.5) * static_cast<double>(free)));
      PixelShare share{o, std::clamp<std::int64_t>(pixels, 1, free)};
      img.composition.insert(std::upper_bound(img.composition.begin(), img.composition.end(), share,
                                              [](const PixelShare& a, const PixelShare& b) { return a.object < b.object; }),
                             share);
      break;
    }
  }

  // Low-rank interest squashed into (0, 1], then multiplicative noise.
  const int rank = config.latent_rank;
  Matrix<double> user_latent(config.num_users, rank);
  Matrix<double> object_latent(n_obj, rank);
  for (double& v : user_latent.data()) v = rng.normal();
  for (double& v : object_latent.data()) v = rng.normal();
  Matrix<double> interest(config.num_users, n_obj);
  const double norm = 1.0 / std::sqrt(static_cast<double>(rank));
  for (int u = 0; u < config.num_users; ++u) {
    for (int o = 0; o < n_obj; ++o) {
      double score = 0.0;
      for (int r = 0; r < rank; ++r) score += user_latent(u, r) * object_latent(o, r);
      const double logit = config.interest_gain * score * norm + config.interest_offset;
      const double clean = 1.0 / (1.0 + std::exp(-logit));
      const double noisy = clean * rng.uniform(1.0 - config.interest_noise, 1.0 + config.interest_noise);
      interest(u, o) = std::clamp(noisy, 1e-6, 1.0);
    }
  }

  return World(std::move(catalog), std::move(images), n_grp, std::move(interest), config.gaze_noise,
               substream(seed, Stream::GazeNoise));
}

double attention_ratio(std::span<const GazeSample> samples) {
  if (samples.empty()) throw AbsentObjectError(-1);
  double gaze = 0.0;
  double pixels = 0.0;
  for (const auto& s : samples) {
    gaze += s.gaze;
    pixels += s.pixels;
  }
  return gaze / pixels;
}

namespace {

std::vector<ImageId> normalized_subset(const World& world, std::span<const ImageId> subset) {
  std::vector<ImageId> ids(subset.begin(), subset.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (ImageId id : ids) {
    if (id < 0 || id >= world.num_images()) throw ConfigError("image id " + std::to_string(id) + " out of range");
  }
  return ids;
}

// Gaze mass is interest * pixels * factor; the interest term is pulled out of the
// ratio so that a noise-free subset returns the interest value bit-exactly.
struct Accumulator {
  double weighted_pixels = 0.0;
  double pixels = 0.0;
};

}  // namespace

double attention_value(const World& world, UserId user, std::span<const ImageId> image_subset, ObjectId object) {
  if (user < 0 || user >= world.num_users()) throw ConfigError("user id out of range");
  if (object < 0 || object >= world.num_objects()) throw ConfigError("object id out of range");
  const auto ids = normalized_subset(world, image_subset);
  std::vector<GazeSample> samples;
  for (const auto& occ : world.occurrences(object)) {
    if (!std::binary_search(ids.begin(), ids.end(), occ.image)) continue;
    const auto p = static_cast<double>(occ.pixels);
    samples.push_back({p, p * world.gaze_factor(user, occ.image, object)});
  }
  if (samples.empty()) throw AbsentObjectError(object);
  return world.interest()(user, object) * attention_ratio(samples);
}

std::vector<ObjectValue> attention_values(const World& world, UserId user, std::span<const ImageId> image_subset) {
  if (user < 0 || user >= world.num_users()) throw ConfigError("user id out of range");
  const auto ids = normalized_subset(world, image_subset);
  std::vector<Accumulator> acc(static_cast<std::size_t>(world.num_objects()));
  for (ImageId id : ids) {
    for (const auto& share : world.image(id).composition) {
      auto& a = acc[static_cast<std::size_t>(share.object)];
      const auto p = static_cast<double>(share.pixels);
      a.weighted_pixels += p * world.gaze_factor(user, id, share.object);
      a.pixels += p;
    }
  }
  std::vector<ObjectValue> out;
  for (int o = 0; o < world.num_objects(); ++o) {
    const auto& a = acc[static_cast<std::size_t>(o)];
    if (a.pixels > 0.0) out.push_back({o, world.interest()(user, o) * (a.weighted_pixels / a.pixels)});
  }
  return out;
}

std::vector<ObjectLevel> quantize_levels(std::span<const ObjectValue> raw) {
  std::vector<ObjectLevel> out(raw.size());
  if (raw.empty()) return out;
  const std::size_t n = raw.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (raw[a].value != raw[b].value) return raw[a].value < raw[b].value;
    return raw[a].object < raw[b].object;
  });
  std::size_t distinct = 1;
  for (std::size_t i = 1; i < n; ++i)
    if (raw[order[i]].value != raw[order[i - 1]].value) ++distinct;

  const auto levels = static_cast<std::size_t>(kMaxLevel - kMinLevel + 1);
  std::size_t dense = 0;
  for (std::size_t rank = 0; rank < n; ++rank) {
    const std::size_t idx = order[rank];
    if (rank > 0 && raw[idx].value != raw[order[rank - 1]].value) ++dense;
    int level;
    if (distinct == 1) {
      level = 3;
    } else if (distinct < levels) {
      // too few distinct values for quintiles: spread dense ranks over 1..5, rounded half up
      level = kMinLevel + static_cast<int>((8 * dense + (distinct - 1)) / (2 * (distinct - 1)));
    } else {
      level = kMinLevel + static_cast<int>(levels * rank / n);
    }
    out[idx] = {raw[idx].object, level};
  }
  return out;
}

GroundTruth ground_truth(const World& world) {
  const int n_users = world.num_users();
  const int n_obj = world.num_objects();
  std::vector<ImageId> all(static_cast<std::size_t>(world.num_images()));
  std::iota(all.begin(), all.end(), 0);
  GroundTruth truth{Matrix<double>(n_users, n_obj), Matrix<int>(n_users, n_obj)};
  for (int u = 0; u < n_users; ++u) {
    const auto values = attention_values(world, u, all);
    for (const auto& v : values) truth.values(u, v.object) = v.value;
    for (const auto& l : quantize_levels(values)) truth.levels(u, l.object) = l.level;
  }
  return truth;
}

Matrix<int> ground_truth_levels(const World& world) { return ground_truth(world).levels; }

void SparseAttentionRecords::insert(const AttentionRecord& record) {
  if (record.level < kMinLevel || record.level > kMaxLevel)
    throw ConfigError("attention level " + std::to_string(record.level) + " outside 1..5");
  if (record.user < 0 || record.object < 0) throw ConfigError("negative user or object id");
  if (!entries_.emplace(std::pair{record.user, record.object}, record.level).second)
    throw ConfigError("duplicate record for user " + std::to_string(record.user) + ", object " +
                      std::to_string(record.object));
}

void SparseAttentionRecords::merge(const SparseAttentionRecords& other) {
  for (const auto& r : other.records()) insert(r);
}

bool SparseAttentionRecords::contains(UserId user, ObjectId object) const {
  return entries_.contains({user, object});
}

std::vector<AttentionRecord> SparseAttentionRecords::records() const {
  std::vector<AttentionRecord> out;
  out.reserve(entries_.size());
  for (const auto& [key, level] : entries_) out.push_back({key.first, key.second, level});
  return out;
}

std::vector<AttentionRecord> SparseAttentionRecords::for_user(UserId user) const {
  std::vector<AttentionRecord> out;
  for (auto it = entries_.lower_bound({user, 0}); it != entries_.end() && it->first.first == user; ++it)
    out.push_back({user, it->first.second, it->second});
  return out;
}

int SparseAttentionRecords::user_extent() const noexcept {
  return entries_.empty() ? 0 : entries_.rbegin()->first.first + 1;
}

int SparseAttentionRecords::object_extent() const noexcept {
  int extent = 0;
  for (const auto& entry : entries_) extent = std::max(extent, entry.first.second + 1);
  return extent;
}

HistoryDraw draw_history(const World& world, int services, int retain_percent, Rng& rng) {
  if (world.num_groups() < 2) throw ConfigError("sparse history needs at least two groups");
  if (services < 1) throw ConfigError("service count must be positive");
  if (retain_percent < 0 || retain_percent > 100) throw ConfigError("retain percent must lie in [0, 100]");
  HistoryDraw draw;
  draw.services = std::min(services, world.num_groups());
  draw.retain_percent = retain_percent;
  draw.groups = rng.sample_without_replacement(world.num_groups(), draw.services);
  std::sort(draw.groups.begin(), draw.groups.end());
  for (int g : draw.groups) {
    const auto members = world.group_images(g);
    const int size = static_cast<int>(members.size());
    draw.selected_group_images += size;
    int keep = (size * retain_percent + 50) / 100;
    if (size > 0 && retain_percent > 0) keep = std::max(keep, 1);
    for (int idx : rng.sample_without_replacement(size, keep))
      draw.retained.push_back(members[static_cast<std::size_t>(idx)]);
  }
  std::sort(draw.retained.begin(), draw.retained.end());
  return draw;
}

HistoryDraw draw_history(const World& world, Rng& rng) {
  if (world.num_groups() < 2) throw ConfigError("sparse history needs at least two groups");
  const int services = static_cast<int>(rng.uniform_int(2, 4));
  const int retain_percent = static_cast<int>(rng.uniform_int(30, 70));
  return draw_history(world, services, retain_percent, rng);
}

SparseAttentionRecords records_from_history(const World& world, UserId user, const HistoryDraw& draw) {
  SparseAttentionRecords records;
  const auto values = attention_values(world, user, draw.retained);
  for (const auto& l : quantize_levels(values)) records.insert({user, l.object, l.level});
  return records;
}

SparseHistory sparsify_history(const World& world, UserId user, std::uint64_t seed) {
  if (user < 0 || user >= world.num_users()) throw ConfigError("user id out of range");
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(substream(seed, Stream::Sparsify, (attempt << 32) | static_cast<std::uint64_t>(user)));
    auto draw = draw_history(world, rng);
    if (draw.retained.empty()) continue;
    auto records = records_from_history(world, user, draw);
    return {std::move(draw), std::move(records)};
  }
}

SparseAttentionRecords sparsify(const World& world, UserId user, std::uint64_t seed) {
  return sparsify_history(world, user, seed).records;
}

SparseAttentionRecords sparsify_all(const World& world, std::uint64_t seed) {
  SparseAttentionRecords all;
  for (UserId u = 0; u < world.num_users(); ++u) all.merge(sparsify(world, u, seed));
  return all;
}

}  // namespace attnalloc
