#include "attnalloc/world_io.hpp"

#include <fstream>

#include "attnalloc/errors.hpp"

namespace attnalloc {

nlohmann::json world_to_json(const World& world) {
  nlohmann::json images = nlohmann::json::array();
  for (const auto& img : world.images()) {
    nlohmann::json comp = nlohmann::json::array();
    for (const auto& s : img.composition) comp.push_back({s.object, s.pixels});
    images.push_back({{"id", img.id}, {"group", img.group}, {"composition", std::move(comp)}});
  }
  return {
      {"version", kWorldVersion},
      {"num_users", world.num_users()},
      {"num_objects", world.num_objects()},
      {"num_groups", world.num_groups()},
      {"gaze_noise", world.gaze_noise()},
      {"gaze_seed", world.gaze_seed()},
      {"catalog", world.catalog().labels},
      {"images", std::move(images)},
      {"interest", world.interest().data()},
  };
}

World world_from_json(const nlohmann::json& doc, const std::string& source) {
  try {
    if (doc.at("version").get<std::string>() != kWorldVersion)
      throw ParseError(source, 1, "unsupported world version (expected " + std::string(kWorldVersion) + ")");
    ObjectCatalog catalog{doc.at("catalog").get<std::vector<std::string>>()};
    const int num_users = doc.at("num_users").get<int>();
    const int num_objects = doc.at("num_objects").get<int>();
    if (num_objects != catalog.size()) throw ParseError(source, 1, "num_objects does not match catalog");
    std::vector<SceneImage> images;
    for (const auto& j : doc.at("images")) {
      SceneImage img;
      img.id = j.at("id").get<int>();
      img.group = j.at("group").get<int>();
      for (const auto& pair : j.at("composition"))
        img.composition.push_back({pair.at(0).get<int>(), pair.at(1).get<std::int64_t>()});
      images.push_back(std::move(img));
    }
    auto values = doc.at("interest").get<std::vector<double>>();
    if (num_users < 1 || values.size() != static_cast<std::size_t>(num_users) * static_cast<std::size_t>(num_objects))
      throw ParseError(source, 1, "interest array has wrong length");
    return World(std::move(catalog), std::move(images), doc.at("num_groups").get<int>(),
                 Matrix<double>(num_users, num_objects, std::move(values)), doc.at("gaze_noise").get<double>(),
                 doc.at("gaze_seed").get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 1, e.what());
  }
}

void save_world(const World& world, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << world_to_json(world).dump(1) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

World load_world(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "': file not found or unreadable");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string(), 1, e.what());
  }
  return world_from_json(doc, path.string());
}

}  // namespace attnalloc
