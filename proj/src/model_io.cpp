#include "attnalloc/model_io.hpp"

#include <fstream>

#include "attnalloc/errors.hpp"

namespace attnalloc {

nlohmann::json model_to_json(const FactorModel& model) {
  return {
      {"version", kModelVersion},
      {"num_users", model.num_users()},
      {"num_objects", model.num_objects()},
      {"factors", model.factors()},
      {"mu", model.mu()},
      {"user_bias", model.user_bias()},
      {"object_bias", model.object_bias()},
      {"user_factors", model.user_factors().data()},
      {"object_factors", model.object_factors().data()},
  };
}

FactorModel model_from_json(const nlohmann::json& doc, const std::string& source) {
  try {
    if (doc.at("version").get<std::string>() != kModelVersion)
      throw ParseError(source, 1, "unsupported model version (expected " + std::string(kModelVersion) + ")");
    const int users = doc.at("num_users").get<int>();
    const int objects = doc.at("num_objects").get<int>();
    const int factors = doc.at("factors").get<int>();
    auto uf = doc.at("user_factors").get<std::vector<double>>();
    auto of = doc.at("object_factors").get<std::vector<double>>();
    if (users < 0 || objects < 0 || factors < 1 ||
        uf.size() != static_cast<std::size_t>(users) * static_cast<std::size_t>(factors) ||
        of.size() != static_cast<std::size_t>(objects) * static_cast<std::size_t>(factors))
      throw ParseError(source, 1, "factor matrix dimensions do not match header");
    return FactorModel(doc.at("mu").get<double>(), doc.at("user_bias").get<std::vector<double>>(),
                       doc.at("object_bias").get<std::vector<double>>(), Matrix<double>(users, factors, std::move(uf)),
                       Matrix<double>(objects, factors, std::move(of)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 1, e.what());
  }
}

void save_model(const FactorModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << model_to_json(model).dump(1) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

FactorModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "': file not found or unreadable");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string(), 1, e.what());
  }
  return model_from_json(doc, path.string());
}

}  // namespace attnalloc
