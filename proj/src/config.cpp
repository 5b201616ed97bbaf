#include "attnalloc/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "attnalloc/errors.hpp"
#include "attnalloc/format.hpp"

namespace attnalloc {

namespace {

namespace pt = boost::property_tree;

// One entry per config key: how to read it from text and how to print it.
struct Field {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    T value{};
    if constexpr (std::is_same_v<T, double>) {
      value = std::stod(text, &used);
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!text.empty() && text.front() == '-') throw std::invalid_argument("negative");
      value = std::stoull(text, &used);
    } else if constexpr (std::is_same_v<T, bool>) {
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw std::invalid_argument("bool");
    } else {
      value = static_cast<T>(std::stoi(text, &used));
    }
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw ConfigError("invalid value '" + text + "' for key '" + key + "'");
  }
}

template <typename T>
std::string show(T value) {
  if constexpr (std::is_same_v<T, double>)
    return format_double(value);
  else if constexpr (std::is_same_v<T, bool>)
    return value ? "true" : "false";
  else
    return std::to_string(value);
}

template <typename T>
Field field(const std::string& key, T ExperimentConfig::*member) {
  return {[key, member](ExperimentConfig& c, const std::string& t) { c.*member = parse_value<T>(key, t); },
          [member](const ExperimentConfig& c) { return show(c.*member); }};
}

template <typename S, typename T>
Field nested(const std::string& key, S ExperimentConfig::*outer, T S::*member) {
  return {[key, outer, member](ExperimentConfig& c, const std::string& t) { (c.*outer).*member = parse_value<T>(key, t); },
          [outer, member](const ExperimentConfig& c) { return show((c.*outer).*member); }};
}

using Section = std::vector<std::pair<std::string, Field>>;

const std::vector<std::pair<std::string, Section>>& schema() {
  static const std::vector<std::pair<std::string, Section>> sections = [] {
    using C = ExperimentConfig;
    std::vector<std::pair<std::string, Section>> s;
    s.push_back({"experiment",
                 {{"seed", field("seed", &C::seed)},
                  {"floor_k", field("floor_k", &C::floor)},
                  {"budget_factor_k", field("budget_factor_k", &C::budget_factor)},
                  {"scene_min_percent", field("scene_min_percent", &C::scene_min_percent)},
                  {"scene_max_percent", field("scene_max_percent", &C::scene_max_percent)},
                  {"sweep_start_k", field("sweep_start_k", &C::sweep_start)},
                  {"sweep_stop_k", field("sweep_stop_k", &C::sweep_stop)},
                  {"sweep_step_k", field("sweep_step_k", &C::sweep_step)},
                  {"sweep_user", field("sweep_user", &C::sweep_user)},
                  {"threads", field("threads", &C::threads)}}});
    s.push_back({"world",
                 {{"num_users", nested("num_users", &C::world, &WorldConfig::num_users)},
                  {"num_objects", nested("num_objects", &C::world, &WorldConfig::num_objects)},
                  {"num_images", nested("num_images", &C::world, &WorldConfig::num_images)},
                  {"num_groups", nested("num_groups", &C::world, &WorldConfig::num_groups)},
                  {"latent_rank", nested("latent_rank", &C::world, &WorldConfig::latent_rank)},
                  {"interest_noise", nested("interest_noise", &C::world, &WorldConfig::interest_noise)},
                  {"gaze_noise", nested("gaze_noise", &C::world, &WorldConfig::gaze_noise)},
                  {"min_objects_per_image", nested("min_objects_per_image", &C::world, &WorldConfig::min_objects_per_image)},
                  {"max_objects_per_image", nested("max_objects_per_image", &C::world, &WorldConfig::max_objects_per_image)},
                  {"group_bias", nested("group_bias", &C::world, &WorldConfig::group_bias)},
                  {"popularity_exponent", nested("popularity_exponent", &C::world, &WorldConfig::popularity_exponent)},
                  {"interest_gain", nested("interest_gain", &C::world, &WorldConfig::interest_gain)},
                  {"interest_offset", nested("interest_offset", &C::world, &WorldConfig::interest_offset)}}});
    s.push_back({"fit",
                 {{"factors", nested("factors", &C::fit, &FitConfig::factors)},
                  {"learning_rate", nested("learning_rate", &C::fit, &FitConfig::learning_rate)},
                  {"regularization", nested("regularization", &C::fit, &FitConfig::regularization)},
                  {"epochs", nested("epochs", &C::fit, &FitConfig::epochs)},
                  {"init_scale", nested("init_scale", &C::fit, &FitConfig::init_scale)}}});
    s.push_back({"link",
                 {{"use_channel", field("use_channel", &C::use_channel)},
                  {"downlink_rate", nested("downlink_rate", &C::link, &LinkParams::downlink_rate)},
                  {"uplink_ber", nested("uplink_ber", &C::link, &LinkParams::uplink_ber)}}});
    s.push_back({"channel",
                 {{"bandwidth_hz", nested("bandwidth_hz", &C::channel, &ChannelConfig::bandwidth)},
                  {"tx_power_w", nested("tx_power_w", &C::channel, &ChannelConfig::tx_power)},
                  {"distance_m", nested("distance_m", &C::channel, &ChannelConfig::distance)},
                  {"path_loss_exponent", nested("path_loss_exponent", &C::channel, &ChannelConfig::path_loss_exponent)},
                  {"interference_w", nested("interference_w", &C::channel, &ChannelConfig::interference_power)},
                  {"noise_psd_w_per_hz", nested("noise_psd_w_per_hz", &C::channel, &ChannelConfig::noise_psd)},
                  {"tx_antennas", nested("tx_antennas", &C::channel, &ChannelConfig::tx_antennas)},
                  {"rx_antennas", nested("rx_antennas", &C::channel, &ChannelConfig::rx_antennas)},
                  {"uplink_sinr", nested("uplink_sinr", &C::channel, &ChannelConfig::uplink_sinr)}}});
    return s;
  }();
  return sections;
}

// dBW spellings accepted for the two power keys.
const std::map<std::string, double ChannelConfig::*>& dbw_aliases() {
  static const std::map<std::string, double ChannelConfig::*> aliases = {
      {"tx_power_dbw", &ChannelConfig::tx_power},
      {"interference_dbw", &ChannelConfig::interference_power},
  };
  return aliases;
}

}  // namespace

ExperimentConfig read_config(std::istream& in, const std::string& source) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(source, e.line(), e.message());
  }
  ExperimentConfig config;
  for (const auto& [section_name, section_tree] : tree) {
    const auto section = std::find_if(schema().begin(), schema().end(),
                                      [&](const auto& s) { return s.first == section_name; });
    if (section == schema().end())
      throw ConfigError(source + ": unknown section or top-level key '" + section_name + "'");
    for (const auto& [key, value] : section_tree) {
      const std::string text = value.get_value<std::string>();
      if (section_name == "channel" && dbw_aliases().contains(key)) {
        config.channel.*dbw_aliases().at(key) = dbw_to_watts(parse_value<double>(key, text));
        continue;
      }
      const auto f = std::find_if(section->second.begin(), section->second.end(),
                                  [&](const auto& entry) { return entry.first == key; });
      if (f == section->second.end()) throw ConfigError(source + ": unknown key '" + section_name + "." + key + "'");
      f->second.set(config, text);
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "': file not found or unreadable");
  return read_config(in, path.string());
}

void write_config(std::ostream& out, const ExperimentConfig& config) {
  bool first = true;
  for (const auto& [name, section] : schema()) {
    if (!first) out << '\n';
    first = false;
    out << '[' << name << "]\n";
    for (const auto& [key, f] : section) out << key << " = " << f.get(config) << '\n';
  }
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [name, section] : schema()) {
    nlohmann::json entries = nlohmann::json::object();
    for (const auto& [key, f] : section) entries[key] = f.get(config);
    doc[name] = std::move(entries);
  }
  return doc;
}

}  // namespace attnalloc
