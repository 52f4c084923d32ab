#include "run_config.hpp"

#include <fstream>

#include "codit/error.hpp"
#include "codit/version.hpp"

namespace codit::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(file.string() + ":" + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(file.string() + ":" + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, value).second)
      throw ConfigError(file.string() + ":" + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
  }
  return out;
}

RunConfig::RunConfig(std::map<std::string, std::string> defaults,
                     const std::filesystem::path& config_file,
                     const std::map<std::string, std::string>& overrides)
    : values_(std::move(defaults)) {
  if (!config_file.empty()) {
    for (const auto& [key, value] : parse_config_file(config_file)) {
      const auto it = values_.find(key);
      if (it == values_.end())
        throw ConfigError("unknown config key '" + key + "' for this command");
      it->second = value;
    }
  }
  for (const auto& [key, value] : overrides) {
    const auto it = values_.find(key);
    if (it == values_.end())
      throw ConfigError("unknown option '" + key + "' for this command");
    it->second = value;
  }
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

bool RunConfig::flag(const std::string& key) const {
  const auto& v = get(key);
  return v == "1" || v == "true" || v == "yes";
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  try {
    return std::stoull(get(key));
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not an unsigned integer: '" +
                      get(key) + "'");
  }
}

std::size_t RunConfig::get_size(const std::string& key) const {
  return static_cast<std::size_t>(get_u64(key));
}

int RunConfig::get_int(const std::string& key) const {
  try {
    return std::stoi(get(key));
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not an integer: '" + get(key) + "'");
  }
}

double RunConfig::get_double(const std::string& key) const {
  try {
    return std::stod(get(key));
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not a number: '" + get(key) + "'");
  }
}

namespace {

// Execution-only keys: they cannot change any result, and outputs must stay
// byte-identical across worker counts and overwrite modes.
bool in_provenance(const std::string& key) { return key != "workers" && key != "force"; }

}  // namespace

nlohmann::json RunConfig::provenance(const std::string& command) const {
  nlohmann::json config;
  for (const auto& [key, value] : values_)
    if (in_provenance(key)) config[key] = value;
  return {{"build", kBuildId}, {"command", command}, {"config", config}};
}

std::string RunConfig::provenance_comment(const std::string& command) const {
  std::string out = "# build = " + std::string(kBuildId) + "\n# command = " + command + "\n";
  for (const auto& [key, value] : values_)
    if (in_provenance(key)) out += "# " + key + " = " + value + "\n";
  return out;
}

}  // namespace codit::cli
