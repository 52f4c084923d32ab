#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "json.hpp"

namespace codit::cli {

/// Effective run configuration: defaults, then the --config file, then flag
/// overrides. Unknown keys in the file are rejected. The full key-value map
/// is embedded verbatim in every output's provenance block.
class RunConfig {
 public:
  RunConfig(std::map<std::string, std::string> defaults,
            const std::filesystem::path& config_file,
            const std::map<std::string, std::string>& overrides);

  const std::string& get(const std::string& key) const;
  bool flag(const std::string& key) const;  // "1"/"true"/"yes" -> true
  std::uint64_t get_u64(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  int get_int(const std::string& key) const;
  double get_double(const std::string& key) const;

  nlohmann::json provenance(const std::string& command) const;

  /// "# key = value" comment lines for CSV outputs.
  std::string provenance_comment(const std::string& command) const;

 private:
  std::map<std::string, std::string> values_;
};

/// key = value lines; '#' starts a comment; blank lines ignored.
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& file);

}  // namespace codit::cli
