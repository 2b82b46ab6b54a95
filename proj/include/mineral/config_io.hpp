#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mineral/domain.hpp"
#include "mineral/planner_config.hpp"

namespace mineral {

/// One violated invariant or parse problem. `line` is 1-based, 0 when unknown.
struct ConfigIssue {
  std::string field;
  std::string message;
  int line = 0;
};

[[nodiscard]] std::string format_issue(const ConfigIssue& issue, std::string_view source);

/// Thrown by the loaders when the file cannot be parsed or fails validation.
class ConfigInvalid : public ConfigError {
 public:
  ConfigInvalid(std::string source, std::vector<ConfigIssue> issues);
  [[nodiscard]] const std::vector<ConfigIssue>& issues() const { return issues_; }
  [[nodiscard]] const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::vector<ConfigIssue> issues_;
};

/// Checks every ProblemConfig invariant. Field paths look like
/// "discount", "sites[2].yield.std", "demand[1]".
[[nodiscard]] std::vector<ConfigIssue> validate(const ProblemConfig& config);

struct LoadedConfig {
  ProblemConfig problem;
  PolicyOptions options;
};

/// Parses YAML text. Money given in $ per Mt in the file is converted to $M.
[[nodiscard]] LoadedConfig parse_config(std::string_view yaml_text, const std::string& source = "<string>");
[[nodiscard]] LoadedConfig load_config(const std::filesystem::path& path);

/// Accepts a path, or a bundled config name such as "table1.default".
[[nodiscard]] std::filesystem::path resolve_config_path(const std::string& name_or_path);

/// The bundled four-site configuration.
[[nodiscard]] LoadedConfig table1_default();

/// Human-readable parameter table in the layout of the experimental parameter table.
[[nodiscard]] std::string format_parameter_table(const ProblemConfig& config);

}  // namespace mineral
