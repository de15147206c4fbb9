#pragma once

// Experiment runner behind the `heatlab` command.
//
//   heatlab <experiment> [--config PATH] [--key value]...
//
// Configuration files are INI text. A `[run]` section holds `output` and
// `seed`; a section named after the experiment holds its parameters. Other
// sections are skipped so one file can serve several experiments. Command
// line overrides win over the file, which wins over built-in defaults.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace heatlab::cli {

/// Bad invocation: unknown experiment or key, malformed value or file.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "HEATLAB_OUT";

struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, std::string> values;  // every key resolved
  std::filesystem::path output_dir;

  std::string text(const std::string& key) const;
  double number(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;

  /// Stable `key = value` rendering (sorted keys, output path excluded).
  std::string resolved() const;
  /// FNV-1a 64 of resolved(), as 16 hex digits.
  std::string digest() const;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunManifest {
  std::string experiment;
  std::string config_digest;
  std::vector<std::string> outputs;  // relative to the output directory
  double duration_seconds = 0;
  std::vector<Check> checks;
  std::map<std::string, std::string> results;

  bool passed() const;
};

std::vector<std::string> experiment_names();

/// Parses INI text into (section, key, value) triples in file order.
std::vector<std::pair<std::string, std::pair<std::string, std::string>>> parse_ini(std::istream& in);

ExperimentConfig resolve_config(const std::string& experiment, const std::optional<std::filesystem::path>& config,
                                const std::vector<std::pair<std::string, std::string>>& overrides);

/// Runs the experiment, writes outputs, the resolved config and the manifest.
RunManifest run(const ExperimentConfig& cfg);

std::string to_json(const RunManifest& m);
std::uint64_t fnv1a(const std::string& text);

/// Whole command: returns 0 when every check passes, 1 on a failed check or
/// runtime error, 2 on a usage error.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace heatlab::cli
