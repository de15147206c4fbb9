#include "heatlab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "cli_experiments.hpp"
#include "heatlab/csv.hpp"
#include "heatlab/errors.hpp"
#include "json.hpp"

namespace heatlab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

const std::set<std::string>& run_keys() {
  static const std::set<std::string> keys{"output", "seed"};
  return keys;
}

void write_atomically(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string usage() {
  std::ostringstream s;
  s << "usage: heatlab <experiment> [--config PATH] [--key value]...\n\nexperiments:\n";
  for (const auto& e : experiments()) s << "  " << std::left << std::setw(10) << e.name << e.summary << '\n';
  s << "\nOutputs go to --output, else $" << kOutputRootEnv << "/<experiment>, else ./heatlab-out/<experiment>.\n"
    << "Exit status: 0 all checks pass, 1 a check failed or the run errored, 2 usage error.\n";
  return s.str();
}

}  // namespace

std::string ExperimentConfig::text(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw UsageError("experiment '" + experiment + "' has no key '" + key + "'");
  return it->second;
}

double ExperimentConfig::number(const std::string& key) const {
  try {
    return csv::to_double(text(key));
  } catch (const std::invalid_argument&) {
    throw UsageError("key '" + key + "' expects a number, got '" + text(key) + "'");
  }
}

long long ExperimentConfig::integer(const std::string& key) const {
  try {
    return csv::to_int(text(key));
  } catch (const std::invalid_argument&) {
    throw UsageError("key '" + key + "' expects an integer, got '" + text(key) + "'");
  }
}

std::vector<double> ExperimentConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& field : csv::split(text(key))) {
    try {
      out.push_back(csv::to_double(trim(field)));
    } catch (const std::invalid_argument&) {
      throw UsageError("key '" + key + "' expects a comma-separated list of numbers");
    }
  }
  return out;
}

std::string ExperimentConfig::resolved() const {
  std::string s = "[" + experiment + "]\n";
  for (const auto& [k, v] : values)
    if (k != "output") s += k + " = " + v + "\n";
  return s;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string ExperimentConfig::digest() const {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(resolved())));
  return buf;
}

bool RunManifest::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::vector<std::string> experiment_names() {
  std::vector<std::string> names;
  for (const auto& e : experiments()) names.push_back(e.name);
  return names;
}

std::vector<std::pair<std::string, std::pair<std::string, std::string>>> parse_ini(std::istream& in) {
  std::vector<std::pair<std::string, std::pair<std::string, std::string>>> out;
  std::string section;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw UsageError("config line " + std::to_string(number) + ": unterminated section");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw UsageError("config line " + std::to_string(number) + ": empty key");
    if (section.empty()) throw UsageError("config line " + std::to_string(number) + ": key outside a section");
    out.push_back({section, {key, trim(t.substr(eq + 1))}});
  }
  return out;
}

ExperimentConfig resolve_config(const std::string& experiment, const std::optional<std::filesystem::path>& config,
                                const std::vector<std::pair<std::string, std::string>>& overrides) {
  const Experiment* spec = find_experiment(experiment);
  if (!spec) throw UsageError("unknown experiment '" + experiment + "'");

  ExperimentConfig cfg;
  cfg.experiment = experiment;
  cfg.values = spec->defaults;
  cfg.values.emplace("output", "");

  auto assign = [&](const std::string& key, const std::string& value, const std::string& where) {
    if (!cfg.values.count(key)) throw UsageError("unknown key '" + key + "' for experiment '" + experiment + "'" + where);
    cfg.values[key] = value;
  };

  if (config) {
    std::ifstream in(*config);
    if (!in) throw UsageError("cannot read config file " + config->string());
    const auto entries = parse_ini(in);
    for (const auto& [section, kv] : entries)
      if (section == "run") {
        if (!run_keys().count(kv.first)) throw UsageError("unknown key '" + kv.first + "' in [run]");
        if (cfg.values.count(kv.first)) assign(kv.first, kv.second, " in [run]");
      }
    for (const auto& [section, kv] : entries)
      if (section == experiment) assign(kv.first, kv.second, " in [" + experiment + "]");
  }
  for (const auto& [key, value] : overrides) assign(key, value, " on the command line");

  if (!cfg.values["output"].empty()) {
    cfg.output_dir = cfg.values["output"];
  } else {
    const char* root = std::getenv(kOutputRootEnv);
    cfg.output_dir = std::filesystem::path(root && *root ? root : "heatlab-out") / experiment;
  }
  return cfg;
}

std::string to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["experiment"] = m.experiment;
  j["config_digest"] = m.config_digest;
  j["outputs"] = m.outputs;
  j["duration_seconds"] = m.duration_seconds;
  j["passed"] = m.passed();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : m.checks) j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["results"] = m.results;
  return j.dump(2) + "\n";
}

RunManifest run(const ExperimentConfig& cfg) {
  const Experiment* spec = find_experiment(cfg.experiment);
  if (!spec) throw UsageError("unknown experiment '" + cfg.experiment + "'");
  std::filesystem::create_directories(cfg.output_dir);

  RunManifest manifest;
  manifest.experiment = cfg.experiment;
  manifest.config_digest = cfg.digest();
  const auto start = std::chrono::steady_clock::now();

  RunContext ctx(cfg.output_dir, manifest);
  ctx.write("config.ini", [&](std::ostream& out) { out << cfg.resolved(); });
  spec->body(cfg, ctx);

  manifest.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest.outputs.push_back("manifest.json");
  write_atomically(cfg.output_dir / "manifest.json", to_json(manifest));
  return manifest;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    if (argc < 2) throw UsageError("missing experiment name");
    const std::string experiment = argv[1];
    if (experiment == "--help" || experiment == "-h" || experiment == "help") {
      out << usage();
      return 0;
    }
    std::optional<std::filesystem::path> config;
    std::vector<std::pair<std::string, std::string>> overrides;
    for (int i = 2; i < argc; ++i) {
      std::string arg = argv[i];
      if (arg.rfind("--", 0) != 0) throw UsageError("unexpected argument '" + arg + "'");
      arg = arg.substr(2);
      std::string value;
      if (const auto eq = arg.find('='); eq != std::string::npos) {
        value = arg.substr(eq + 1);
        arg = arg.substr(0, eq);
      } else {
        if (i + 1 >= argc) throw UsageError("option --" + arg + " needs a value");
        value = argv[++i];
      }
      if (arg == "config") {
        config = value;
      } else {
        overrides.emplace_back(arg, value);
      }
    }
    const ExperimentConfig cfg = resolve_config(experiment, config, overrides);
    const RunManifest m = run(cfg);
    for (const auto& c : m.checks)
      out << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : "  (" + c.detail + ")") << '\n';
    for (const auto& [k, v] : m.results) out << k << " = " << v << '\n';
    out << "outputs in " << cfg.output_dir.string() << '\n';
    return m.passed() ? 0 : 1;
  } catch (const UsageError& e) {
    err << "heatlab: " << e.what() << "\n\n" << usage();
    return 2;
  } catch (const std::exception& e) {
    err << "heatlab: run failed: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace heatlab::cli
