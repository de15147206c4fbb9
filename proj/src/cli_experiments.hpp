#pragma once

// Registry of runnable experiments. Private to the command-line runner.

#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "heatlab/cli.hpp"

namespace heatlab::cli {

class RunContext {
 public:
  RunContext(std::filesystem::path dir, RunManifest& manifest) : dir_(std::move(dir)), manifest_(manifest) {}

  /// Writes `name` in the output directory and lists it in the manifest.
  void write(const std::string& name, const std::function<void(std::ostream&)>& body);
  void check(const std::string& name, bool passed, const std::string& detail = {});
  void result(const std::string& key, const std::string& value);
  void result(const std::string& key, double value);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  RunManifest& manifest_;
};

struct Experiment {
  std::string name;
  std::string summary;
  std::map<std::string, std::string> defaults;
  std::function<void(const ExperimentConfig&, RunContext&)> body;
};

const std::vector<Experiment>& experiments();
const Experiment* find_experiment(const std::string& name);

}  // namespace heatlab::cli
