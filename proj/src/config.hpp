#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "baselines.hpp"
#include "changepoint.hpp"
#include "csv.hpp"
#include "smc.hpp"

namespace gpsmc {

enum class Task { kSample, kPredict, kCompare, kChangepoint };
enum class Method { kSmc, kGrid, kPriorIs, kPoint };

std::string task_name(Task t);
std::string method_name(Method m);

struct PredictSpec {
  std::string query_path;  // query-input CSV; empty -> 1-D linspace over the data
  int query_count = 50;
  std::string test_path;   // labeled test CSV; when set, metrics are emitted
};

struct CompareSpec {
  std::vector<Method> methods;
  int runs = 15;
  int query_count = 50;
  int is_samples = 0;  // 0: match the sampler's likelihood-evaluation budget
};

struct ChangepointSpec {
  HazardSpec hazard;
  double prune_threshold = 1e-6;
  int max_run_lengths = 500;
  double threshold = 0.5;
  int num_particles = 25;
  int mh_moves = 2;
  int segment_fit_points = 50;
  void validate() const;
};

struct RunConfig {
  Task task = Task::kSample;
  std::uint64_t seed = 0;
  std::string output_dir;
  std::string dataset_path;
  std::vector<int> input_columns;  // empty: all but the last column
  int target_column = -1;          // -1: the last column
  KernelSpec kernel;               // input_dim resolved against the dataset
  MeanSpec mean;
  nlohmann::json prior_doc;        // finalized against the layout at run time
  Method method = Method::kSmc;
  SmcConfig smc;
  GridSpec grid;
  int is_samples = 1000;
  int point_restarts = 20;
  PredictSpec predict;
  CompareSpec compare;
  ChangepointSpec changepoint;
};

struct LoadedConfig {
  RunConfig run;
  nlohmann::json resolved;  // the fully-defaulted document embedded in manifests
};

// A manifest document is unwrapped to its embedded config, so any manifest
// doubles as a rerun config; other documents pass through.
nlohmann::json unwrap_manifest(nlohmann::json doc);

// Reads and unwraps a config file.
nlohmann::json load_config_document(const std::string& path);

// Named parameter bundles. "sarcos": sampler N=15, P=20, K=5.
// "changepoint": 25 particles, 2 move steps per extension.
void apply_preset(nlohmann::json& doc, const std::string& preset);

// Normalizes, defaults and validates the document. Unknown keys are errors.
LoadedConfig parse_config(nlohmann::json doc);

// Builds the per-coordinate prior from the config's prior array; every
// layout coordinate must be covered exactly once by name.
PriorSpec build_prior(const nlohmann::json& prior_array, const ModelLayout& layout);

}  // namespace gpsmc
