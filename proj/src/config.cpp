#include "config.hpp"

#include <cmath>
#include <filesystem>
#include <set>

#include "common.hpp"
#include "serialize.hpp"

namespace gpsmc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) fail(where + ": unknown key '" + key + "'");
}

double require_number(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) fail(where + ": missing '" + key + "'");
  if (!obj[key].is_number()) fail(where + ": '" + key + "' must be a number");
  return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& where, const std::string& key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) fail(where + ": '" + key + "' must be an integer");
  return obj[key].get<int>();
}

double get_number(const json& obj, const std::string& where, const std::string& key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) fail(where + ": '" + key + "' must be a number");
  return obj[key].get<double>();
}

std::string get_string(const json& obj, const std::string& where, const std::string& key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) fail(where + ": '" + key + "' must be a string");
  return obj[key].get<std::string>();
}

Method parse_method(const std::string& name) {
  if (name == "smc") return Method::kSmc;
  if (name == "grid") return Method::kGrid;
  if (name == "prior_is") return Method::kPriorIs;
  if (name == "point") return Method::kPoint;
  fail("unknown method '" + name + "' (expected smc|grid|prior_is|point)");
}

}  // namespace

std::string task_name(Task t) {
  switch (t) {
    case Task::kSample: return "sample";
    case Task::kPredict: return "predict";
    case Task::kCompare: return "compare";
    case Task::kChangepoint: return "changepoint";
  }
  return "?";
}

std::string method_name(Method m) {
  switch (m) {
    case Method::kSmc: return "smc";
    case Method::kGrid: return "grid";
    case Method::kPriorIs: return "prior_is";
    case Method::kPoint: return "point";
  }
  return "?";
}

void ChangepointSpec::validate() const {
  hazard.validate();
  if (!(prune_threshold >= 0.0 && prune_threshold < 1.0))
    fail("changepoint.prune_threshold must lie in [0, 1)");
  if (max_run_lengths < 1) fail("changepoint.max_run_lengths must be >= 1");
  if (!(threshold > 0.0 && threshold < 1.0))
    fail("changepoint.threshold must lie strictly between 0 and 1");
  if (num_particles < 2) fail("changepoint.num_particles must be >= 2");
  if (mh_moves < 0) fail("changepoint.mh_moves must be >= 0");
  if (segment_fit_points < 2) fail("changepoint.segment_fit_points must be >= 2");
}

nlohmann::json unwrap_manifest(nlohmann::json doc) {
  if (doc.is_object() && doc.value("artifact", "") == "manifest") {
    if (!doc.contains("config") || !doc["config"].is_object())
      fail("manifest has no embedded config");
    return doc["config"];
  }
  return doc;
}

nlohmann::json load_config_document(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    fail(path + ": " + e.what());
  }
  if (!j.is_object()) fail(path + ": top-level value must be an object");
  return unwrap_manifest(std::move(j));
}

void apply_preset(nlohmann::json& doc, const std::string& preset) {
  if (preset == "sarcos") {
    doc["smc"]["num_particles"] = 15;
    doc["smc"]["num_batches"] = 20;
    doc["smc"]["mh_moves"] = 5;
  } else if (preset == "changepoint") {
    doc["changepoint"]["num_particles"] = 25;
    doc["changepoint"]["mh_moves"] = 2;
  } else {
    fail("unknown preset '" + preset + "' (expected sarcos|changepoint)");
  }
}

PriorSpec build_prior(const nlohmann::json& prior_array, const ModelLayout& layout) {
  if (!prior_array.is_array()) fail("prior must be an array of coordinate entries");
  const int dim = layout.dim();
  std::vector<int> hits(dim, 0);
  PriorSpec spec;
  spec.coords.resize(dim);

  for (const auto& entry : prior_array) {
    if (!entry.is_object()) fail("prior entries must be objects");
    check_keys(entry, "prior entry",
               {"name", "kind", "mean", "variance", "std", "lo", "hi", "value"});
    const std::string name = get_string(entry, "prior entry", "name", "");
    if (name.empty()) fail("prior entry: missing 'name'");
    int coord = -1;
    for (int i = 0; i < dim; ++i)
      if (layout.coordinate_name(i) == name) {
        coord = i;
        break;
      }
    if (coord < 0) fail("prior entry: no coordinate named '" + name + "'");
    if (hits[coord]++) fail("prior entry: coordinate '" + name + "' appears twice");

    const std::string kind = get_string(entry, "prior '" + name + "'", "kind", "");
    const std::string where = "prior '" + name + "'";
    auto gaussian_params = [&]() -> std::pair<double, double> {
      const double mean = require_number(entry, where, "mean");
      if (entry.contains("std") && entry.contains("variance"))
        fail(where + ": give 'std' or 'variance', not both");
      double sd;
      if (entry.contains("std")) {
        sd = require_number(entry, where, "std");
      } else {
        const double var = require_number(entry, where, "variance");
        if (!(var > 0.0)) fail(where + ": variance must be positive");
        sd = std::sqrt(var);
      }
      return {mean, sd};
    };
    if (kind == "gaussian_on_log") {
      auto [m, s] = gaussian_params();
      spec.coords[coord] = CoordinatePrior::gaussian_on_log(m, s);
    } else if (kind == "gaussian") {
      auto [m, s] = gaussian_params();
      spec.coords[coord] = CoordinatePrior::gaussian_on_natural(m, s);
    } else if (kind == "uniform_on_log") {
      spec.coords[coord] = CoordinatePrior::uniform_on_log(
          require_number(entry, where, "lo"), require_number(entry, where, "hi"));
    } else if (kind == "fixed") {
      spec.coords[coord] = CoordinatePrior::fixed(require_number(entry, where, "value"));
    } else {
      fail(where + ": unknown kind '" + kind +
           "' (expected gaussian_on_log|gaussian|uniform_on_log|fixed)");
    }
  }
  for (int i = 0; i < dim; ++i)
    if (!hits[i]) fail("prior: coordinate '" + layout.coordinate_name(i) + "' not covered");
  spec.validate_against(layout);
  return spec;
}

LoadedConfig parse_config(json doc) {
  if (!doc.is_object()) fail("top-level value must be an object");
  check_keys(doc, "top level",
             {"task", "seed", "output_dir", "dataset", "model", "prior", "method", "smc",
              "grid", "prior_is", "point", "predict", "compare", "changepoint"});

  LoadedConfig out;
  RunConfig& run = out.run;

  const std::string task = get_string(doc, "top level", "task", "");
  if (task == "sample") run.task = Task::kSample;
  else if (task == "predict") run.task = Task::kPredict;
  else if (task == "compare") run.task = Task::kCompare;
  else if (task == "changepoint") run.task = Task::kChangepoint;
  else fail("unknown task '" + task + "' (expected sample|predict|compare|changepoint)");

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
      fail("'seed' must be a non-negative integer");
    if (doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() < 0)
      fail("'seed' must be a non-negative integer");
  }
  run.seed = doc.value("seed", 0ull);
  doc["seed"] = run.seed;

  run.output_dir = get_string(doc, "top level", "output_dir", "out");
  doc["output_dir"] = run.output_dir;

  if (!doc.contains("dataset") || !doc["dataset"].is_object())
    fail("missing 'dataset' object");
  json& ds = doc["dataset"];
  check_keys(ds, "dataset", {"path", "input_columns", "target_column"});
  run.dataset_path = get_string(ds, "dataset", "path", "");
  if (run.dataset_path.empty()) fail("dataset: missing 'path'");
  if (!std::filesystem::exists(run.dataset_path))
    fail("dataset: file does not exist: " + run.dataset_path);
  if (ds.contains("input_columns")) {
    if (!ds["input_columns"].is_array()) fail("dataset.input_columns must be an array");
    for (const auto& c : ds["input_columns"]) {
      if (!c.is_number_integer()) fail("dataset.input_columns entries must be integers");
      run.input_columns.push_back(c.get<int>());
    }
    if (run.input_columns.empty()) fail("dataset.input_columns must not be empty");
  }
  run.target_column = get_int(ds, "dataset", "target_column", -1);

  json& model = doc["model"];
  if (!model.is_object()) fail("missing 'model' object");
  check_keys(model, "model", {"kernel", "mean"});
  const std::string kernel = get_string(model, "model", "kernel", "se_iso");
  model["kernel"] = kernel;
  if (kernel == "se_iso") run.kernel.family = KernelFamily::kSquaredExponentialIso;
  else if (kernel == "se_ard") run.kernel.family = KernelFamily::kSquaredExponentialArd;
  else fail("model.kernel must be se_iso or se_ard");
  const std::string mean = get_string(model, "model", "mean", "zero");
  model["mean"] = mean;
  if (mean == "zero") run.mean.family = MeanFamily::kZero;
  else if (mean == "constant") run.mean.family = MeanFamily::kConstant;
  else if (mean == "linear") run.mean.family = MeanFamily::kLinear;
  else fail("model.mean must be zero, constant or linear");

  if (!doc.contains("prior")) fail("missing 'prior' array");
  run.prior_doc = doc["prior"];

  run.method = parse_method(get_string(doc, "top level", "method", "smc"));
  doc["method"] = method_name(run.method);

  json& smc = doc["smc"];
  if (!smc.is_object()) smc = json::object();
  check_keys(smc, "smc",
             {"num_particles", "num_batches", "mh_moves", "ess_threshold", "shuffle_batches"});
  run.smc.num_particles = get_int(smc, "smc", "num_particles", run.smc.num_particles);
  run.smc.num_batches = get_int(smc, "smc", "num_batches", run.smc.num_batches);
  run.smc.mh_moves = get_int(smc, "smc", "mh_moves", run.smc.mh_moves);
  run.smc.ess_threshold = get_number(smc, "smc", "ess_threshold", run.smc.ess_threshold);
  if (smc.contains("shuffle_batches") && !smc["shuffle_batches"].is_boolean())
    fail("smc.shuffle_batches must be a boolean");
  run.smc.shuffle_batches = smc.value("shuffle_batches", false);
  run.smc.seed = run.seed;
  run.smc.validate();
  smc["num_particles"] = run.smc.num_particles;
  smc["num_batches"] = run.smc.num_batches;
  smc["mh_moves"] = run.smc.mh_moves;
  smc["ess_threshold"] = run.smc.ess_threshold;
  smc["shuffle_batches"] = run.smc.shuffle_batches;

  if (doc.contains("grid")) {
    json& grid = doc["grid"];
    if (!grid.is_object()) fail("'grid' must be an object");
    check_keys(grid, "grid", {"axes", "max_nodes"});
    if (!grid.contains("axes") || !grid["axes"].is_array()) fail("grid: missing 'axes' array");
    for (const auto& ax : grid["axes"]) {
      if (!ax.is_object()) fail("grid axes must be objects");
      check_keys(ax, "grid axis", {"lo", "hi", "count", "value"});
      GridAxis a;
      if (ax.contains("value")) {
        a.lo = a.hi = require_number(ax, "grid axis", "value");
        a.count = 1;
      } else {
        a.lo = require_number(ax, "grid axis", "lo");
        a.hi = require_number(ax, "grid axis", "hi");
        a.count = get_int(ax, "grid axis", "count", 0);
      }
      run.grid.axes.push_back(a);
    }
    if (grid.contains("max_nodes")) {
      if (!grid["max_nodes"].is_number_integer()) fail("grid.max_nodes must be an integer");
      run.grid.max_nodes = grid["max_nodes"].get<std::int64_t>();
    }
    run.grid.validate();
  } else if (run.method == Method::kGrid) {
    fail("method 'grid' needs a 'grid' object");
  }

  if (doc.contains("prior_is")) {
    json& pis = doc["prior_is"];
    check_keys(pis, "prior_is", {"num_samples"});
    run.is_samples = get_int(pis, "prior_is", "num_samples", run.is_samples);
    if (run.is_samples < 1) fail("prior_is.num_samples must be >= 1");
    pis["num_samples"] = run.is_samples;
  }

  if (doc.contains("point")) {
    json& pt = doc["point"];
    check_keys(pt, "point", {"n_restarts"});
    run.point_restarts = get_int(pt, "point", "n_restarts", run.point_restarts);
    if (run.point_restarts < 1) fail("point.n_restarts must be >= 1");
    pt["n_restarts"] = run.point_restarts;
  }

  if (doc.contains("predict") || run.task == Task::kPredict) {
    json& pr = doc["predict"];
    if (!pr.is_object()) pr = json::object();
    check_keys(pr, "predict", {"query_path", "query_count", "test_path"});
    run.predict.query_path = get_string(pr, "predict", "query_path", "");
    run.predict.query_count = get_int(pr, "predict", "query_count", run.predict.query_count);
    run.predict.test_path = get_string(pr, "predict", "test_path", "");
    if (run.predict.query_count < 2 && run.predict.query_path.empty())
      fail("predict.query_count must be >= 2");
    if (!run.predict.test_path.empty() && !std::filesystem::exists(run.predict.test_path))
      fail("predict: test file does not exist: " + run.predict.test_path);
    if (!run.predict.query_path.empty() && !std::filesystem::exists(run.predict.query_path))
      fail("predict: query file does not exist: " + run.predict.query_path);
    pr["query_count"] = run.predict.query_count;
  }

  if (doc.contains("compare") || run.task == Task::kCompare) {
    json& cm = doc["compare"];
    if (!cm.is_object()) cm = json::object();
    check_keys(cm, "compare", {"methods", "runs", "query_count", "is_samples"});
    if (cm.contains("methods")) {
      if (!cm["methods"].is_array()) fail("compare.methods must be an array");
      for (const auto& m : cm["methods"]) {
        if (!m.is_string()) fail("compare.methods entries must be strings");
        run.compare.methods.push_back(parse_method(m.get<std::string>()));
      }
    }
    if (run.compare.methods.empty() && run.task == Task::kCompare)
      fail("compare: at least one method required");
    run.compare.runs = get_int(cm, "compare", "runs", run.compare.runs);
    if (run.compare.runs < 1) fail("compare.runs must be >= 1");
    run.compare.query_count = get_int(cm, "compare", "query_count", run.compare.query_count);
    if (run.compare.query_count < 2) fail("compare.query_count must be >= 2");
    run.compare.is_samples = get_int(cm, "compare", "is_samples", run.compare.is_samples);
    if (run.compare.is_samples < 0) fail("compare.is_samples must be >= 0");
    cm["runs"] = run.compare.runs;
    cm["query_count"] = run.compare.query_count;
    cm["is_samples"] = run.compare.is_samples;
    json methods = json::array();
    for (Method m : run.compare.methods) methods.push_back(method_name(m));
    cm["methods"] = std::move(methods);
  }

  if (doc.contains("changepoint") || run.task == Task::kChangepoint) {
    json& cp = doc["changepoint"];
    if (!cp.is_object()) cp = json::object();
    check_keys(cp, "changepoint",
               {"hazard", "prune_threshold", "max_run_lengths", "threshold", "num_particles",
                "mh_moves", "segment_fit_points"});
    run.changepoint.hazard.rate =
        get_number(cp, "changepoint", "hazard", run.changepoint.hazard.rate);
    run.changepoint.prune_threshold =
        get_number(cp, "changepoint", "prune_threshold", run.changepoint.prune_threshold);
    run.changepoint.max_run_lengths =
        get_int(cp, "changepoint", "max_run_lengths", run.changepoint.max_run_lengths);
    run.changepoint.threshold =
        get_number(cp, "changepoint", "threshold", run.changepoint.threshold);
    run.changepoint.num_particles =
        get_int(cp, "changepoint", "num_particles", run.changepoint.num_particles);
    run.changepoint.mh_moves = get_int(cp, "changepoint", "mh_moves", run.changepoint.mh_moves);
    run.changepoint.segment_fit_points =
        get_int(cp, "changepoint", "segment_fit_points", run.changepoint.segment_fit_points);
    run.changepoint.validate();
    cp["hazard"] = run.changepoint.hazard.rate;
    cp["prune_threshold"] = run.changepoint.prune_threshold;
    cp["max_run_lengths"] = run.changepoint.max_run_lengths;
    cp["threshold"] = run.changepoint.threshold;
    cp["num_particles"] = run.changepoint.num_particles;
    cp["mh_moves"] = run.changepoint.mh_moves;
    cp["segment_fit_points"] = run.changepoint.segment_fit_points;
  }

  out.resolved = std::move(doc);
  return out;
}

}  // namespace gpsmc
