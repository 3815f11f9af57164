#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>

#include "common.hpp"
#include "csv.hpp"
#include "metrics.hpp"
#include "mixture.hpp"
#include "rng.hpp"
#include "serialize.hpp"

#ifndef GPSMC_VERSION_STRING
#define GPSMC_VERSION_STRING "0.0.0"
#endif

namespace gpsmc {

namespace {

using nlohmann::json;

struct Prepared {
  LoadedConfig lc;
  GpModel model;
  PriorSpec prior;
  std::vector<std::string> coordinate_names;
};

Prepared prepare(LoadedConfig lc) {
  Prepared p;
  const RunConfig& run = lc.run;

  const Eigen::MatrixXd table = read_csv_matrix(run.dataset_path);
  CsvSchema schema;
  schema.input_columns = run.input_columns;
  schema.target_column = run.target_column;
  if (schema.input_columns.empty()) {
    if (table.cols() < 2)
      throw ConfigError("config: dataset needs at least two columns (inputs + target)");
    for (int c = 0; c + 1 < table.cols(); ++c) schema.input_columns.push_back(c);
  }
  if (schema.target_column < 0) schema.target_column = static_cast<int>(table.cols()) - 1;

  p.model.kernel = run.kernel;
  p.model.kernel.input_dim = static_cast<int>(schema.input_columns.size());
  p.model.mean = run.mean;
  p.model.data = ingest_csv(run.dataset_path, schema);
  p.model.data.validate();
  if (p.model.data.size() < 1) throw ConfigError("config: dataset is empty");

  p.prior = build_prior(run.prior_doc, p.model.layout());
  for (int i = 0; i < p.model.layout().dim(); ++i)
    p.coordinate_names.push_back(p.model.layout().coordinate_name(i));

  // Echo the resolved schema so manifests are self-contained.
  lc.resolved["dataset"]["input_columns"] = schema.input_columns;
  lc.resolved["dataset"]["target_column"] = schema.target_column;
  p.lc = std::move(lc);
  return p;
}

struct MethodOutput {
  WeightedSamples samples;
  json budget;
  json extra;  // method-specific additions to samples.json's sidecars
};

MethodOutput run_method(Method method, const Prepared& p, std::uint64_t seed) {
  const RunConfig& run = p.lc.run;
  MethodOutput out;
  out.budget["method"] = method_name(method);

  switch (method) {
    case Method::kSmc: {
      SmcConfig cfg = run.smc;
      cfg.seed = seed;
      const int n = static_cast<int>(p.model.data.size());
      if (cfg.num_batches > n)
        throw ConfigError("config: smc.num_batches exceeds the number of data rows");
      TemperingSequence seq{p.model, p.prior,
                            make_batches(n, cfg.num_batches, cfg.shuffle_batches, seed)};
      const ParticleSystem ps = gpsmc::run(cfg, seq);
      out.samples = from_particles(ps);
      const std::int64_t N = cfg.num_particles, P = seq.num_stages(), K = cfg.mh_moves;
      out.budget["likelihood_evals"] = ps.eval_counter;
      out.budget["lower_bound"] = N * P;
      out.budget["upper_bound"] = 2 * N * P * K + N * P;
      out.budget["num_particles"] = N;
      out.budget["num_batches"] = P;
      out.budget["mh_moves"] = K;
      json acc = json::array();
      for (double a : ps.acceptance_history) acc.push_back(a);
      out.extra["acceptance_history"] = std::move(acc);
      break;
    }
    case Method::kGrid: {
      if (run.grid.dim() != p.prior.dim())
        throw ConfigError("config: grid has " + std::to_string(run.grid.dim()) +
                          " axes, model has " + std::to_string(p.prior.dim()) +
                          " hyperparameters");
      out.samples = grid_posterior(p.model, p.prior, run.grid);
      out.budget["grid_nodes"] = run.grid.total_nodes();
      break;
    }
    case Method::kPriorIs: {
      out.samples = prior_importance_sampler(p.model, p.prior, run.is_samples, seed);
      out.budget["likelihood_evals"] = run.is_samples;
      break;
    }
    case Method::kPoint: {
      const PointEstimate pe =
          optimize_point_estimate(p.model, p.prior, run.point_restarts, seed);
      out.samples.thetas = {pe.theta};
      out.samples.weights = Eigen::VectorXd::Ones(1);
      out.budget["function_evals"] = pe.function_evals;
      json theta = json::array();
      for (Eigen::Index d = 0; d < pe.theta.size(); ++d) theta.push_back(pe.theta[d]);
      out.extra["point_estimate"] = {{"theta", std::move(theta)},
                                     {"log_likelihood", pe.log_likelihood},
                                     {"n_restarts_used", pe.n_restarts_used},
                                     {"converged", pe.converged}};
      break;
    }
  }
  return out;
}

Eigen::MatrixXd query_inputs(const Prepared& p, const std::string& query_path,
                             int query_count) {
  if (!query_path.empty()) {
    Eigen::MatrixXd q = read_csv_matrix(query_path);
    if (q.cols() != p.model.kernel.input_dim)
      throw ConfigError("query file has " + std::to_string(q.cols()) +
                        " columns, model expects " + std::to_string(p.model.kernel.input_dim));
    return q;
  }
  if (p.model.kernel.input_dim != 1)
    throw ConfigError("config: predict.query_path is required for multi-dimensional inputs");
  const double lo = p.model.data.X.col(0).minCoeff();
  const double hi = p.model.data.X.col(0).maxCoeff();
  const double pad = 0.05 * (hi - lo);
  Eigen::MatrixXd q(query_count, 1);
  for (int i = 0; i < query_count; ++i)
    q(i, 0) = lo - pad + (hi - lo + 2 * pad) * static_cast<double>(i) /
                             static_cast<double>(query_count - 1);
  return q;
}

// Artifacts accumulate in memory and hit disk only after the whole task
// succeeded, so a failure never leaves partial outputs.
struct ArtifactSet {
  std::map<std::string, std::string> files;

  void add(const std::string& name, std::string content) {
    files[name] = std::move(content);
  }
  void write_all(const std::filesystem::path& dir) const {
    for (const auto& [name, content] : files) atomic_write((dir / name).string(), content);
  }
};

void cmd_sample(const Prepared& p, ArtifactSet& artifacts) {
  const MethodOutput out = run_method(p.lc.run.method, p, p.lc.run.seed);
  json samples = samples_to_json(out.samples, p.coordinate_names,
                                 out.budget.value("likelihood_evals", 0ll));
  for (const auto& [key, value] : out.extra.items()) samples[key] = value;
  artifacts.add("samples.json", canonical_dump(samples));
  artifacts.add("budget.json", canonical_dump(out.budget));
}

void cmd_predict(const Prepared& p, ArtifactSet& artifacts) {
  const RunConfig& run = p.lc.run;
  const MethodOutput out = run_method(run.method, p, run.seed);
  const Eigen::MatrixXd Xstar = query_inputs(p, run.predict.query_path,
                                             run.predict.query_count);
  const PredictiveMixture mix = mixture_predict(out.samples, p.model, Xstar);
  artifacts.add("predictions.csv", mixture_to_csv(mix, Xstar));

  json samples = samples_to_json(out.samples, p.coordinate_names,
                                 out.budget.value("likelihood_evals", 0ll));
  for (const auto& [key, value] : out.extra.items()) samples[key] = value;
  artifacts.add("samples.json", canonical_dump(samples));
  artifacts.add("budget.json", canonical_dump(out.budget));

  if (!run.predict.test_path.empty()) {
    CsvSchema schema;
    schema.input_columns = p.lc.resolved["dataset"]["input_columns"].get<std::vector<int>>();
    schema.target_column = p.lc.resolved["dataset"]["target_column"].get<int>();
    const Dataset test = ingest_csv(run.predict.test_path, schema);
    const PredictiveMixture test_mix = mixture_predict(out.samples, p.model, test.X);
    auto [mean, var] = mixture_moments(test_mix);
    PredictiveGaussian moment_pred;
    moment_pred.mean = mean;
    moment_pred.var = var;
    json metrics;
    metrics["artifact"] = "metrics";
    metrics["test_points"] = test.size();
    metrics["smse"] = smse(mean, test.y, p.model.data.y);
    metrics["msll"] = msll(moment_pred, test.y, p.model.data.y);
    metrics["mixture_logpdf"] = mixture_logpdf(test_mix, test.y);
    artifacts.add("metrics.json", canonical_dump(metrics));
  }
}

void cmd_compare(const Prepared& p, ArtifactSet& artifacts) {
  const RunConfig& run = p.lc.run;
  const CompareSpec& cmp = run.compare;
  const Eigen::MatrixXd Xstar = query_inputs(p, "", cmp.query_count);
  const int R = cmp.runs;

  // Matched likelihood-evaluation budget: the sampler's ceiling with one
  // reweight and K proposals per particle per stage.
  const std::int64_t smc_budget =
      static_cast<std::int64_t>(run.smc.num_particles) * run.smc.num_batches *
      (1 + run.smc.mh_moves);
  const int is_budget = cmp.is_samples > 0 ? cmp.is_samples : static_cast<int>(smc_budget);

  json report;
  report["artifact"] = "dispersion_report";
  report["runs"] = R;
  report["is_samples"] = is_budget;
  report["smc_budget"] = smc_budget;

  for (std::size_t mi = 0; mi < cmp.methods.size(); ++mi) {
    const Method method = cmp.methods[mi];
    Eigen::MatrixXd means(Xstar.rows(), R);
    for (int r = 0; r < R; ++r) {
      const std::uint64_t seed = derive_seed(run.seed, stream::kCompare,
                                             static_cast<std::uint64_t>(mi),
                                             static_cast<std::uint64_t>(r));
      Prepared pr = p;  // same data and prior, fresh seed
      pr.lc.run.is_samples = is_budget;
      const MethodOutput out = run_method(method, pr, seed);
      const PredictiveMixture mix = mixture_predict(out.samples, pr.model, Xstar);
      means.col(r) = mixture_moments(mix).first;
    }
    Eigen::MatrixXd curve(Xstar.rows(), 1 + R);
    curve.col(0) = Xstar.col(0);
    curve.rightCols(R) = means;
    std::vector<std::string> header = {"x"};
    for (int r = 0; r < R; ++r) header.push_back("run" + std::to_string(r));
    artifacts.add("curves_" + method_name(method) + ".csv", matrix_to_csv(curve, header));

    // Population standard deviation across runs, averaged over the grid.
    const Eigen::VectorXd mean_over_runs = means.rowwise().mean();
    Eigen::VectorXd sd(Xstar.rows());
    for (Eigen::Index i = 0; i < Xstar.rows(); ++i) {
      const Eigen::VectorXd d = means.row(i).transpose().array() - mean_over_runs[i];
      sd[i] = std::sqrt(d.squaredNorm() / R);
    }
    json per_point = json::array();
    for (Eigen::Index i = 0; i < sd.size(); ++i) per_point.push_back(sd[i]);
    report["methods"][method_name(method)] = {{"dispersion", sd.mean()},
                                              {"per_point_std", std::move(per_point)}};
  }
  artifacts.add("dispersion.json", canonical_dump(report));
}

void cmd_changepoint(const Prepared& p, ArtifactSet& artifacts) {
  const RunConfig& run = p.lc.run;
  const ChangepointSpec& cps = run.changepoint;
  if (p.model.kernel.input_dim != 1)
    throw ConfigError("config: change-point detection needs a univariate series");

  GpSegmentConfig seg_cfg;
  seg_cfg.kernel = p.model.kernel;
  seg_cfg.mean = p.model.mean;
  seg_cfg.prior = p.prior;
  seg_cfg.num_particles = cps.num_particles;
  seg_cfg.mh_moves = cps.mh_moves;
  seg_cfg.seed = run.seed;
  GpSegmentFactory factory(seg_cfg);

  BocpdOptions opts;
  opts.hazard = cps.hazard;
  opts.prune_threshold = cps.prune_threshold;
  opts.max_run_lengths = cps.max_run_lengths;
  const BocpdState state = bocpd_run(factory, p.model.data.X, p.model.data.y, opts);

  const Eigen::MatrixXd map = run_length_map(state);
  std::vector<std::string> map_header;
  for (Eigen::Index r = 0; r < map.cols(); ++r)
    map_header.push_back("r" + std::to_string(r + 1));
  artifacts.add("run_length_map.csv", matrix_to_csv(map, map_header));

  Eigen::MatrixXd trace(static_cast<Eigen::Index>(state.cp_probability.size()), 2);
  for (std::size_t t = 0; t < state.cp_probability.size(); ++t) {
    trace(static_cast<Eigen::Index>(t), 0) = static_cast<double>(t + 1);
    trace(static_cast<Eigen::Index>(t), 1) = state.cp_probability[t];
  }
  artifacts.add("cp_probability.csv", matrix_to_csv(trace, {"t", "p_change"}));

  const std::vector<int> change_points = threshold_segments(state, cps.threshold);
  const int T = static_cast<int>(p.model.data.size());
  std::vector<std::pair<int, int>> segments;
  int start = 1;
  for (int cp : change_points) {
    segments.emplace_back(start, cp - 1);
    start = cp;
  }
  segments.emplace_back(start, T);

  json seg_json;
  seg_json["artifact"] = "segments";
  seg_json["threshold"] = cps.threshold;
  seg_json["change_points"] = change_points;
  json seg_list = json::array();
  for (auto [s, e] : segments) seg_list.push_back({{"start", s}, {"end", e}});
  seg_json["segments"] = std::move(seg_list);
  artifacts.add("segments.json", canonical_dump(seg_json));

  // Marginalized GP fit per extracted segment.
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto [s, e] = segments[k];
    GpModel seg_model = p.model;
    std::vector<int> rows;
    for (int t = s; t <= e; ++t) rows.push_back(t - 1);
    seg_model.data = p.model.data.rows(rows);

    SmcConfig cfg = run.smc;
    cfg.seed = derive_seed(run.seed, stream::kSegmentFit, static_cast<std::uint64_t>(k), 0);
    cfg.num_particles = cps.num_particles;
    cfg.mh_moves = cps.mh_moves;
    const int len = static_cast<int>(seg_model.data.size());
    cfg.num_batches = std::min(cfg.num_batches, len);
    TemperingSequence seq{seg_model, p.prior,
                          make_batches(len, cfg.num_batches, false, cfg.seed)};
    const ParticleSystem ps = gpsmc::run(cfg, seq);

    const double lo = seg_model.data.X.col(0).minCoeff();
    const double hi = seg_model.data.X.col(0).maxCoeff();
    Eigen::MatrixXd q(cps.segment_fit_points, 1);
    for (int i = 0; i < cps.segment_fit_points; ++i)
      q(i, 0) = lo + (hi - lo) * static_cast<double>(i) /
                         static_cast<double>(cps.segment_fit_points - 1);
    const PredictiveMixture mix = mixture_predict(from_particles(ps), seg_model, q);
    artifacts.add("segment_" + std::to_string(k) + ".csv", mixture_to_csv(mix, q));
  }
}

}  // namespace

std::string run_command(json doc, const std::string& expected_task,
                        const std::optional<std::string>& out_override,
                        const std::optional<std::uint64_t>& seed_override) {
  const auto t0 = std::chrono::steady_clock::now();
  doc = unwrap_manifest(std::move(doc));
  if (out_override) doc["output_dir"] = *out_override;
  if (seed_override) doc["seed"] = *seed_override;

  Prepared p = prepare(parse_config(std::move(doc)));
  if (!expected_task.empty() && task_name(p.lc.run.task) != expected_task)
    throw ConfigError("config declares task '" + task_name(p.lc.run.task) +
                      "' but the '" + expected_task + "' command was run");

  ArtifactSet artifacts;
  switch (p.lc.run.task) {
    case Task::kSample: cmd_sample(p, artifacts); break;
    case Task::kPredict: cmd_predict(p, artifacts); break;
    case Task::kCompare: cmd_compare(p, artifacts); break;
    case Task::kChangepoint: cmd_changepoint(p, artifacts); break;
  }

  const std::string config_text = canonical_dump(p.lc.resolved);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json manifest;
  manifest["artifact"] = "manifest";
  manifest["version"] = GPSMC_VERSION_STRING;
  manifest["seed"] = p.lc.run.seed;
  manifest["config_hash"] = hash_hex(config_text);
  manifest["config"] = p.lc.resolved;
  manifest["wall_time_seconds"] = wall;
  artifacts.add("manifest.json", canonical_dump(manifest));

  const std::filesystem::path out_dir(p.lc.run.output_dir);
  std::filesystem::create_directories(out_dir);
  artifacts.write_all(out_dir);
  return out_dir.string();
}

std::string run_command_file(const std::string& config_path, const std::string& preset,
                             const std::optional<std::string>& out_override,
                             const std::optional<std::uint64_t>& seed_override) {
  json doc = load_config_document(config_path);
  if (!preset.empty()) apply_preset(doc, preset);
  return run_command(std::move(doc), "", out_override, seed_override);
}

}  // namespace gpsmc
