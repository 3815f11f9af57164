#include "gpsmc/gpsmc.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

#include "baselines.hpp"
#include "commands.hpp"
#include "common.hpp"
#include "csv.hpp"
#include "mixture.hpp"
#include "smc.hpp"

using namespace gpsmc;

struct gpsmc_dataset {
  Dataset data;
};

struct gpsmc_model {
  KernelSpec kernel;
  MeanSpec mean;
  PriorSpec prior;
  std::vector<bool> prior_set;

  ModelLayout layout() const { return {kernel, mean}; }
  void require_priors() const {
    for (std::size_t i = 0; i < prior_set.size(); ++i)
      if (!prior_set[i])
        throw ConfigError("no prior set for coordinate '" +
                          layout().coordinate_name(static_cast<int>(i)) + "'");
  }
};

struct gpsmc_samples {
  WeightedSamples ws;
  std::int64_t evals = 0;
};

struct gpsmc_mixture {
  PredictiveMixture mix;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
  g_last_error = what;
  return code;
}

// Runs the body, translating exceptions to status codes.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return GPSMC_OK;
  } catch (const ConfigError& e) {
    return fail(GPSMC_ERR_CONFIG, e.what());
  } catch (const NumericError& e) {
    return fail(GPSMC_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return fail(GPSMC_ERR_NUMERIC, e.what());
  }
}

GpModel bind(const gpsmc_model* model, const gpsmc_dataset* data) {
  GpModel m;
  m.kernel = model->kernel;
  m.mean = model->mean;
  m.data = data->data;
  if (m.data.dim() != model->kernel.input_dim)
    throw ConfigError("dataset dimension " + std::to_string(m.data.dim()) +
                      " does not match model input_dim " +
                      std::to_string(model->kernel.input_dim));
  return m;
}

}  // namespace

extern "C" {

const char* gpsmc_version(void) {
#ifdef GPSMC_VERSION_STRING
  return GPSMC_VERSION_STRING;
#else
  return "unknown";
#endif
}

const char* gpsmc_last_error(void) { return g_last_error.c_str(); }

int gpsmc_dataset_create(const double* X, const double* y, int n, int d,
                         gpsmc_dataset** out) {
  if (!X || !y || !out || n < 1 || d < 1)
    return fail(GPSMC_ERR_INVALID, "gpsmc_dataset_create: bad argument");
  return guarded([&] {
    auto ds = std::make_unique<gpsmc_dataset>();
    ds->data.X.resize(n, d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) ds->data.X(i, j) = X[static_cast<size_t>(i) * d + j];
    ds->data.y = Eigen::Map<const Eigen::VectorXd>(y, n);
    ds->data.validate();
    *out = ds.release();
  });
}

int gpsmc_dataset_from_csv(const char* path, const int* input_cols, int n_inputs,
                           int target_col, gpsmc_dataset** out) {
  if (!path || !input_cols || n_inputs < 1 || !out)
    return fail(GPSMC_ERR_INVALID, "gpsmc_dataset_from_csv: bad argument");
  return guarded([&] {
    CsvSchema schema;
    schema.input_columns.assign(input_cols, input_cols + n_inputs);
    schema.target_column = target_col;
    auto ds = std::make_unique<gpsmc_dataset>();
    ds->data = ingest_csv(path, schema);
    *out = ds.release();
  });
}

int gpsmc_dataset_size(const gpsmc_dataset* data, int* n, int* d) {
  if (!data) return fail(GPSMC_ERR_INVALID, "gpsmc_dataset_size: null dataset");
  if (n) *n = static_cast<int>(data->data.size());
  if (d) *d = static_cast<int>(data->data.dim());
  return GPSMC_OK;
}

void gpsmc_dataset_free(gpsmc_dataset* data) { delete data; }

int gpsmc_model_create(const char* kernel, const char* mean, int input_dim,
                       gpsmc_model** out) {
  if (!kernel || !mean || !out || input_dim < 1)
    return fail(GPSMC_ERR_INVALID, "gpsmc_model_create: bad argument");
  return guarded([&] {
    auto m = std::make_unique<gpsmc_model>();
    m->kernel.input_dim = input_dim;
    const std::string k = kernel;
    if (k == "se_iso") m->kernel.family = KernelFamily::kSquaredExponentialIso;
    else if (k == "se_ard") m->kernel.family = KernelFamily::kSquaredExponentialArd;
    else throw ConfigError("unknown kernel '" + k + "' (expected se_iso|se_ard)");
    const std::string mn = mean;
    if (mn == "zero") m->mean.family = MeanFamily::kZero;
    else if (mn == "constant") m->mean.family = MeanFamily::kConstant;
    else if (mn == "linear") m->mean.family = MeanFamily::kLinear;
    else throw ConfigError("unknown mean '" + mn + "' (expected zero|constant|linear)");
    const int dim = m->layout().dim();
    m->prior.coords.resize(dim);
    m->prior_set.assign(static_cast<std::size_t>(dim), false);
    *out = m.release();
  });
}

int gpsmc_model_dim(const gpsmc_model* model, int* dim) {
  if (!model || !dim) return fail(GPSMC_ERR_INVALID, "gpsmc_model_dim: bad argument");
  *dim = model->layout().dim();
  return GPSMC_OK;
}

int gpsmc_model_coordinate_name(const gpsmc_model* model, int coordinate, char* buf,
                                size_t buf_len) {
  if (!model || !buf || buf_len == 0)
    return fail(GPSMC_ERR_INVALID, "gpsmc_model_coordinate_name: bad argument");
  if (coordinate < 0 || coordinate >= model->layout().dim())
    return fail(GPSMC_ERR_INVALID, "gpsmc_model_coordinate_name: coordinate out of range");
  const std::string name = model->layout().coordinate_name(coordinate);
  std::strncpy(buf, name.c_str(), buf_len - 1);
  buf[buf_len - 1] = '\0';
  return GPSMC_OK;
}

int gpsmc_model_set_prior(gpsmc_model* model, int coordinate, const char* kind, double a,
                          double b) {
  if (!model || !kind) return fail(GPSMC_ERR_INVALID, "gpsmc_model_set_prior: bad argument");
  if (coordinate < 0 || coordinate >= model->layout().dim())
    return fail(GPSMC_ERR_INVALID, "gpsmc_model_set_prior: coordinate out of range");
  return guarded([&] {
    const std::string k = kind;
    CoordinatePrior p;
    if (k == "gaussian_on_log") p = CoordinatePrior::gaussian_on_log(a, b);
    else if (k == "gaussian") p = CoordinatePrior::gaussian_on_natural(a, b);
    else if (k == "uniform_on_log") p = CoordinatePrior::uniform_on_log(a, b);
    else if (k == "fixed") p = CoordinatePrior::fixed(a);
    else
      throw ConfigError("unknown prior kind '" + k +
                        "' (expected gaussian_on_log|gaussian|uniform_on_log|fixed)");
    // Reject a mismatched space up front rather than at sampling time; unset
    // coordinates get space-matched placeholders for the probe.
    PriorSpec probe = model->prior;
    probe.coords[coordinate] = p;
    for (int i = 0; i < model->layout().dim(); ++i) {
      if (i == coordinate || model->prior_set[static_cast<std::size_t>(i)]) continue;
      probe.coords[i] = model->layout().is_log_coordinate(i)
                            ? CoordinatePrior::gaussian_on_log(0.0, 1.0)
                            : CoordinatePrior::gaussian_on_natural(0.0, 1.0);
    }
    probe.validate_against(model->layout());
    model->prior.coords[coordinate] = p;
    model->prior_set[static_cast<std::size_t>(coordinate)] = true;
  });
}

void gpsmc_model_free(gpsmc_model* model) { delete model; }

int gpsmc_log_marginal_likelihood(const gpsmc_model* model, const gpsmc_dataset* data,
                                  const double* theta, double* out) {
  if (!model || !data || !theta || !out)
    return fail(GPSMC_ERR_INVALID, "gpsmc_log_marginal_likelihood: bad argument");
  return guarded([&] {
    const GpModel m = bind(model, data);
    const Eigen::Map<const Eigen::VectorXd> t(theta, m.layout().dim());
    *out = log_marginal_likelihood(m, t);
  });
}

int gpsmc_sample_smc(const gpsmc_model* model, const gpsmc_dataset* data, int num_particles,
                     int num_batches, int mh_moves, double ess_threshold, uint64_t seed,
                     gpsmc_samples** out) {
  if (!model || !data || !out) return fail(GPSMC_ERR_INVALID, "gpsmc_sample_smc: bad argument");
  return guarded([&] {
    model->require_priors();
    SmcConfig cfg;
    cfg.num_particles = num_particles;
    cfg.num_batches = num_batches;
    cfg.mh_moves = mh_moves;
    cfg.ess_threshold = ess_threshold;
    cfg.seed = seed;
    TemperingSequence seq{bind(model, data), model->prior,
                          make_batches(static_cast<int>(data->data.size()), num_batches,
                                       false, seed)};
    const ParticleSystem ps = run(cfg, seq);
    auto s = std::make_unique<gpsmc_samples>();
    s->ws = from_particles(ps);
    s->evals = ps.eval_counter;
    *out = s.release();
  });
}

int gpsmc_sample_prior_is(const gpsmc_model* model, const gpsmc_dataset* data, int n,
                          uint64_t seed, gpsmc_samples** out) {
  if (!model || !data || !out)
    return fail(GPSMC_ERR_INVALID, "gpsmc_sample_prior_is: bad argument");
  return guarded([&] {
    model->require_priors();
    auto s = std::make_unique<gpsmc_samples>();
    s->ws = prior_importance_sampler(bind(model, data), model->prior, n, seed);
    s->evals = n;
    *out = s.release();
  });
}

int gpsmc_samples_count(const gpsmc_samples* samples, int* count) {
  if (!samples || !count) return fail(GPSMC_ERR_INVALID, "gpsmc_samples_count: bad argument");
  *count = samples->ws.size();
  return GPSMC_OK;
}

int gpsmc_samples_dim(const gpsmc_samples* samples, int* dim) {
  if (!samples || !dim) return fail(GPSMC_ERR_INVALID, "gpsmc_samples_dim: bad argument");
  *dim = samples->ws.thetas.empty() ? 0 : static_cast<int>(samples->ws.thetas.front().size());
  return GPSMC_OK;
}

int gpsmc_samples_get(const gpsmc_samples* samples, int i, double* theta, double* weight) {
  if (!samples) return fail(GPSMC_ERR_INVALID, "gpsmc_samples_get: null samples");
  if (i < 0 || i >= samples->ws.size())
    return fail(GPSMC_ERR_INVALID, "gpsmc_samples_get: index out of range");
  if (theta) {
    const Eigen::VectorXd& t = samples->ws.thetas[static_cast<std::size_t>(i)];
    for (Eigen::Index d = 0; d < t.size(); ++d) theta[d] = t[d];
  }
  if (weight) *weight = samples->ws.weights[i];
  return GPSMC_OK;
}

int gpsmc_samples_evals(const gpsmc_samples* samples, int64_t* evals) {
  if (!samples || !evals) return fail(GPSMC_ERR_INVALID, "gpsmc_samples_evals: bad argument");
  *evals = samples->evals;
  return GPSMC_OK;
}

void gpsmc_samples_free(gpsmc_samples* samples) { delete samples; }

int gpsmc_predict(const gpsmc_model* model, const gpsmc_dataset* data,
                  const gpsmc_samples* samples, const double* Xstar, int n_star,
                  gpsmc_mixture** out) {
  if (!model || !data || !samples || !Xstar || n_star < 1 || !out)
    return fail(GPSMC_ERR_INVALID, "gpsmc_predict: bad argument");
  return guarded([&] {
    const GpModel m = bind(model, data);
    Eigen::MatrixXd q(n_star, m.kernel.input_dim);
    for (int i = 0; i < n_star; ++i)
      for (int j = 0; j < m.kernel.input_dim; ++j)
        q(i, j) = Xstar[static_cast<size_t>(i) * m.kernel.input_dim + j];
    auto mx = std::make_unique<gpsmc_mixture>();
    mx->mix = mixture_predict(samples->ws, m, q);
    *out = mx.release();
  });
}

int gpsmc_mixture_moments(const gpsmc_mixture* mixture, double* mean, double* var) {
  if (!mixture) return fail(GPSMC_ERR_INVALID, "gpsmc_mixture_moments: null mixture");
  return guarded([&] {
    auto [m, v] = gpsmc::mixture_moments(mixture->mix);
    if (mean)
      for (Eigen::Index i = 0; i < m.size(); ++i) mean[i] = m[i];
    if (var)
      for (Eigen::Index i = 0; i < v.size(); ++i) var[i] = v[i];
  });
}

int gpsmc_mixture_logpdf(const gpsmc_mixture* mixture, const double* y, double* out) {
  if (!mixture || !y || !out)
    return fail(GPSMC_ERR_INVALID, "gpsmc_mixture_logpdf: bad argument");
  return guarded([&] {
    const Eigen::Map<const Eigen::VectorXd> yv(y, mixture->mix.num_points());
    *out = mixture_logpdf(mixture->mix, yv);
  });
}

int gpsmc_mixture_size(const gpsmc_mixture* mixture, int* n_points, int* n_components) {
  if (!mixture) return fail(GPSMC_ERR_INVALID, "gpsmc_mixture_size: null mixture");
  if (n_points) *n_points = mixture->mix.num_points();
  if (n_components) *n_components = mixture->mix.num_components();
  return GPSMC_OK;
}

void gpsmc_mixture_free(gpsmc_mixture* mixture) { delete mixture; }

int gpsmc_run_command(const char* config_json, const char* task, const char* preset,
                      const char* out_dir, const uint64_t* seed, char** out_dir_used) {
  if (!config_json) return fail(GPSMC_ERR_INVALID, "gpsmc_run_command: null config");
  return guarded([&] {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    doc = unwrap_manifest(std::move(doc));
    if (preset && *preset) apply_preset(doc, preset);
    std::optional<std::string> out_override;
    if (out_dir && *out_dir) out_override = out_dir;
    std::optional<std::uint64_t> seed_override;
    if (seed) seed_override = *seed;
    const std::string used = run_command(std::move(doc), task ? task : "", out_override,
                                         seed_override);
    if (out_dir_used) {
      *out_dir_used = static_cast<char*>(std::malloc(used.size() + 1));
      if (*out_dir_used) std::memcpy(*out_dir_used, used.c_str(), used.size() + 1);
    }
  });
}

void gpsmc_string_free(char* s) { std::free(s); }

}  // extern "C"
