#include "baselines.hpp"

#include <cmath>
#include <limits>

#include "common.hpp"
#include "rng.hpp"

namespace gpsmc {

std::int64_t GridSpec::total_nodes() const {
  std::int64_t total = 1;
  for (const auto& ax : axes) {
    total *= ax.count;
    if (total > max_nodes) return total;  // early out before overflow territory
  }
  return total;
}

void GridSpec::validate() const {
  if (axes.empty()) throw ConfigError("grid: no axes");
  for (int d = 0; d < dim(); ++d) {
    const auto& ax = axes[d];
    if (ax.count < 1) throw ConfigError("grid: axis count must be >= 1");
    if (ax.count == 1) {
      if (ax.lo != ax.hi) throw ConfigError("grid: a single-node axis needs lo == hi");
    } else if (!(ax.lo < ax.hi)) {
      throw ConfigError("grid: axis needs lo < hi");
    }
  }
  if (total_nodes() > max_nodes) throw ConfigError("grid: node cap exceeded");
}

Eigen::VectorXd GridSpec::node(std::int64_t flat_index) const {
  Eigen::VectorXd theta(dim());
  // Last axis varies fastest.
  for (int d = dim() - 1; d >= 0; --d) {
    const auto& ax = axes[d];
    const std::int64_t idx = flat_index % ax.count;
    flat_index /= ax.count;
    theta[d] = ax.count == 1 ? ax.lo
                             : ax.lo + (ax.hi - ax.lo) * static_cast<double>(idx) /
                                           static_cast<double>(ax.count - 1);
  }
  return theta;
}

WeightedSamples grid_posterior(const GpModel& model, const PriorSpec& prior,
                               const GridSpec& grid) {
  grid.validate();
  prior.validate_against(model.layout());
  if (grid.dim() != prior.dim()) throw ConfigError("grid: dimension does not match the model");
  const std::int64_t total = grid.total_nodes();
  WeightedSamples ws;
  ws.thetas.reserve(total);
  Eigen::VectorXd log_w(total);
  for (std::int64_t i = 0; i < total; ++i) {
    Eigen::VectorXd theta = grid.node(i);
    double lw = log_prior(prior, theta);
    if (lw != kNegInf && model.data.size() > 0)
      lw += log_marginal_likelihood(model, theta);
    log_w[i] = lw;
    ws.thetas.push_back(std::move(theta));
  }
  ws.weights = normalize_log_weights(log_w);
  return ws;
}

WeightedSamples prior_importance_sampler(const GpModel& model, const PriorSpec& prior,
                                         int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("importance sampler: need at least one sample");
  prior.validate_against(model.layout());
  WeightedSamples ws;
  ws.thetas = sample_prior(prior, n, seed);
  Eigen::VectorXd log_w(n);
  for (int i = 0; i < n; ++i)
    log_w[i] = model.data.size() > 0 ? log_marginal_likelihood(model, ws.thetas[i]) : 0.0;
  ws.weights = normalize_log_weights(log_w);
  return ws;
}

PointEstimate optimize_point_estimate(const GpModel& model, const PriorSpec& prior,
                                      int n_restarts, std::uint64_t seed,
                                      const OptimOptions& opts) {
  if (n_restarts < 1) throw ConfigError("point estimate: need at least one restart");
  prior.validate_against(model.layout());
  const auto free_mask = prior.free_mask();

  // Minimize the negative log marginal likelihood over the free coordinates,
  // with fixed coordinates spliced back in around the optimizer.
  std::vector<int> free_idx;
  for (int d = 0; d < prior.dim(); ++d)
    if (free_mask[d]) free_idx.push_back(d);
  if (free_idx.empty()) throw ConfigError("point estimate: every coordinate is fixed");

  PointEstimate best;
  best.log_likelihood = kNegInf;
  best.n_restarts_used = n_restarts;

  for (int r = 0; r < n_restarts; ++r) {
    Rng rng(derive_seed(seed, stream::kRestart, 0, static_cast<std::uint64_t>(r)));
    const Eigen::VectorXd start_full = sample_prior_one(prior, rng);
    Eigen::VectorXd full = start_full;

    auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad_out) -> double {
      for (size_t k = 0; k < free_idx.size(); ++k) full[free_idx[k]] = x[k];
      grad_out.resize(static_cast<int>(free_idx.size()));
      try {
        auto [lml, grad] = log_marginal_likelihood_grad(model, full);
        for (size_t k = 0; k < free_idx.size(); ++k) grad_out[k] = -grad[free_idx[k]];
        return -lml;
      } catch (const NumericError&) {
        grad_out.setZero();
        return std::numeric_limits<double>::infinity();
      }
    };

    Eigen::VectorXd x0(static_cast<int>(free_idx.size()));
    for (size_t k = 0; k < free_idx.size(); ++k) x0[k] = start_full[free_idx[k]];

    OptimResult res;
    try {
      res = bfgs_minimize(objective, x0, opts);
    } catch (const NumericError&) {
      ++best.function_evals;  // the failed evaluation at the starting point
      continue;
    }
    best.function_evals += res.function_evals;
    if (-res.value > best.log_likelihood) {
      for (size_t k = 0; k < free_idx.size(); ++k) full[free_idx[k]] = res.x[k];
      best.theta = full;
      best.log_likelihood = -res.value;
      best.converged = res.converged;
    }
  }
  if (best.log_likelihood == kNegInf)
    throw NumericError("point estimate: every restart started at an infeasible point");
  return best;
}

}  // namespace gpsmc
