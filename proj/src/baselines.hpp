#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "gp.hpp"
#include "optim.hpp"
#include "priors.hpp"
#include "samples.hpp"

namespace gpsmc {

// Axis-aligned grid in the unconstrained parameter space. A count-1 axis
// pins the coordinate at lo (lo == hi), used for coordinates held fixed.
struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
};

struct GridSpec {
  std::vector<GridAxis> axes;
  std::int64_t max_nodes = 10'000'000;

  int dim() const { return static_cast<int>(axes.size()); }
  std::int64_t total_nodes() const;
  void validate() const;
  Eigen::VectorXd node(std::int64_t flat_index) const;
};

// Deterministic marginalization: every grid node weighted by
// exp(log prior + log likelihood), normalized.
WeightedSamples grid_posterior(const GpModel& model, const PriorSpec& prior,
                               const GridSpec& grid);

// Prior draws weighted by the full-data likelihood. Uses the same
// per-particle seed streams as the sampler's initialization, so a sampler
// run with P=1 and no move steps reproduces it exactly.
WeightedSamples prior_importance_sampler(const GpModel& model, const PriorSpec& prior,
                                         int n, std::uint64_t seed);

struct PointEstimate {
  Eigen::VectorXd theta;
  double log_likelihood = 0.0;
  int n_restarts_used = 0;
  bool converged = false;
  int function_evals = 0;  // objective evaluations summed over restarts
};

// Type-II maximum likelihood: quasi-Newton ascent on the log marginal
// likelihood from prior-drawn starts, best optimum over all restarts.
// Coordinates with point-mass priors stay pinned at their values.
PointEstimate optimize_point_estimate(const GpModel& model, const PriorSpec& prior,
                                      int n_restarts, std::uint64_t seed,
                                      const OptimOptions& opts = {});

}  // namespace gpsmc
