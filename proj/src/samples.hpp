#pragma once

#include <vector>

#include <Eigen/Core>

namespace gpsmc {

struct ParticleSystem;

// A weighted hyperparameter ensemble, the common currency between the
// posterior approximations (sampler, grid, importance sampler) and the
// mixture predictor. Weights are normalized to sum to one.
struct WeightedSamples {
  std::vector<Eigen::VectorXd> thetas;
  Eigen::VectorXd weights;

  int size() const { return static_cast<int>(thetas.size()); }
  void validate() const;

  Eigen::VectorXd posterior_mean() const;
  Eigen::VectorXd posterior_variance() const;  // weighted population variance
};

WeightedSamples from_particles(const ParticleSystem& ps);

// Normalizes log weights in place and returns them as probabilities.
Eigen::VectorXd normalize_log_weights(const Eigen::VectorXd& log_w);

}  // namespace gpsmc
