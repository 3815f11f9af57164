#include "samples.hpp"

#include <cmath>

#include "common.hpp"
#include "smc.hpp"

namespace gpsmc {

void WeightedSamples::validate() const {
  if (thetas.empty()) throw ConfigError("weighted samples: empty ensemble");
  if (weights.size() != size()) throw ConfigError("weighted samples: weight count mismatch");
  const auto dim = thetas.front().size();
  for (const auto& t : thetas)
    if (t.size() != dim) throw ConfigError("weighted samples: inconsistent dimensions");
  for (int i = 0; i < size(); ++i)
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
      throw ConfigError("weighted samples: weights must be finite and non-negative");
  if (std::abs(weights.sum() - 1.0) > 1e-9)
    throw ConfigError("weighted samples: weights must sum to one");
}

Eigen::VectorXd WeightedSamples::posterior_mean() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(thetas.front().size());
  for (int i = 0; i < size(); ++i) m += weights[i] * thetas[i];
  return m;
}

Eigen::VectorXd WeightedSamples::posterior_variance() const {
  const Eigen::VectorXd m = posterior_mean();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(m.size());
  for (int i = 0; i < size(); ++i) {
    const Eigen::VectorXd d = thetas[i] - m;
    v += weights[i] * d.cwiseProduct(d);
  }
  return v;
}

WeightedSamples from_particles(const ParticleSystem& ps) {
  WeightedSamples ws;
  ws.thetas = ps.particles;
  ws.weights = ps.weights();
  return ws;
}

Eigen::VectorXd normalize_log_weights(const Eigen::VectorXd& log_w) {
  const double norm = log_sum_exp(log_w);
  if (!std::isfinite(norm))
    throw NumericError("normalize_log_weights: all weights vanished");
  // Scalar exp: Eigen's vectorized exp clamps -inf to a subnormal instead
  // of zero, and a -inf log weight must come out as exactly zero mass.
  Eigen::VectorXd w(log_w.size());
  for (Eigen::Index i = 0; i < log_w.size(); ++i) w[i] = std::exp(log_w[i] - norm);
  return w;
}

}  // namespace gpsmc
