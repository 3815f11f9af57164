#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "gp.hpp"
#include "samples.hpp"

namespace gpsmc {

// The marginalized predictive: a weighted mixture of per-sample GP
// predictives sharing one set of query inputs.
struct PredictiveMixture {
  std::vector<PredictiveGaussian> components;
  Eigen::VectorXd weights;

  int num_components() const { return static_cast<int>(components.size()); }
  int num_points() const {
    return components.empty() ? 0 : static_cast<int>(components.front().mean.size());
  }
  void validate() const;
};

// One predict per sample, weights copied through. want_cov requests full
// predictive covariances on the components; marginals are the default.
PredictiveMixture mixture_predict(const WeightedSamples& samples, const GpModel& model,
                                  const Eigen::MatrixXd& Xstar, bool want_cov = false);

// Moment-matched summary: mean = sum w_i mu_i and, per query point,
// variance = sum w_i (var_i + mu_i^2) - mean^2.
std::pair<Eigen::VectorXd, Eigen::VectorXd> mixture_moments(const PredictiveMixture& mix);

// log sum_i w_i N(y_j; mu_ij, var_ij) for each query point j, in log space.
Eigen::VectorXd mixture_logpdf_per_point(const PredictiveMixture& mix,
                                         const Eigen::VectorXd& ystar);
// Joint log density over all points under per-point independence: the sum of
// the per-point values.
double mixture_logpdf(const PredictiveMixture& mix, const Eigen::VectorXd& ystar);

// Rows: one query point per line with the input coordinates, mixture mean
// and mixture standard deviation. with_components appends per-component
// mean/std column pairs.
std::string mixture_to_csv(const PredictiveMixture& mix, const Eigen::MatrixXd& Xstar,
                           bool with_components = false);

}  // namespace gpsmc
