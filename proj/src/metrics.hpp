#pragma once

#include <Eigen/Core>

#include "gp.hpp"

namespace gpsmc {

// Population variance (divide by n): the normalizer that sends the trivial
// train-mean predictor to exactly 1.
double population_variance(const Eigen::VectorXd& v);

// mean((pred - true)^2) / var(y_train)
double smse(const Eigen::VectorXd& pred_mean, const Eigen::VectorXd& y_true,
            const Eigen::VectorXd& y_train);

// mean over points of -log N(true; pred) minus the same under the Gaussian
// fit to the training moments. 0 for the trivial predictor, negative if better.
double msll(const PredictiveGaussian& pred, const Eigen::VectorXd& y_true,
            const Eigen::VectorXd& y_train);

}  // namespace gpsmc
