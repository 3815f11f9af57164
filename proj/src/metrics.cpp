#include "metrics.hpp"

#include <string>

namespace gpsmc {

double population_variance(const Eigen::VectorXd& v) {
  const double m = v.mean();
  return (v.array() - m).square().mean();
}

double smse(const Eigen::VectorXd& pred_mean, const Eigen::VectorXd& y_true,
            const Eigen::VectorXd& y_train) {
  if (pred_mean.size() != y_true.size()) {
    throw ConfigError("smse: prediction and truth lengths differ");
  }
  const double var = population_variance(y_train);
  if (var <= 0.0) throw ConfigError("smse: training targets have zero variance");
  return (pred_mean - y_true).squaredNorm() / static_cast<double>(y_true.size()) / var;
}

double msll(const PredictiveGaussian& pred, const Eigen::VectorXd& y_true,
            const Eigen::VectorXd& y_train) {
  if (pred.mean.size() != y_true.size()) {
    throw ConfigError("msll: prediction and truth lengths differ");
  }
  const double tm = y_train.mean();
  const double tv = population_variance(y_train);
  if (tv <= 0.0) throw ConfigError("msll: training targets have zero variance");

  double acc = 0.0;
  for (Eigen::Index i = 0; i < y_true.size(); ++i) {
    if (!(pred.var[i] > 0.0)) {
      throw ConfigError("msll: non-positive predictive variance at point " + std::to_string(i));
    }
    acc += -log_normal_pdf(y_true[i], pred.mean[i], pred.var[i]) +
           log_normal_pdf(y_true[i], tm, tv);
  }
  return acc / static_cast<double>(y_true.size());
}

}  // namespace gpsmc
