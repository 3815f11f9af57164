#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "model.hpp"

namespace gpsmc {

struct GpModel {
  KernelSpec kernel;
  MeanSpec mean;
  Dataset data;

  ModelLayout layout() const { return ModelLayout{kernel, mean}; }
};

struct PredictiveGaussian {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;                 // marginal variances of y*, noise included
  std::optional<Eigen::MatrixXd> cov;  // full covariance when requested
};

// Cholesky of a symmetric matrix with a retry ladder: on failure, jitter
// 1e-10 * mean(diag) is added to the diagonal and grown by 10x up to
// 1e-4 * mean(diag). Throws NumericError carrying the last attempted jitter.
Eigen::LLT<Eigen::MatrixXd> cholesky_with_jitter(const Eigen::MatrixXd& K,
                                                 double* jitter_used = nullptr);

// log N(y; m_theta(X), K_theta(X,X) + sn2*I) of the model's full dataset.
double log_marginal_likelihood(const GpModel& model, const Eigen::VectorXd& theta);

// Same, restricted to a row subset.
double log_marginal_likelihood(const GpModel& model, const Eigen::VectorXd& theta,
                               const std::vector<int>& rows);

// Value plus analytic gradient in the unconstrained coordinates.
std::pair<double, Eigen::VectorXd> log_marginal_likelihood_grad(const GpModel& model,
                                                                const Eigen::VectorXd& theta);

// log p(y_new | y_given, theta): predictive density of the rows in new_rows
// conditioned on the rows in given_rows. Equals lml(given+new) - lml(given).
double conditional_log_marginal_likelihood(const GpModel& model, const Eigen::VectorXd& theta,
                                           const std::vector<int>& given_rows,
                                           const std::vector<int>& new_rows);

// Exact GP posterior predictive of noisy outputs y*. An empty training set
// gives the prior predictive.
PredictiveGaussian predict(const GpModel& model, const Eigen::VectorXd& theta,
                           const Eigen::MatrixXd& Xstar, bool want_cov = false);

PredictiveGaussian predict(const GpModel& model, const Eigen::VectorXd& theta,
                           const Eigen::MatrixXd& Xstar, bool want_cov,
                           const std::vector<int>& rows);

// Subset-of-regressors approximation with inducing points drawn from the
// training rows: mean = Ksu (sn2 Kuu + Kuf Kfu)^-1 Kuf y, variance
// sn2 Ksu (sn2 Kuu + Kuf Kfu)^-1 Kus (+ sn2 on the outputs).
PredictiveGaussian predict_sor(const GpModel& model, const Eigen::VectorXd& theta,
                               const std::vector<int>& inducing, const Eigen::MatrixXd& Xstar);

}  // namespace gpsmc
