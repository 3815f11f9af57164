#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "common.hpp"

namespace gpsmc {

enum class KernelFamily { kSquaredExponentialIso, kSquaredExponentialArd };
enum class MeanFamily { kZero, kConstant, kLinear };

// Squared-exponential covariance. Hyperparameters, in order: one log
// length-scale per dimension (one total for iso), then log signal variance.
struct KernelSpec {
  KernelFamily family = KernelFamily::kSquaredExponentialIso;
  int input_dim = 1;

  int length_scale_count() const {
    return family == KernelFamily::kSquaredExponentialArd ? input_dim : 1;
  }
  int param_count() const { return length_scale_count() + 1; }
};

struct MeanSpec {
  MeanFamily family = MeanFamily::kZero;

  // Zero: none. Constant: one offset. Linear: one slope per dimension + offset.
  int param_count(int input_dim) const {
    switch (family) {
      case MeanFamily::kZero: return 0;
      case MeanFamily::kConstant: return 1;
      case MeanFamily::kLinear: return input_dim + 1;
    }
    return 0;
  }
};

struct Dataset {
  Eigen::MatrixXd X;  // n x d
  Eigen::VectorXd y;  // n

  Eigen::Index size() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }
  void validate() const;
  Dataset rows(const std::vector<int>& idx) const;
};

// Flat hyperparameter vector layout:
//   [kernel params..., mean params..., log noise variance]
// Positive quantities (length-scales, signal variance, noise variance) are
// stored as logs; mean parameters stay in natural space.
struct ModelLayout {
  KernelSpec kernel;
  MeanSpec mean;

  int kernel_param_count() const { return kernel.param_count(); }
  int mean_param_count() const { return mean.param_count(kernel.input_dim); }
  int dim() const { return kernel_param_count() + mean_param_count() + 1; }
  int noise_index() const { return dim() - 1; }
  bool is_log_coordinate(int i) const {
    return i < kernel_param_count() || i == noise_index();
  }
  std::string coordinate_name(int i) const;
  void check_theta(const Eigen::VectorXd& theta) const;
};

double noise_variance(const ModelLayout& layout, const Eigen::VectorXd& theta);

// k(a,b) = sf2 * exp(-0.5 * sum_k (a_k - b_k)^2 / l_k^2). Length-scales and
// signal variance are exp() of the leading theta entries.
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Eigen::VectorXd& theta,
                              const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

Eigen::VectorXd mean_vector(const ModelLayout& layout, const Eigen::VectorXd& theta,
                            const Eigen::MatrixXd& X);

}  // namespace gpsmc
