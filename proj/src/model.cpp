#include "model.hpp"

#include <cmath>

namespace gpsmc {

void Dataset::validate() const {
  if (X.rows() != y.size()) {
    throw ConfigError("dataset row count mismatch: X has " + std::to_string(X.rows()) +
                      " rows, y has " + std::to_string(y.size()) + " entries");
  }
  if (!X.allFinite() || !y.allFinite()) {
    throw ConfigError("dataset contains non-finite entries");
  }
}

Dataset Dataset::rows(const std::vector<int>& idx) const {
  Dataset out;
  out.X.resize(static_cast<Eigen::Index>(idx.size()), X.cols());
  out.y.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const int i = idx[k];
    if (i < 0 || i >= X.rows()) {
      throw ConfigError("row index " + std::to_string(i) + " out of range [0, " +
                        std::to_string(X.rows()) + ")");
    }
    out.X.row(static_cast<Eigen::Index>(k)) = X.row(i);
    out.y[static_cast<Eigen::Index>(k)] = y[i];
  }
  return out;
}

std::string ModelLayout::coordinate_name(int i) const {
  const int kl = kernel.length_scale_count();
  const int kp = kernel_param_count();
  if (i < kl) {
    return kl == 1 ? "log_length_scale" : "log_length_scale_" + std::to_string(i);
  }
  if (i == kl) return "log_signal_variance";
  if (i < kp + mean_param_count()) {
    const int m = i - kp;
    switch (mean.family) {
      case MeanFamily::kConstant: return "mean_constant";
      case MeanFamily::kLinear:
        return m < kernel.input_dim ? "mean_slope_" + std::to_string(m) : "mean_offset";
      default: break;
    }
  }
  if (i == noise_index()) return "log_noise_variance";
  return "theta_" + std::to_string(i);
}

void ModelLayout::check_theta(const Eigen::VectorXd& theta) const {
  if (theta.size() != dim()) {
    throw ConfigError("hyperparameter vector has " + std::to_string(theta.size()) +
                      " entries, model declares " + std::to_string(dim()));
  }
  if (!theta.allFinite()) throw ConfigError("hyperparameter vector has non-finite entries");
}

double noise_variance(const ModelLayout& layout, const Eigen::VectorXd& theta) {
  return std::exp(theta[layout.noise_index()]);
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Eigen::VectorXd& theta,
                              const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.cols() != spec.input_dim || B.cols() != spec.input_dim) {
    throw ConfigError("kernel input dimension mismatch: spec declares " +
                      std::to_string(spec.input_dim) + ", got " + std::to_string(A.cols()) +
                      " and " + std::to_string(B.cols()));
  }
  if (theta.size() < spec.param_count()) {
    throw ConfigError("kernel needs " + std::to_string(spec.param_count()) +
                      " hyperparameters, got " + std::to_string(theta.size()));
  }

  const int nl = spec.length_scale_count();
  Eigen::VectorXd inv_l2(spec.input_dim);
  for (int k = 0; k < spec.input_dim; ++k) {
    const double l = std::exp(theta[nl == 1 ? 0 : k]);
    inv_l2[k] = 1.0 / (l * l);
  }
  const double sf2 = std::exp(theta[nl]);

  Eigen::MatrixXd K(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < B.rows(); ++j) {
      double z = 0.0;
      for (int k = 0; k < spec.input_dim; ++k) {
        const double d = A(i, k) - B(j, k);
        z += d * d * inv_l2[k];
      }
      K(i, j) = sf2 * std::exp(-0.5 * z);
    }
  }
  return K;
}

Eigen::VectorXd mean_vector(const ModelLayout& layout, const Eigen::VectorXd& theta,
                            const Eigen::MatrixXd& X) {
  const int off = layout.kernel_param_count();
  switch (layout.mean.family) {
    case MeanFamily::kZero:
      return Eigen::VectorXd::Zero(X.rows());
    case MeanFamily::kConstant:
      return Eigen::VectorXd::Constant(X.rows(), theta[off]);
    case MeanFamily::kLinear: {
      const int d = layout.kernel.input_dim;
      const Eigen::VectorXd w = theta.segment(off, d);
      const double b = theta[off + d];
      return (X * w).array() + b;
    }
  }
  return Eigen::VectorXd::Zero(X.rows());
}

}  // namespace gpsmc
