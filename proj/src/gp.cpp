#include "gp.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace gpsmc {

namespace {

std::vector<int> all_rows(const Dataset& data) {
  std::vector<int> idx(static_cast<std::size_t>(data.size()));
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

struct Workspace {
  Dataset sub;
  Eigen::MatrixXd Ky;          // K + sn2*I on the subset
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd resid;       // y - m(X)
  Eigen::VectorXd alpha;       // Ky^-1 resid
  double sn2 = 0.0;
};

Workspace factorize(const GpModel& model, const Eigen::VectorXd& theta,
                    const std::vector<int>& rows) {
  Workspace w;
  w.sub = model.data.rows(rows);
  w.sn2 = noise_variance(model.layout(), theta);
  w.Ky = kernel_matrix(model.kernel, theta, w.sub.X, w.sub.X);
  w.Ky.diagonal().array() += w.sn2;
  w.llt = cholesky_with_jitter(w.Ky);
  w.resid = w.sub.y - mean_vector(model.layout(), theta, w.sub.X);
  w.alpha = w.llt.solve(w.resid);
  return w;
}

double log_density_from(const Workspace& w) {
  const Eigen::Index n = w.sub.size();
  // The packed LLT storage keeps L's diagonal on its diagonal.
  const double logdet = w.llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * w.resid.dot(w.alpha) - logdet - 0.5 * static_cast<double>(n) * kLogTwoPi;
}

}  // namespace

Eigen::LLT<Eigen::MatrixXd> cholesky_with_jitter(const Eigen::MatrixXd& K,
                                                 double* jitter_used) {
  const double scale = K.diagonal().mean();
  double jitter = 0.0;
  for (;;) {
    Eigen::MatrixXd Kj = K;
    if (jitter > 0.0) Kj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(Kj);
    if (llt.info() == Eigen::Success) {
      if (jitter_used) *jitter_used = jitter;
      return llt;
    }
    if (jitter == 0.0) {
      jitter = 1e-10 * scale;
    } else if (jitter < 1e-4 * scale) {
      jitter *= 10.0;
    } else {
      throw NumericError("Cholesky factorization failed after max jitter " +
                         std::to_string(jitter));
    }
  }
}

double log_marginal_likelihood(const GpModel& model, const Eigen::VectorXd& theta) {
  return log_marginal_likelihood(model, theta, all_rows(model.data));
}

double log_marginal_likelihood(const GpModel& model, const Eigen::VectorXd& theta,
                               const std::vector<int>& rows) {
  model.layout().check_theta(theta);
  if (rows.empty()) throw ConfigError("log_marginal_likelihood requires a non-empty dataset");
  const Workspace w = factorize(model, theta, rows);
  return log_density_from(w);
}

std::pair<double, Eigen::VectorXd> log_marginal_likelihood_grad(const GpModel& model,
                                                                const Eigen::VectorXd& theta) {
  const ModelLayout layout = model.layout();
  layout.check_theta(theta);
  if (model.data.size() == 0) {
    throw ConfigError("log_marginal_likelihood requires a non-empty dataset");
  }

  const Workspace w = factorize(model, theta, all_rows(model.data));
  const Eigen::Index n = w.sub.size();
  const double value = log_density_from(w);

  // 0.5 * tr((alpha alpha^T - Ky^-1) dK/dtheta_j) for covariance coordinates,
  // (dm/dtheta_j)^T alpha for mean coordinates.
  Eigen::MatrixXd M = w.alpha * w.alpha.transpose();
  M -= w.llt.solve(Eigen::MatrixXd::Identity(n, n));

  const int nl = model.kernel.length_scale_count();
  Eigen::VectorXd inv_l2(model.kernel.input_dim);
  for (int k = 0; k < model.kernel.input_dim; ++k) {
    const double l = std::exp(theta[nl == 1 ? 0 : k]);
    inv_l2[k] = 1.0 / (l * l);
  }
  Eigen::MatrixXd Kf = kernel_matrix(model.kernel, theta, w.sub.X, w.sub.X);

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout.dim());

  // d/d(log l_k): Kf_ij * (x_ik - x_jk)^2 / l_k^2, summed over k for iso.
  for (int k = 0; k < model.kernel.input_dim; ++k) {
    const int coord = nl == 1 ? 0 : k;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double d = w.sub.X(i, k) - w.sub.X(j, k);
        acc += M(i, j) * Kf(i, j) * d * d * inv_l2[k];
      }
    }
    grad[coord] += 0.5 * acc;
  }
  // d/d(log sf2): dK = Kf.
  grad[nl] = 0.5 * M.cwiseProduct(Kf).sum();
  // d/d(log sn2): dK = sn2 * I.
  grad[layout.noise_index()] = 0.5 * w.sn2 * M.trace();

  const int moff = layout.kernel_param_count();
  switch (model.mean.family) {
    case MeanFamily::kZero:
      break;
    case MeanFamily::kConstant:
      grad[moff] = w.alpha.sum();
      break;
    case MeanFamily::kLinear: {
      for (int k = 0; k < model.kernel.input_dim; ++k) {
        grad[moff + k] = w.sub.X.col(k).dot(w.alpha);
      }
      grad[moff + model.kernel.input_dim] = w.alpha.sum();
      break;
    }
  }

  return {value, grad};
}

double conditional_log_marginal_likelihood(const GpModel& model, const Eigen::VectorXd& theta,
                                           const std::vector<int>& given_rows,
                                           const std::vector<int>& new_rows) {
  model.layout().check_theta(theta);
  if (new_rows.empty()) return 0.0;

  const PredictiveGaussian pred = predict(model, theta, model.data.rows(new_rows).X,
                                          /*want_cov=*/true, given_rows);
  const Eigen::VectorXd ynew = model.data.rows(new_rows).y;
  const Eigen::VectorXd resid = ynew - pred.mean;
  const Eigen::LLT<Eigen::MatrixXd> llt = cholesky_with_jitter(*pred.cov);
  const double logdet = llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * resid.dot(llt.solve(resid)) - logdet -
         0.5 * static_cast<double>(resid.size()) * kLogTwoPi;
}

PredictiveGaussian predict(const GpModel& model, const Eigen::VectorXd& theta,
                           const Eigen::MatrixXd& Xstar, bool want_cov) {
  return predict(model, theta, Xstar, want_cov, all_rows(model.data));
}

PredictiveGaussian predict(const GpModel& model, const Eigen::VectorXd& theta,
                           const Eigen::MatrixXd& Xstar, bool want_cov,
                           const std::vector<int>& rows) {
  const ModelLayout layout = model.layout();
  layout.check_theta(theta);
  if (Xstar.cols() != model.kernel.input_dim) {
    throw ConfigError("query dimension " + std::to_string(Xstar.cols()) +
                      " does not match kernel input_dim " +
                      std::to_string(model.kernel.input_dim));
  }

  PredictiveGaussian out;
  const double sn2 = noise_variance(layout, theta);

  if (rows.empty()) {
    // Prior predictive.
    out.mean = mean_vector(layout, theta, Xstar);
    Eigen::MatrixXd Kss = kernel_matrix(model.kernel, theta, Xstar, Xstar);
    out.var = (Kss.diagonal().array() + sn2).matrix();
    if (want_cov) {
      Kss.diagonal().array() += sn2;
      out.cov = std::move(Kss);
    }
    return out;
  }

  const Workspace w = factorize(model, theta, rows);
  const Eigen::MatrixXd Kxs = kernel_matrix(model.kernel, theta, w.sub.X, Xstar);

  out.mean = mean_vector(layout, theta, Xstar) + Kxs.transpose() * w.alpha;

  // v = L^-1 Kxs, posterior f-covariance = Kss - v^T v.
  const Eigen::MatrixXd v = w.llt.matrixL().solve(Kxs);
  if (want_cov) {
    Eigen::MatrixXd cov = kernel_matrix(model.kernel, theta, Xstar, Xstar);
    cov -= v.transpose() * v;
    cov = 0.5 * (cov + cov.transpose()).eval();
    cov.diagonal().array() = cov.diagonal().array().max(0.0) + sn2;
    out.var = cov.diagonal();
    out.cov = std::move(cov);
  } else {
    Eigen::VectorXd kss(Xstar.rows());
    const double sf2 = std::exp(theta[model.kernel.length_scale_count()]);
    kss.setConstant(sf2);
    out.var =
        ((kss - v.colwise().squaredNorm().transpose()).array().max(0.0) + sn2).matrix();
  }
  return out;
}

PredictiveGaussian predict_sor(const GpModel& model, const Eigen::VectorXd& theta,
                               const std::vector<int>& inducing, const Eigen::MatrixXd& Xstar) {
  const ModelLayout layout = model.layout();
  layout.check_theta(theta);
  const Eigen::Index n = model.data.size();
  if (inducing.empty()) throw ConfigError("predict_sor needs at least one inducing point");
  if (static_cast<Eigen::Index>(inducing.size()) > n) {
    throw ConfigError("predict_sor: more inducing points than training rows");
  }
  const std::set<int> uniq(inducing.begin(), inducing.end());
  if (uniq.size() != inducing.size()) {
    throw ConfigError("predict_sor: inducing indices must be distinct");
  }

  const Dataset U = model.data.rows(inducing);
  const double sn2 = noise_variance(layout, theta);

  const Eigen::MatrixXd Kuu = kernel_matrix(model.kernel, theta, U.X, U.X);
  const Eigen::MatrixXd Kuf = kernel_matrix(model.kernel, theta, U.X, model.data.X);
  const Eigen::MatrixXd Kus = kernel_matrix(model.kernel, theta, U.X, Xstar);
  const Eigen::VectorXd resid = model.data.y - mean_vector(layout, theta, model.data.X);

  const Eigen::MatrixXd A = sn2 * Kuu + Kuf * Kuf.transpose();
  const Eigen::LLT<Eigen::MatrixXd> llt = cholesky_with_jitter(A);

  PredictiveGaussian out;
  out.mean = mean_vector(layout, theta, Xstar) +
             Kus.transpose() * llt.solve(Kuf * resid);
  const Eigen::MatrixXd Ainv_Kus = llt.solve(Kus);
  out.var = ((sn2 * (Kus.array() * Ainv_Kus.array()).colwise().sum().transpose()).max(0.0) + sn2)
                .matrix();
  return out;
}

}  // namespace gpsmc
