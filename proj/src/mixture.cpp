#include "mixture.hpp"

#include <cmath>
#include <sstream>

#include "common.hpp"

namespace gpsmc {

void PredictiveMixture::validate() const {
  if (components.empty()) throw ConfigError("mixture: no components");
  if (weights.size() != num_components())
    throw ConfigError("mixture: weight count does not match component count");
  const auto n = components.front().mean.size();
  for (const auto& c : components) {
    if (c.mean.size() != n || c.var.size() != n)
      throw ConfigError("mixture: components disagree on query count");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-12)
    throw ConfigError("mixture: weights must sum to one");
}

PredictiveMixture mixture_predict(const WeightedSamples& samples, const GpModel& model,
                                  const Eigen::MatrixXd& Xstar, bool want_cov) {
  samples.validate();
  PredictiveMixture mix;
  mix.weights = samples.weights;
  mix.components.reserve(samples.size());
  for (const auto& theta : samples.thetas)
    mix.components.push_back(predict(model, theta, Xstar, want_cov));
  return mix;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> mixture_moments(const PredictiveMixture& mix) {
  const int n = mix.num_points();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd second = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < mix.num_components(); ++i) {
    const auto& c = mix.components[i];
    mean += mix.weights[i] * c.mean;
    second += mix.weights[i] * (c.var + c.mean.cwiseProduct(c.mean));
  }
  return {mean, second - mean.cwiseProduct(mean)};
}

Eigen::VectorXd mixture_logpdf_per_point(const PredictiveMixture& mix,
                                         const Eigen::VectorXd& ystar) {
  const int n = mix.num_points();
  if (ystar.size() != n) throw ConfigError("mixture logpdf: target length mismatch");
  const int m = mix.num_components();
  Eigen::VectorXd out(n);
  Eigen::VectorXd terms(m);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      const auto& c = mix.components[i];
      terms[i] = std::log(mix.weights[i]) + log_normal_pdf(ystar[j], c.mean[j], c.var[j]);
    }
    out[j] = log_sum_exp(terms);
  }
  return out;
}

double mixture_logpdf(const PredictiveMixture& mix, const Eigen::VectorXd& ystar) {
  return mixture_logpdf_per_point(mix, ystar).sum();
}

std::string mixture_to_csv(const PredictiveMixture& mix, const Eigen::MatrixXd& Xstar,
                           bool with_components) {
  const int n = mix.num_points();
  if (Xstar.rows() != n) throw ConfigError("mixture csv: query row count mismatch");
  auto [mean, var] = mixture_moments(mix);
  std::ostringstream out;
  for (int d = 0; d < Xstar.cols(); ++d) out << "x" << d << ",";
  out << "mean,std";
  if (with_components)
    for (int i = 0; i < mix.num_components(); ++i) out << ",mean" << i << ",std" << i;
  out << "\n";
  for (int j = 0; j < n; ++j) {
    for (int d = 0; d < Xstar.cols(); ++d) out << format_double(Xstar(j, d)) << ",";
    out << format_double(mean[j]) << "," << format_double(std::sqrt(var[j]));
    if (with_components)
      for (const auto& c : mix.components)
        out << "," << format_double(c.mean[j]) << "," << format_double(std::sqrt(c.var[j]));
    out << "\n";
  }
  return out.str();
}

}  // namespace gpsmc
