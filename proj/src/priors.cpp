#include "priors.hpp"

#include <cmath>
#include <string>

namespace gpsmc {

CoordinatePrior CoordinatePrior::gaussian_on_log(double mean, double std) {
  if (!(std > 0.0)) throw ConfigError("gaussian prior std must be positive");
  return {PriorKind::kGaussianOnLog, mean, std};
}

CoordinatePrior CoordinatePrior::gaussian_on_natural(double mean, double std) {
  if (!(std > 0.0)) throw ConfigError("gaussian prior std must be positive");
  return {PriorKind::kGaussianOnNatural, mean, std};
}

CoordinatePrior CoordinatePrior::uniform_on_log(double lo, double hi) {
  if (!(lo < hi)) throw ConfigError("uniform prior needs lo < hi");
  return {PriorKind::kUniformOnLog, lo, hi};
}

CoordinatePrior CoordinatePrior::fixed(double value) {
  return {PriorKind::kFixed, value, 0.0};
}

double CoordinatePrior::log_density(double x) const {
  switch (kind) {
    case PriorKind::kGaussianOnLog:
    case PriorKind::kGaussianOnNatural:
      return log_normal_pdf(x, a, b * b);
    case PriorKind::kUniformOnLog:
      return (x >= a && x <= b) ? -std::log(b - a) : kNegInf;
    case PriorKind::kFixed:
      // Point mass carried by every particle; the constant cancels in all
      // density ratios, so contribute 0.
      return 0.0;
  }
  return kNegInf;
}

double CoordinatePrior::sample(Rng& rng) const {
  switch (kind) {
    case PriorKind::kGaussianOnLog:
    case PriorKind::kGaussianOnNatural:
      return a + b * rng.normal();
    case PriorKind::kUniformOnLog:
      return a + (b - a) * rng.uniform01();
    case PriorKind::kFixed:
      return a;
  }
  return a;
}

double CoordinatePrior::stddev() const {
  switch (kind) {
    case PriorKind::kGaussianOnLog:
    case PriorKind::kGaussianOnNatural:
      return b;
    case PriorKind::kUniformOnLog:
      return (b - a) / std::sqrt(12.0);
    case PriorKind::kFixed:
      return 0.0;
  }
  return 0.0;
}

void PriorSpec::validate_against(const ModelLayout& layout) const {
  if (dim() != layout.dim()) {
    throw ConfigError("prior declares " + std::to_string(dim()) +
                      " coordinates, model has " + std::to_string(layout.dim()));
  }
  for (int i = 0; i < dim(); ++i) {
    const bool log_coord = layout.is_log_coordinate(i);
    const PriorKind k = coords[static_cast<std::size_t>(i)].kind;
    if ((k == PriorKind::kGaussianOnLog || k == PriorKind::kUniformOnLog) && !log_coord) {
      throw ConfigError("coordinate " + layout.coordinate_name(i) +
                        " lives in natural space but its prior is declared on logs");
    }
    if (k == PriorKind::kGaussianOnNatural && log_coord) {
      throw ConfigError("coordinate " + layout.coordinate_name(i) +
                        " lives in log space but its prior is declared on naturals");
    }
  }
}

std::vector<bool> PriorSpec::free_mask() const {
  std::vector<bool> mask(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) mask[i] = !coords[i].is_fixed();
  return mask;
}

int PriorSpec::free_count() const {
  int n = 0;
  for (const auto& c : coords) n += c.is_fixed() ? 0 : 1;
  return n;
}

double log_prior(const PriorSpec& spec, const Eigen::VectorXd& theta) {
  if (theta.size() != spec.dim()) {
    throw ConfigError("log_prior: theta has " + std::to_string(theta.size()) +
                      " entries, prior declares " + std::to_string(spec.dim()));
  }
  double acc = 0.0;
  for (int i = 0; i < spec.dim(); ++i) {
    const double d = spec.coords[static_cast<std::size_t>(i)].log_density(theta[i]);
    if (d == kNegInf) return kNegInf;
    acc += d;
  }
  return acc;
}

Eigen::VectorXd sample_prior_one(const PriorSpec& spec, Rng& rng) {
  Eigen::VectorXd theta(spec.dim());
  for (int i = 0; i < spec.dim(); ++i) {
    theta[i] = spec.coords[static_cast<std::size_t>(i)].sample(rng);
  }
  return theta;
}

std::vector<Eigen::VectorXd> sample_prior(const PriorSpec& spec, int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample_prior: n must be >= 1");
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, stream::kInit, 0, static_cast<std::uint64_t>(i)));
    out.push_back(sample_prior_one(spec, rng));
  }
  return out;
}

}  // namespace gpsmc
