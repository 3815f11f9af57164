#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "common.hpp"
#include "gp.hpp"
#include "mixture.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "samples.hpp"

using namespace gpsmc;

namespace {

GpModel sine_toy() {
  GpModel m;
  m.kernel = {KernelFamily::kSquaredExponentialIso, 1};
  m.mean = {MeanFamily::kZero};
  m.data.X.resize(5, 1);
  m.data.y.resize(5);
  for (int i = 0; i < 5; ++i) {
    m.data.X(i, 0) = static_cast<double>(i);
    m.data.y[i] = std::sin(0.8 * i);
  }
  return m;
}

Eigen::VectorXd theta3(double log_ell, double log_sf2, double log_sn2) {
  Eigen::VectorXd th(3);
  th << log_ell, log_sf2, log_sn2;
  return th;
}

double normal_pdf(double y, double mu, double var) {
  return std::exp(-0.5 * (y - mu) * (y - mu) / var) / std::sqrt(2.0 * M_PI * var);
}

// A hand-buildable component: one query point with the given moments.
PredictiveGaussian component1(double mean, double var) {
  PredictiveGaussian c;
  c.mean = Eigen::VectorXd::Constant(1, mean);
  c.var = Eigen::VectorXd::Constant(1, var);
  return c;
}

}  // namespace

TEST_CASE("single-sample mixture equals the bare GP predictive") {
  const GpModel m = sine_toy();
  const Eigen::VectorXd th = theta3(0.0, 0.0, std::log(0.3));

  WeightedSamples ws;
  ws.thetas = {th};
  ws.weights = Eigen::VectorXd::Constant(1, 1.0);

  Eigen::MatrixXd Xs(3, 1);
  Xs << 0.5, 2.0, 3.7;
  const PredictiveMixture mix = mixture_predict(ws, m, Xs);
  mix.validate();
  REQUIRE(mix.num_components() == 1);
  REQUIRE(mix.num_points() == 3);

  const PredictiveGaussian direct = predict(m, th, Xs);
  CHECK((mix.components[0].mean.array() == direct.mean.array()).all());
  CHECK((mix.components[0].var.array() == direct.var.array()).all());

  const auto [mean, var] = mixture_moments(mix);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(mean[j] - direct.mean[j]) <= 1e-15);
    CHECK(std::abs(var[j] - direct.var[j]) <= 1e-15);
  }

  // Scalar Gaussian log density, point by point.
  Eigen::VectorXd ystar(3);
  ystar << 0.1, -0.4, 1.2;
  const Eigen::VectorXd lp = mixture_logpdf_per_point(mix, ystar);
  for (int j = 0; j < 3; ++j) {
    const double want = -0.5 * std::log(2.0 * M_PI * direct.var[j]) -
                        0.5 * (ystar[j] - direct.mean[j]) * (ystar[j] - direct.mean[j]) /
                            direct.var[j];
    CHECK(std::abs(lp[j] - want) <= 1e-12);
  }
  CHECK(std::abs(mixture_logpdf(mix, ystar) - lp.sum()) <= 1e-12);
}

TEST_CASE("identical particles collapse to the single-component density") {
  const GpModel m = sine_toy();
  const Eigen::VectorXd th = theta3(0.2, -0.1, std::log(0.2));

  WeightedSamples one;
  one.thetas = {th};
  one.weights = Eigen::VectorXd::Constant(1, 1.0);

  WeightedSamples four;
  four.thetas = {th, th, th, th};
  four.weights = Eigen::VectorXd::Constant(4, 0.25);

  Eigen::MatrixXd Xs(2, 1);
  Xs << 1.3, 4.1;
  const PredictiveMixture ma = mixture_predict(one, m, Xs);
  const PredictiveMixture mb = mixture_predict(four, m, Xs);

  Eigen::VectorXd ystar(2);
  for (double y0 : {-1.0, 0.0, 0.8}) {
    ystar << y0, y0 + 0.3;
    const Eigen::VectorXd la = mixture_logpdf_per_point(ma, ystar);
    const Eigen::VectorXd lb = mixture_logpdf_per_point(mb, ystar);
    for (int j = 0; j < 2; ++j) CHECK(std::abs(la[j] - lb[j]) <= 1e-12);
  }

  const auto [mean_a, var_a] = mixture_moments(ma);
  const auto [mean_b, var_b] = mixture_moments(mb);
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(mean_a[j] - mean_b[j]) <= 1e-12);
    CHECK(std::abs(var_a[j] - var_b[j]) <= 1e-12);
  }
}

TEST_CASE("two-component hand mixture") {
  PredictiveMixture mix;
  mix.components = {component1(1.0, 0.5), component1(-0.5, 2.0)};
  mix.weights = Eigen::VectorXd(2);
  mix.weights << 0.3, 0.7;
  mix.validate();

  SUBCASE("density matches scalar arithmetic") {
    for (double y : {0.2, -1.0, 1.5}) {
      const double want = 0.3 * normal_pdf(y, 1.0, 0.5) + 0.7 * normal_pdf(y, -0.5, 2.0);
      const double got = std::exp(mixture_logpdf(mix, Eigen::VectorXd::Constant(1, y)));
      CHECK(std::abs(got - want) <= 1e-12);
    }
  }

  SUBCASE("moments match the law of total variance") {
    const auto [mean, var] = mixture_moments(mix);
    const double want_mean = 0.3 * 1.0 + 0.7 * (-0.5);
    const double want_var =
        0.3 * (0.5 + 1.0) + 0.7 * (2.0 + 0.25) - want_mean * want_mean;
    CHECK(std::abs(mean[0] - want_mean) <= 1e-12);
    CHECK(std::abs(var[0] - want_var) <= 1e-12);
  }

  SUBCASE("two point masses at plus and minus one") {
    PredictiveMixture pm;
    pm.components = {component1(1.0, 0.0), component1(-1.0, 0.0)};
    pm.weights = Eigen::VectorXd::Constant(2, 0.5);
    const auto [mean, var] = mixture_moments(pm);
    CHECK(std::abs(mean[0]) <= 1e-15);
    CHECK(std::abs(var[0] - 1.0) <= 1e-15);
  }
}

TEST_CASE("log-space evaluation stays finite deep in the tails") {
  PredictiveMixture mix;
  mix.components = {component1(0.0, 1.0), component1(0.5, 0.04)};
  mix.weights = Eigen::VectorXd::Constant(2, 0.5);

  for (double y : {30.0, -30.0, 25.0}) {
    const double lp = mixture_logpdf(mix, Eigen::VectorXd::Constant(1, y));
    CHECK(std::isfinite(lp));
    CHECK(lp < -100.0);
  }

  // Single standard normal component evaluated 30 sigma out.
  PredictiveMixture single;
  single.components = {component1(0.0, 1.0)};
  single.weights = Eigen::VectorXd::Constant(1, 1.0);
  const double lp = mixture_logpdf(single, Eigen::VectorXd::Constant(1, 30.0));
  CHECK(std::abs(lp - (-0.5 * 900.0 - 0.5 * std::log(2.0 * M_PI))) <= 1e-9);
}

TEST_CASE("mixture density integrates to one") {
  const GpModel m = sine_toy();
  WeightedSamples ws;
  ws.thetas = {theta3(0.0, 0.0, std::log(0.3)), theta3(0.7, -0.5, std::log(0.1)),
               theta3(-0.4, 0.3, std::log(0.5))};
  ws.weights = Eigen::VectorXd(3);
  ws.weights << 0.5, 0.3, 0.2;

  Eigen::MatrixXd Xs(1, 1);
  Xs << 2.5;
  const PredictiveMixture mix = mixture_predict(ws, m, Xs);

  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < mix.num_components(); ++i) {
    const double sd = std::sqrt(mix.components[i].var[0]);
    lo = std::min(lo, mix.components[i].mean[0] - 12.0 * sd);
    hi = std::max(hi, mix.components[i].mean[0] + 12.0 * sd);
  }

  const int kNodes = 20001;
  const double h = (hi - lo) / (kNodes - 1);
  double integral = 0.0;
  Eigen::VectorXd y(1);
  for (int j = 0; j < kNodes; ++j) {
    y[0] = lo + h * j;
    const double f = std::exp(mixture_logpdf(mix, y));
    integral += (j == 0 || j == kNodes - 1) ? 0.5 * f : f;
  }
  integral *= h;
  CHECK(std::abs(integral - 1.0) <= 1e-4);
}

TEST_CASE("moment matching agrees with Monte Carlo sampling") {
  const GpModel m = sine_toy();
  WeightedSamples ws;
  ws.thetas = {theta3(0.0, 0.0, std::log(0.3)), theta3(0.9, -0.8, std::log(0.05)),
               theta3(-0.3, 0.4, std::log(0.6))};
  ws.weights = Eigen::VectorXd(3);
  ws.weights << 0.5, 0.3, 0.2;

  Eigen::MatrixXd Xs(2, 1);
  Xs << 1.0, 3.2;
  const PredictiveMixture mix = mixture_predict(ws, m, Xs);
  const auto [mean, var] = mixture_moments(mix);

  const int n = 2'000'000;
  Rng rng(777);
  for (int j = 0; j < 2; ++j) {
    double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
    std::vector<double> draws(n);
    for (int s = 0; s < n; ++s) {
      const double u = rng.uniform01();
      int comp = 0;
      double acc = mix.weights[0];
      while (comp + 1 < mix.num_components() && u > acc) acc += mix.weights[++comp];
      const double draw =
          mix.components[comp].mean[j] + std::sqrt(mix.components[comp].var[j]) * rng.normal();
      draws[s] = draw;
      sum += draw;
    }
    const double mc_mean = sum / n;
    for (double d : draws) {
      const double c = d - mc_mean;
      sum2 += c * c;
      sum4 += c * c * c * c;
    }
    const double mc_var = sum2 / n;
    const double m4 = sum4 / n;

    const double se_mean = std::sqrt(mc_var / n);
    const double se_var = std::sqrt((m4 - mc_var * mc_var) / n);
    CHECK(std::abs(mc_mean - mean[j]) <= 3.0 * se_mean);
    CHECK(std::abs(mc_var - var[j]) <= 3.0 * se_var);
  }
}

TEST_CASE("merging particle sets blends the densities linearly") {
  const GpModel m = sine_toy();

  WeightedSamples a;
  a.thetas = {theta3(0.0, 0.0, std::log(0.3)), theta3(0.5, -0.2, std::log(0.2))};
  a.weights = Eigen::VectorXd(2);
  a.weights << 0.6, 0.4;

  WeightedSamples b;
  b.thetas = {theta3(-0.5, 0.3, std::log(0.4)), theta3(0.2, 0.1, std::log(0.15)),
              theta3(0.8, -0.6, std::log(0.25))};
  b.weights = Eigen::VectorXd(3);
  b.weights << 0.2, 0.5, 0.3;

  const double lambda = 0.35;
  WeightedSamples merged;
  merged.thetas = a.thetas;
  merged.thetas.insert(merged.thetas.end(), b.thetas.begin(), b.thetas.end());
  merged.weights = Eigen::VectorXd(5);
  merged.weights << lambda * a.weights, (1.0 - lambda) * b.weights;

  Eigen::MatrixXd Xs(2, 1);
  Xs << 0.7, 3.5;
  const PredictiveMixture ma = mixture_predict(a, m, Xs);
  const PredictiveMixture mb = mixture_predict(b, m, Xs);
  const PredictiveMixture mm = mixture_predict(merged, m, Xs);

  Eigen::VectorXd ystar(2);
  for (double shift : {-0.8, 0.0, 0.6, 1.4}) {
    ystar << shift, shift - 0.2;
    const Eigen::VectorXd la = mixture_logpdf_per_point(ma, ystar);
    const Eigen::VectorXd lb = mixture_logpdf_per_point(mb, ystar);
    const Eigen::VectorXd lm = mixture_logpdf_per_point(mm, ystar);
    for (int j = 0; j < 2; ++j) {
      const double blend = lambda * std::exp(la[j]) + (1.0 - lambda) * std::exp(lb[j]);
      CHECK(std::abs(std::exp(lm[j]) - blend) <= 1e-12);
    }
  }
}

TEST_CASE("csv rendering round-trips the mixture summary") {
  const GpModel m = sine_toy();
  WeightedSamples ws;
  ws.thetas = {theta3(0.0, 0.0, std::log(0.3)), theta3(0.4, -0.3, std::log(0.2))};
  ws.weights = Eigen::VectorXd::Constant(2, 0.5);

  Eigen::MatrixXd Xs(3, 1);
  Xs << 0.25, 1.75, 3.5;
  const PredictiveMixture mix = mixture_predict(ws, m, Xs);
  const auto [mean, var] = mixture_moments(mix);

  SUBCASE("summary columns") {
    std::istringstream in(mixture_to_csv(mix, Xs));
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "x0,mean,std");
    for (int j = 0; j < 3; ++j) {
      REQUIRE(std::getline(in, line));
      std::istringstream row(line);
      std::string cell;
      std::getline(row, cell, ',');
      CHECK(std::strtod(cell.c_str(), nullptr) == Xs(j, 0));
      std::getline(row, cell, ',');
      CHECK(std::strtod(cell.c_str(), nullptr) == mean[j]);
      std::getline(row, cell, ',');
      CHECK(std::strtod(cell.c_str(), nullptr) == std::sqrt(var[j]));
    }
    CHECK(!std::getline(in, line));
  }

  SUBCASE("per-component columns") {
    std::istringstream in(mixture_to_csv(mix, Xs, true));
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "x0,mean,std,mean0,std0,mean1,std1");
    REQUIRE(std::getline(in, line));
    std::istringstream row(line);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(row, cell, ',')) cells.push_back(std::strtod(cell.c_str(), nullptr));
    REQUIRE(cells.size() == 7);
    CHECK(cells[3] == mix.components[0].mean[0]);
    CHECK(cells[4] == std::sqrt(mix.components[0].var[0]));
    CHECK(cells[5] == mix.components[1].mean[0]);
    CHECK(cells[6] == std::sqrt(mix.components[1].var[0]));
  }

  SUBCASE("query row count must match") {
    Eigen::MatrixXd wrong(2, 1);
    wrong << 0.0, 1.0;
    CHECK_THROWS_AS(mixture_to_csv(mix, wrong), ConfigError);
  }
}

TEST_CASE("mixture validation") {
  PredictiveMixture empty;
  CHECK_THROWS_AS(empty.validate(), ConfigError);

  PredictiveMixture bad_weights;
  bad_weights.components = {component1(0.0, 1.0), component1(1.0, 1.0)};
  bad_weights.weights = Eigen::VectorXd::Constant(1, 1.0);
  CHECK_THROWS_AS(bad_weights.validate(), ConfigError);

  PredictiveMixture bad_sum;
  bad_sum.components = {component1(0.0, 1.0), component1(1.0, 1.0)};
  bad_sum.weights = Eigen::VectorXd::Constant(2, 0.4);
  CHECK_THROWS_AS(bad_sum.validate(), ConfigError);

  PredictiveMixture ragged;
  ragged.components = {component1(0.0, 1.0)};
  PredictiveGaussian two;
  two.mean = Eigen::VectorXd::Zero(2);
  two.var = Eigen::VectorXd::Constant(2, 1.0);
  ragged.components.push_back(two);
  ragged.weights = Eigen::VectorXd::Constant(2, 0.5);
  CHECK_THROWS_AS(ragged.validate(), ConfigError);

  PredictiveMixture mix;
  mix.components = {component1(0.0, 1.0)};
  mix.weights = Eigen::VectorXd::Constant(1, 1.0);
  Eigen::VectorXd wrong_len(2);
  wrong_len << 0.0, 1.0;
  CHECK_THROWS_AS(mixture_logpdf(mix, wrong_len), ConfigError);
}
