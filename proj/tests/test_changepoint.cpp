#include <doctest.h>

#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "changepoint.hpp"
#include "common.hpp"
#include "mixture.hpp"
#include "model.hpp"
#include "priors.hpp"
#include "rng.hpp"
#include "samples.hpp"
#include "smc.hpp"

using namespace gpsmc;

namespace {

// Conjugate scalar test double: y ~ N(mu, obs_var) with mu ~ N(mu0, tau0_sq).
// The predictive is available in closed form, which makes exhaustive
// enumeration over segmentations affordable.
class ConjugateNormalSegment final : public SegmentModel {
 public:
  ConjugateNormalSegment(double mu0, double tau0_sq, double obs_var)
      : mu_(mu0), tau_sq_(tau0_sq), obs_var_(obs_var) {}

  double predictive_logpdf(const Eigen::VectorXd&, double y) override {
    return log_normal_pdf(y, mu_, tau_sq_ + obs_var_);
  }

  void absorb(const Eigen::VectorXd&, double y) override {
    const double prec = 1.0 / tau_sq_ + 1.0 / obs_var_;
    mu_ = (mu_ / tau_sq_ + y / obs_var_) / prec;
    tau_sq_ = 1.0 / prec;
    ++n_;
  }

  int length() const override { return n_; }

 private:
  double mu_, tau_sq_, obs_var_;
  int n_ = 0;
};

class ConjugateFactory final : public SegmentModelFactory {
 public:
  ConjugateFactory(double mu0, double tau0_sq, double obs_var)
      : mu0_(mu0), tau0_sq_(tau0_sq), obs_var_(obs_var) {}
  std::unique_ptr<SegmentModel> make_segment(int) override {
    return std::make_unique<ConjugateNormalSegment>(mu0_, tau0_sq_, obs_var_);
  }

 private:
  double mu0_, tau0_sq_, obs_var_;
};

class NegInfSegment final : public SegmentModel {
 public:
  double predictive_logpdf(const Eigen::VectorXd&, double) override { return kNegInf; }
  void absorb(const Eigen::VectorXd&, double) override {}
  int length() const override { return 0; }
};

class NegInfFactory final : public SegmentModelFactory {
 public:
  std::unique_ptr<SegmentModel> make_segment(int) override {
    return std::make_unique<NegInfSegment>();
  }
};

// log marginal of y[lo..hi] under one fresh conjugate segment.
double segment_lml(const Eigen::VectorXd& y, int lo, int hi, double mu0, double tau0_sq,
                   double obs_var) {
  ConjugateNormalSegment seg(mu0, tau0_sq, obs_var);
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  double acc = 0.0;
  for (int i = lo; i <= hi; ++i) {
    acc += seg.predictive_logpdf(x, y[i]);
    seg.absorb(x, y[i]);
  }
  return acc;
}

// Brute-force filtering posterior p(r_t | y_{1:t}): every break pattern of the
// prefix is enumerated, so the recursion is checked against the generative
// model itself rather than against another recursion.
std::map<int, double> oracle_run_length_posterior(const Eigen::VectorXd& y, int t,
                                                  double hazard, double mu0, double tau0_sq,
                                                  double obs_var) {
  std::map<int, std::vector<double>> log_joint_by_run;
  const int breaks = t - 1;
  for (long mask = 0; mask < (1L << breaks); ++mask) {
    double lp = 0.0;
    int seg_start = 0;
    for (int k = 0; k < breaks; ++k) {
      if ((mask >> k) & 1) {
        lp += std::log(hazard) + segment_lml(y, seg_start, k, mu0, tau0_sq, obs_var);
        seg_start = k + 1;
      } else {
        lp += std::log1p(-hazard);
      }
    }
    lp += segment_lml(y, seg_start, t - 1, mu0, tau0_sq, obs_var);
    log_joint_by_run[t - seg_start].push_back(lp);
  }

  Eigen::VectorXd all(static_cast<int>(1L << breaks));
  int idx = 0;
  std::map<int, double> posterior;
  for (const auto& [run, terms] : log_joint_by_run) {
    Eigen::VectorXd v(static_cast<int>(terms.size()));
    for (std::size_t i = 0; i < terms.size(); ++i) v[static_cast<int>(i)] = terms[i];
    posterior[run] = log_sum_exp(v);
    for (double term : terms) all[idx++] = term;
  }
  const double norm = log_sum_exp(all);
  for (auto& [run, lp] : posterior) lp = std::exp(lp - norm);
  return posterior;
}

GpSegmentConfig step_gp_config(std::uint64_t seed) {
  GpSegmentConfig cfg;
  cfg.kernel = {KernelFamily::kSquaredExponentialIso, 1};
  cfg.mean = {MeanFamily::kConstant};
  cfg.prior.coords.push_back(CoordinatePrior::gaussian_on_log(1.0, 1.0));
  cfg.prior.coords.push_back(CoordinatePrior::gaussian_on_log(-2.0, 1.0));
  cfg.prior.coords.push_back(CoordinatePrior::gaussian_on_natural(0.0, 5.0));
  cfg.prior.coords.push_back(CoordinatePrior::gaussian_on_log(0.0, 1.0));
  cfg.num_particles = 25;
  cfg.mh_moves = 2;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("two-step recursion matches hand arithmetic") {
  const double mu0 = 0.5, tau0_sq = 2.0, obs_var = 0.8, lambda = 0.1;
  ConjugateFactory factory(mu0, tau0_sq, obs_var);
  BocpdOptions opts;
  opts.hazard.rate = lambda;
  opts.prune_threshold = 0.0;

  Eigen::MatrixXd X(2, 1);
  X << 0.0, 0.0;
  Eigen::VectorXd y(2);
  y << 1.2, -0.3;

  BocpdState state;
  bocpd_step(state, factory, X.row(0).transpose(), y[0], opts);

  const double lp1 = log_normal_pdf(1.2, mu0, tau0_sq + obs_var);
  REQUIRE(state.run_lengths == std::vector<int>{1});
  CHECK(std::abs(state.log_joint[0] - lp1) <= 1e-12);
  CHECK(state.cp_probability[0] == 1.0);
  REQUIRE(state.history.size() == 1);
  CHECK(state.history[0][0].first == 1);
  CHECK(std::abs(state.history[0][0].second - 1.0) <= 1e-15);

  bocpd_step(state, factory, X.row(1).transpose(), y[1], opts);

  // Posterior over mu after absorbing y1.
  const double prec = 1.0 / tau0_sq + 1.0 / obs_var;
  const double mu1 = (mu0 / tau0_sq + y[0] / obs_var) / prec;
  const double tau1_sq = 1.0 / prec;

  const double m_change = std::log(lambda) + lp1 + log_normal_pdf(-0.3, mu0, tau0_sq + obs_var);
  const double m_grow = lp1 + std::log1p(-lambda) + log_normal_pdf(-0.3, mu1, tau1_sq + obs_var);

  REQUIRE((state.run_lengths == std::vector<int>{1, 2}));
  CHECK(std::abs(state.log_joint[0] - m_change) <= 1e-12);
  CHECK(std::abs(state.log_joint[1] - m_grow) <= 1e-12);

  Eigen::VectorXd both(2);
  both << m_change, m_grow;
  const double norm = log_sum_exp(both);
  CHECK(std::abs(state.cp_probability[1] - std::exp(m_change - norm)) <= 1e-12);
  CHECK(std::abs(state.history[1][0].second - std::exp(m_change - norm)) <= 1e-12);
  CHECK(std::abs(state.history[1][1].second - std::exp(m_grow - norm)) <= 1e-12);
}

TEST_CASE("filter matches the exhaustive segmentation oracle") {
  const double mu0 = 0.0, tau0_sq = 4.0, obs_var = 0.25, lambda = 0.15;
  const int T = 10;

  Rng rng(4242);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(T, 1);
  Eigen::VectorXd y(T);
  for (int t = 0; t < T; ++t) y[t] = (t < 5 ? 0.0 : 2.0) + 0.4 * rng.normal();

  ConjugateFactory factory(mu0, tau0_sq, obs_var);
  BocpdOptions opts;
  opts.hazard.rate = lambda;
  opts.prune_threshold = 0.0;
  const BocpdState state = bocpd_run(factory, X, y, opts);

  REQUIRE(state.t == T);
  REQUIRE(static_cast<int>(state.cp_probability.size()) == T);
  REQUIRE(static_cast<int>(state.history.size()) == T);

  for (int t = 1; t <= T; ++t) {
    const auto oracle = oracle_run_length_posterior(y, t, lambda, mu0, tau0_sq, obs_var);

    const double oracle_cp = oracle.count(1) ? oracle.at(1) : 0.0;
    CHECK(std::abs(state.cp_probability[t - 1] - oracle_cp) <= 1e-8);

    // With pruning off, the whole run-length support must be retained and
    // match the enumeration.
    const auto& row = state.history[t - 1];
    REQUIRE(static_cast<int>(row.size()) == t);
    for (const auto& [r, p] : row) {
      REQUIRE(oracle.count(r) == 1);
      CHECK(std::abs(p - oracle.at(r)) <= 1e-8);
    }
  }
}

TEST_CASE("hazard limits pin the run length") {
  Rng rng(99);
  const int T = 20;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(T, 1);
  Eigen::VectorXd y(T);
  for (int t = 0; t < T; ++t) y[t] = 0.1 * t + 0.05 * rng.normal();

  ConjugateFactory factory(0.0, 4.0, 0.25);

  SUBCASE("vanishing hazard grows one segment forever") {
    BocpdOptions opts;
    opts.hazard.rate = 1e-12;
    const BocpdState state = bocpd_run(factory, X, y, opts);
    for (int t = 1; t <= T; ++t) {
      const auto& row = state.history[t - 1];
      int argmax_r = 0;
      double best = -1.0;
      for (const auto& [r, p] : row)
        if (p > best) {
          best = p;
          argmax_r = r;
        }
      CHECK(argmax_r == t);
      if (t >= 2) CHECK(state.cp_probability[t - 1] < 1e-9);
    }
  }

  SUBCASE("hazard near one restarts at every step") {
    BocpdOptions opts;
    opts.hazard.rate = 1.0 - 1e-12;
    const BocpdState state = bocpd_run(factory, X, y, opts);
    for (int t = 1; t <= T; ++t) {
      const auto& row = state.history[t - 1];
      int argmax_r = 0;
      double best = -1.0;
      for (const auto& [r, p] : row)
        if (p > best) {
          best = p;
          argmax_r = r;
        }
      CHECK(argmax_r == 1);
      if (t >= 2) CHECK(state.cp_probability[t - 1] > 1.0 - 1e-9);
    }
  }
}

TEST_CASE("step change collapses the run-length mass") {
  Rng rng(7);
  const int T = 30;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(T, 1);
  Eigen::VectorXd y(T);
  for (int t = 0; t < T; ++t) y[t] = (t < 15 ? 0.0 : 5.0) + 0.2 * rng.normal();

  ConjugateFactory factory(0.0, 4.0, 0.25);
  BocpdOptions opts;
  opts.hazard.rate = 0.05;
  const BocpdState state = bocpd_run(factory, X, y, opts);

  // Diagonal growth before the change, collapse to r = 1 at t = 16.
  const Eigen::MatrixXd map = run_length_map(state);
  REQUIRE(map.rows() == T);
  int argmax_before = 0;
  map.row(14).maxCoeff(&argmax_before);
  CHECK(argmax_before + 1 == 15);
  int argmax_at = 0;
  map.row(15).maxCoeff(&argmax_at);
  CHECK(argmax_at + 1 == 1);
  CHECK(state.cp_probability[15] > 0.9);

  const auto flags = threshold_segments(state, 0.5);
  REQUIRE(flags.size() == 1);
  CHECK(flags[0] == 16);
}

TEST_CASE("run-length map rows are normalized with pruned entries zero") {
  Rng rng(31);
  const int T = 25;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(T, 1);
  Eigen::VectorXd y(T);
  for (int t = 0; t < T; ++t) y[t] = (t < 12 ? -1.0 : 1.5) + 0.3 * rng.normal();

  ConjugateFactory factory(0.0, 4.0, 0.25);
  BocpdOptions opts;
  opts.hazard.rate = 0.05;
  opts.prune_threshold = 0.05;  // aggressive, to exercise dropped hypotheses
  const BocpdState state = bocpd_run(factory, X, y, opts);

  const Eigen::MatrixXd map = run_length_map(state);
  REQUIRE(map.rows() == T);
  for (int t = 0; t < T; ++t) {
    CHECK(std::abs(map.row(t).sum() - 1.0) <= 1e-10);
    // Column r-1 carries run length r; anything not retained is exactly zero.
    int retained = 0;
    for (const auto& [r, p] : state.history[t]) {
      CHECK(map(t, r - 1) == p);
      ++retained;
    }
    int nonzero = 0;
    for (int c = 0; c < map.cols(); ++c) nonzero += map(t, c) != 0.0;
    CHECK(nonzero == retained);
  }
}

TEST_CASE("retained run lengths respect the cap") {
  Rng rng(5);
  const int T = 30;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(T, 1);
  Eigen::VectorXd y(T);
  for (int t = 0; t < T; ++t) y[t] = 0.3 * rng.normal();

  ConjugateFactory factory(0.0, 4.0, 0.25);
  BocpdOptions opts;
  opts.hazard.rate = 0.05;
  opts.prune_threshold = 0.0;
  opts.max_run_lengths = 5;
  const BocpdState state = bocpd_run(factory, X, y, opts);

  for (int t = 0; t < T; ++t) {
    CHECK(static_cast<int>(state.history[t].size()) <= 5);
    double sum = 0.0;
    for (const auto& [r, p] : state.history[t]) sum += p;
    CHECK(std::abs(sum - 1.0) <= 1e-10);
  }
  CHECK(static_cast<int>(state.run_lengths.size()) <= 5);
}

TEST_CASE("threshold extraction") {
  BocpdState state;
  state.cp_probability = {1.0, 0.1, 0.7, 0.3, 0.9};

  SUBCASE("picks times above the threshold, never t = 1") {
    CHECK(threshold_segments(state, 0.5) == std::vector<int>{3, 5});
    CHECK(threshold_segments(state, 0.05) == std::vector<int>{2, 3, 4, 5});
  }

  SUBCASE("nothing above the threshold") {
    CHECK(threshold_segments(state, 0.95).empty());
    CHECK(threshold_segments(state, 1.0 - 1e-12).empty());
  }

  SUBCASE("threshold bounds") {
    CHECK_THROWS_AS(threshold_segments(state, 0.0), ConfigError);
    CHECK_THROWS_AS(threshold_segments(state, 1.0), ConfigError);
  }
}

TEST_CASE("configuration validation") {
  HazardSpec h;
  h.rate = 0.0;
  CHECK_THROWS_AS(h.validate(), ConfigError);
  h.rate = 1.0;
  CHECK_THROWS_AS(h.validate(), ConfigError);
  h.rate = -0.1;
  CHECK_THROWS_AS(h.validate(), ConfigError);

  BocpdOptions opts;
  opts.prune_threshold = -0.1;
  CHECK_THROWS_AS(opts.validate(), ConfigError);
  opts.prune_threshold = 1.0;
  CHECK_THROWS_AS(opts.validate(), ConfigError);
  opts.prune_threshold = 1e-6;
  opts.max_run_lengths = 0;
  CHECK_THROWS_AS(opts.validate(), ConfigError);

  ConjugateFactory factory(0.0, 1.0, 1.0);
  Eigen::MatrixXd X(3, 1);
  Eigen::VectorXd y(2);
  CHECK_THROWS_AS(bocpd_run(factory, X, y, BocpdOptions{}), ConfigError);

  GpSegmentConfig cfg = step_gp_config(1);
  cfg.num_particles = 1;
  CHECK_THROWS_AS(GpSegmentFactory{cfg}, ConfigError);

  GpSegmentConfig wrong_dim = step_gp_config(1);
  wrong_dim.prior.coords.pop_back();
  CHECK_THROWS_AS(GpSegmentFactory{wrong_dim}, ConfigError);
}

TEST_CASE("all messages underflowing is an error") {
  NegInfFactory factory;
  BocpdOptions opts;
  BocpdState state;
  CHECK_THROWS_AS(bocpd_step(state, factory, Eigen::VectorXd::Zero(1), 0.0, opts),
                  NumericError);
}

TEST_CASE("empty series yields an empty state") {
  ConjugateFactory factory(0.0, 1.0, 1.0);
  const BocpdState state =
      bocpd_run(factory, Eigen::MatrixXd::Zero(0, 1), Eigen::VectorXd::Zero(0), BocpdOptions{});
  CHECK(state.t == 0);
  CHECK(state.cp_probability.empty());
  CHECK(state.history.empty());
  CHECK(run_length_map(state).size() == 0);
  CHECK(threshold_segments(state, 0.5).empty());
}

TEST_CASE("fresh gp segment is the prior-predictive mixture") {
  GpSegmentConfig cfg = step_gp_config(12);
  GpSegmentFactory factory(cfg);
  const auto seg = factory.make_segment(3);

  // Rebuild the initial ensemble from the same seed discipline.
  const std::uint64_t seg_seed = derive_seed(cfg.seed, stream::kSegment, 3, 0);
  WeightedSamples ws;
  ws.thetas = sample_prior(cfg.prior, cfg.num_particles, seg_seed);
  ws.weights = Eigen::VectorXd::Constant(cfg.num_particles, 1.0 / cfg.num_particles);

  GpModel empty;
  empty.kernel = cfg.kernel;
  empty.mean = cfg.mean;
  empty.data.X.resize(0, 1);
  empty.data.y.resize(0);

  Eigen::MatrixXd Xs(1, 1);
  Xs << 2.0;
  const PredictiveMixture mix = mixture_predict(ws, empty, Xs);

  for (double yv : {-1.0, 0.3, 4.0}) {
    const double want = mixture_logpdf(mix, Eigen::VectorXd::Constant(1, yv));
    const double got = seg->predictive_logpdf(Xs.row(0).transpose(), yv);
    CHECK(std::abs(got - want) <= 1e-12);
  }

  // Prior predictive variance: signal plus noise per particle, plus the
  // spread of the constant means across particles.
  const auto [mean, var] = mixture_moments(mix);
  double want_mean = 0.0, want_second = 0.0;
  for (int i = 0; i < ws.size(); ++i) {
    const double sf2 = std::exp(ws.thetas[i][1]);
    const double sn2 = std::exp(ws.thetas[i][3]);
    const double c = ws.thetas[i][2];
    want_mean += ws.weights[i] * c;
    want_second += ws.weights[i] * (sf2 + sn2 + c * c);
  }
  CHECK(std::abs(mean[0] - want_mean) <= 1e-12);
  CHECK(std::abs(var[0] - (want_second - want_mean * want_mean)) <= 1e-12);

  CHECK(seg->length() == 0);
}

TEST_CASE("point-mass segment of one observation is the scalar gp predictive") {
  // All-fixed prior: every particle sits at the same theta, so the mixture
  // collapses to one hand-checkable GP predictive.
  const double log_ell = 0.3, log_sf2 = -0.2, c = 0.4, sn2 = 0.3;
  GpSegmentConfig cfg;
  cfg.kernel = {KernelFamily::kSquaredExponentialIso, 1};
  cfg.mean = {MeanFamily::kConstant};
  cfg.prior.coords.push_back(CoordinatePrior::fixed(log_ell));
  cfg.prior.coords.push_back(CoordinatePrior::fixed(log_sf2));
  cfg.prior.coords.push_back(CoordinatePrior::fixed(c));
  cfg.prior.coords.push_back(CoordinatePrior::fixed(std::log(sn2)));
  cfg.num_particles = 2;
  cfg.mh_moves = 0;
  cfg.seed = 5;

  GpSegmentFactory factory(cfg);
  const auto seg = factory.make_segment(1);

  const double x0 = 1.5, y0 = 0.9, x1 = 2.2, y1 = 0.1;
  seg->absorb(Eigen::VectorXd::Constant(1, x0), y0);
  CHECK(seg->length() == 1);

  const double sf2 = std::exp(log_sf2);
  const double ell = std::exp(log_ell);
  const double k01 = sf2 * std::exp(-0.5 * (x1 - x0) * (x1 - x0) / (ell * ell));
  const double mu = c + k01 * (y0 - c) / (sf2 + sn2);
  const double var = sf2 + sn2 - k01 * k01 / (sf2 + sn2);

  const double got = seg->predictive_logpdf(Eigen::VectorXd::Constant(1, x1), y1);
  CHECK(std::abs(got - log_normal_pdf(y1, mu, var)) <= 1e-12);
}

TEST_CASE("segments with the same start and data give identical densities") {
  GpSegmentConfig cfg = step_gp_config(21);
  GpSegmentFactory factory(cfg);
  const auto a = factory.make_segment(4);
  const auto b = factory.make_segment(4);

  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 1.0);
  const Eigen::VectorXd x1 = Eigen::VectorXd::Constant(1, 2.0);
  a->absorb(x0, 0.7);
  b->absorb(x0, 0.7);

  for (double yv : {-0.5, 0.0, 1.3}) {
    CHECK(a->predictive_logpdf(x1, yv) == b->predictive_logpdf(x1, yv));
  }
}

TEST_CASE("segment hypotheses never share state") {
  GpSegmentConfig cfg = step_gp_config(8);
  cfg.num_particles = 8;
  cfg.mh_moves = 1;
  GpSegmentFactory factory(cfg);
  BocpdOptions opts;
  opts.hazard.rate = 0.1;
  opts.prune_threshold = 0.0;

  Eigen::MatrixXd X(4, 1);
  X << 1, 2, 3, 4;
  Eigen::VectorXd y(4);
  y << 0.2, -0.1, 0.4, 0.0;
  BocpdState state = bocpd_run(factory, X, y, opts);
  REQUIRE(state.segments.size() >= 2);

  for (std::size_t i = 0; i + 1 < state.segments.size(); ++i)
    CHECK(state.segments[i].get() != state.segments[i + 1].get());

  const Eigen::VectorXd xq = Eigen::VectorXd::Constant(1, 5.0);
  std::vector<double> before;
  for (const auto& seg : state.segments) before.push_back(seg->predictive_logpdf(xq, 0.5));

  // Mutate the youngest hypothesis; every other one must be bitwise intact.
  state.segments[0]->absorb(xq, 0.5);
  for (std::size_t i = 1; i < state.segments.size(); ++i)
    CHECK(state.segments[i]->predictive_logpdf(xq, 0.5) == before[i]);
}

TEST_CASE("online filtering equals reprocessing the prefix from scratch") {
  GpSegmentConfig cfg = step_gp_config(33);
  cfg.num_particles = 10;
  cfg.mh_moves = 1;
  GpSegmentFactory factory(cfg);
  BocpdOptions opts;
  opts.hazard.rate = 0.05;

  Rng rng(606);
  const int T = 10;
  Eigen::MatrixXd X(T, 1);
  Eigen::VectorXd y(T);
  for (int t = 0; t < T; ++t) {
    X(t, 0) = t + 1;
    y[t] = (t < 5 ? 0.0 : 3.0) + 0.5 * rng.normal();
  }

  const BocpdState full = bocpd_run(factory, X, y, opts);
  for (int cut : {6, T}) {
    const BocpdState partial =
        bocpd_run(factory, X.topRows(cut), y.head(cut), opts);
    REQUIRE(static_cast<int>(partial.cp_probability.size()) == cut);
    for (int t = 0; t < cut; ++t) {
      CHECK(partial.cp_probability[t] == full.cp_probability[t]);
      REQUIRE(partial.history[t].size() == full.history[t].size());
      for (std::size_t k = 0; k < partial.history[t].size(); ++k) {
        CHECK(partial.history[t][k].first == full.history[t][k].first);
        CHECK(partial.history[t][k].second == full.history[t][k].second);
      }
    }
  }
}

TEST_CASE("marginalized gp segments detect a synthetic step change") {
  for (std::uint64_t seed : {1, 2}) {
    Rng rng(derive_seed(7777, 99, 0, seed));
    const int T = 80;
    Eigen::MatrixXd X(T, 1);
    Eigen::VectorXd y(T);
    for (int t = 0; t < T; ++t) {
      X(t, 0) = t + 1;
      y[t] = (t < 40 ? 0.0 : 5.0) + rng.normal();
    }

    GpSegmentFactory factory(step_gp_config(seed));
    BocpdOptions opts;
    opts.hazard.rate = 0.02;
    const BocpdState state = bocpd_run(factory, X, y, opts);

    const auto flags = threshold_segments(state, 0.5);
    REQUIRE(flags.size() == 1);
    CHECK(std::abs(flags[0] - 41) <= 3);
  }
}
