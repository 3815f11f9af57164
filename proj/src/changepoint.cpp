#include "changepoint.hpp"

#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "rng.hpp"
#include "samples.hpp"

namespace gpsmc {

void HazardSpec::validate() const {
  if (!(rate > 0.0 && rate < 1.0))
    throw ConfigError("hazard rate must lie strictly between 0 and 1");
}

void BocpdOptions::validate() const {
  hazard.validate();
  if (!(prune_threshold >= 0.0 && prune_threshold < 1.0))
    throw ConfigError("prune threshold must lie in [0, 1)");
  if (max_run_lengths < 1) throw ConfigError("must retain at least one run length");
}

void bocpd_step(BocpdState& state, SegmentModelFactory& factory, const Eigen::VectorXd& x,
                double y, const BocpdOptions& opts) {
  opts.validate();
  const int t = state.t + 1;
  auto fresh = factory.make_segment(t);
  const double lp_change_pred = fresh->predictive_logpdf(x, y);

  std::vector<int> run_lengths;
  Eigen::VectorXd log_joint;
  std::vector<std::unique_ptr<SegmentModel>> segments;

  if (t == 1) {
    // The first observation opens the first segment: r_1 = 1 with certainty.
    run_lengths = {1};
    log_joint = Eigen::VectorXd::Constant(1, lp_change_pred);
    segments.push_back(std::move(fresh));
  } else {
    const int m = static_cast<int>(state.run_lengths.size());
    run_lengths.resize(m + 1);
    log_joint.resize(m + 1);
    segments.resize(m + 1);

    run_lengths[0] = 1;
    log_joint[0] = std::log(opts.hazard.rate) + log_sum_exp(state.log_joint) + lp_change_pred;
    segments[0] = std::move(fresh);

    const double log_growth = std::log1p(-opts.hazard.rate);
    for (int i = 0; i < m; ++i) {
      run_lengths[i + 1] = state.run_lengths[i] + 1;
      log_joint[i + 1] =
          state.log_joint[i] + log_growth + state.segments[i]->predictive_logpdf(x, y);
      segments[i + 1] = std::move(state.segments[i]);
    }
  }

  const double norm = log_sum_exp(log_joint);
  if (!std::isfinite(norm))
    throw NumericError("change-point filter: every run-length message underflowed at t = " +
                       std::to_string(t));
  state.cp_probability.push_back(std::exp(log_joint[0] - norm));

  // Prune: drop low-posterior run lengths, cap the retained count.
  const int total = static_cast<int>(run_lengths.size());
  std::vector<int> keep;
  for (int i = 0; i < total; ++i)
    if (std::exp(log_joint[i] - norm) >= opts.prune_threshold) keep.push_back(i);
  if (keep.empty()) {
    int best = 0;
    log_joint.maxCoeff(&best);
    keep.push_back(best);
  }
  if (static_cast<int>(keep.size()) > opts.max_run_lengths) {
    std::stable_sort(keep.begin(), keep.end(),
                     [&](int a, int b) { return log_joint[a] > log_joint[b]; });
    keep.resize(opts.max_run_lengths);
    std::sort(keep.begin(), keep.end());
  }

  state.run_lengths.clear();
  Eigen::VectorXd kept_joint(static_cast<int>(keep.size()));
  std::vector<std::unique_ptr<SegmentModel>> kept_segments;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    state.run_lengths.push_back(run_lengths[keep[k]]);
    kept_joint[static_cast<int>(k)] = log_joint[keep[k]];
    kept_segments.push_back(std::move(segments[keep[k]]));
  }
  state.log_joint = std::move(kept_joint);
  state.segments = std::move(kept_segments);

  const double kept_norm = log_sum_exp(state.log_joint);
  std::vector<std::pair<int, double>> row;
  for (int k = 0; k < static_cast<int>(state.run_lengths.size()); ++k)
    row.emplace_back(state.run_lengths[k], std::exp(state.log_joint[k] - kept_norm));
  state.history.push_back(std::move(row));

  for (auto& seg : state.segments) seg->absorb(x, y);
  state.t = t;
}

BocpdState bocpd_run(SegmentModelFactory& factory, const Eigen::MatrixXd& X,
                     const Eigen::VectorXd& y, const BocpdOptions& opts) {
  if (X.rows() != y.size()) throw ConfigError("change-point run: X/y length mismatch");
  BocpdState state;
  for (Eigen::Index t = 0; t < y.size(); ++t)
    bocpd_step(state, factory, X.row(t).transpose(), y[t], opts);
  return state;
}

Eigen::MatrixXd run_length_map(const BocpdState& state) {
  int max_r = 0;
  for (const auto& row : state.history)
    for (const auto& [r, p] : row) max_r = std::max(max_r, r);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<int>(state.history.size()), max_r);
  for (std::size_t t = 0; t < state.history.size(); ++t)
    for (const auto& [r, p] : state.history[t]) out(static_cast<int>(t), r - 1) = p;
  return out;
}

std::vector<int> threshold_segments(const BocpdState& state, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw ConfigError("segment threshold must lie strictly between 0 and 1");
  std::vector<int> out;
  for (std::size_t i = 1; i < state.cp_probability.size(); ++i)
    if (state.cp_probability[i] > threshold) out.push_back(static_cast<int>(i) + 1);
  return out;
}

namespace {

class GpSegment final : public SegmentModel {
 public:
  GpSegment(const GpSegmentConfig& cfg, int start_time) : smc_cfg_{} {
    seq_.model.kernel = cfg.kernel;
    seq_.model.mean = cfg.mean;
    seq_.model.data.X.resize(0, cfg.kernel.input_dim);
    seq_.model.data.y.resize(0);
    seq_.prior = cfg.prior;
    smc_cfg_.num_particles = cfg.num_particles;
    smc_cfg_.num_batches = 1;  // placeholder; batches arrive one per observation
    smc_cfg_.mh_moves = cfg.mh_moves;
    smc_cfg_.ess_threshold = cfg.ess_threshold;
    smc_cfg_.seed = derive_seed(cfg.seed, stream::kSegment,
                                static_cast<std::uint64_t>(start_time), 0);
    ps_ = init_particles(smc_cfg_, seq_);
  }

  double predictive_logpdf(const Eigen::VectorXd& x, double y) override {
    Eigen::MatrixXd Xstar = x.transpose();
    const PredictiveMixture mix = mixture_predict(from_particles(ps_), seq_.model, Xstar);
    return mixture_logpdf(mix, Eigen::VectorXd::Constant(1, y));
  }

  void absorb(const Eigen::VectorXd& x, double y) override {
    const int row = seq_.append_observation(x, y);
    extend_online(ps_, seq_, {row}, smc_cfg_);
  }

  int length() const override { return static_cast<int>(seq_.model.data.size()); }

 private:
  TemperingSequence seq_;
  SmcConfig smc_cfg_;
  ParticleSystem ps_;
};

}  // namespace

GpSegmentFactory::GpSegmentFactory(GpSegmentConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.num_particles < 2) throw ConfigError("gp segments need at least two particles");
  cfg_.prior.validate_against(ModelLayout{cfg_.kernel, cfg_.mean});
}

std::unique_ptr<SegmentModel> GpSegmentFactory::make_segment(int start_time) {
  return std::make_unique<GpSegment>(cfg_, start_time);
}

}  // namespace gpsmc
