#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mixture.hpp"
#include "smc.hpp"

namespace gpsmc {

// One segment hypothesis: the predictive model for the data since the last
// change point. Implementations must be self-contained; hypotheses never
// share state.
class SegmentModel {
 public:
  virtual ~SegmentModel() = default;
  // log p(y | x, segment data so far). Empty segment: the prior predictive.
  virtual double predictive_logpdf(const Eigen::VectorXd& x, double y) = 0;
  // Absorbs the observation into the segment.
  virtual void absorb(const Eigen::VectorXd& x, double y) = 0;
  virtual int length() const = 0;
};

class SegmentModelFactory {
 public:
  virtual ~SegmentModelFactory() = default;
  // start_time is the 1-based index of the segment's first observation.
  // Keying randomness by it keeps online and restarted-offline passes
  // bitwise identical.
  virtual std::unique_ptr<SegmentModel> make_segment(int start_time) = 0;
};

// Constant hazard: each step ends the current segment with probability rate
// (geometric segment lengths).
struct HazardSpec {
  double rate = 0.02;
  void validate() const;
};

struct BocpdOptions {
  HazardSpec hazard;
  double prune_threshold = 1e-6;  // drop run lengths below this posterior mass
  int max_run_lengths = 500;      // keep at most this many, most probable first
  void validate() const;
};

// Run-length filter state after absorbing y_{1:t}. run_lengths holds the
// retained support of r_t (ascending); log_joint the matching unnormalized
// log p(r_t, y_{1:t}) messages; segments the per-hypothesis predictors.
struct BocpdState {
  int t = 0;
  std::vector<int> run_lengths;
  Eigen::VectorXd log_joint;
  std::vector<std::unique_ptr<SegmentModel>> segments;

  // p(r_t = 1 | y_{1:t}) for t = 1..T, recorded before pruning.
  std::vector<double> cp_probability;
  // Retained (run_length, posterior) pairs per t, renormalized after pruning.
  std::vector<std::vector<std::pair<int, double>>> history;
};

// One filtering update. Growth messages multiply by (1 - hazard) and the
// segment's predictive; the change message pools all hypotheses through the
// hazard and a fresh empty-segment predictive. Retained segments then absorb
// the observation.
void bocpd_step(BocpdState& state, SegmentModelFactory& factory, const Eigen::VectorXd& x,
                double y, const BocpdOptions& opts);

BocpdState bocpd_run(SegmentModelFactory& factory, const Eigen::MatrixXd& X,
                     const Eigen::VectorXd& y, const BocpdOptions& opts);

// Dense T x max(r) matrix of p(r_t = r | y_{1:t}); pruned entries zero,
// column r-1 holds run length r. Rows sum to one.
Eigen::MatrixXd run_length_map(const BocpdState& state);

// 1-based times t >= 2 whose change-point probability exceeds the threshold.
// t = 1 is excluded: r_1 = 1 holds by construction.
std::vector<int> threshold_segments(const BocpdState& state, double threshold);

// GP segments: hyperparameters marginalized by the sampler, one batch per
// observation, extended online.
struct GpSegmentConfig {
  KernelSpec kernel;
  MeanSpec mean;
  PriorSpec prior;
  int num_particles = 25;
  int mh_moves = 2;
  double ess_threshold = 0.5;
  std::uint64_t seed = 0;
};

class GpSegmentFactory : public SegmentModelFactory {
 public:
  explicit GpSegmentFactory(GpSegmentConfig cfg);
  std::unique_ptr<SegmentModel> make_segment(int start_time) override;

 private:
  GpSegmentConfig cfg_;
};

}  // namespace gpsmc
