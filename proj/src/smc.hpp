#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "gp.hpp"
#include "priors.hpp"
#include "rng.hpp"

namespace gpsmc {

// The bridging sequence pi_n(theta) ~ p(y_{B_1:n} | x_{B_1:n}, theta) p(theta):
// the prior at n=0, the full posterior at n=P. Owns the model, the prior and
// the batch partition.
struct TemperingSequence {
  GpModel model;
  PriorSpec prior;
  std::vector<std::vector<int>> batches;

  int num_stages() const { return static_cast<int>(batches.size()); }
  // Concatenated indices of batches 1..n.
  std::vector<int> prefix_rows(int n) const;
  void append_batch(std::vector<int> batch);
  // Grows the dataset by one observation without batching it; returns the new
  // row index. Callers pass the row to extend_online as its own batch.
  int append_observation(const Eigen::VectorXd& x, double y);
  void validate() const;
};

// Contiguous batches in data order, ceil(n/P) points each; optionally a
// seeded shuffle of the rows first.
std::vector<std::vector<int>> make_batches(int n_rows, int n_batches, bool shuffle,
                                           std::uint64_t seed);

struct SmcConfig {
  int num_particles = 100;   // N
  int num_batches = 10;      // P
  int mh_moves = 5;          // K
  double ess_threshold = 0.5;
  double adapt_target = 0.3;
  double adapt_rate = 1.0;
  double base_scale_factor = 0.5;
  bool shuffle_batches = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ParticleSystem {
  std::vector<Eigen::VectorXd> particles;
  Eigen::VectorXd log_weights;     // normalized: logsumexp == 0
  Eigen::VectorXd log_target;      // cached log pi_stage per particle
  int stage = 0;
  std::vector<std::vector<int>> batches;
  Eigen::VectorXd proposal_scale;  // per-coordinate random-walk h
  double scale_multiplier = 1.0;   // adaptation carry across stages
  std::int64_t eval_counter = 0;   // cumulative likelihood evaluations
  std::vector<double> acceptance_history;

  int size() const { return static_cast<int>(particles.size()); }
  // Scalar exp so a -inf log weight maps to exactly zero mass.
  Eigen::VectorXd weights() const {
    Eigen::VectorXd w(log_weights.size());
    for (Eigen::Index i = 0; i < log_weights.size(); ++i) w[i] = std::exp(log_weights[i]);
    return w;
  }
};

// log pi_n(theta). A -inf prior short-circuits: the likelihood is neither
// evaluated nor counted. eval_counter, when given, is bumped once per
// likelihood evaluation.
double log_pi(const TemperingSequence& seq, int n, const Eigen::VectorXd& theta,
              std::int64_t* eval_counter = nullptr);

// Eq-style weight update from stage ps.stage to ps.stage+1:
// log w += log pi_n(theta) - log pi_{n-1}(theta), then renormalize. The
// cached log_target supplies the pi_{n-1} values, so this costs one
// likelihood evaluation per particle.
void reweight(ParticleSystem& ps, const TemperingSequence& seq);

// 1 / sum(w_i^2), in [1, N].
double ess(const ParticleSystem& ps);

// Systematic resampling; weights reset to uniform. With exactly uniform
// weights every particle survives once.
void resample(ParticleSystem& ps, Rng& rng);

// K Metropolis-Hastings random-walk steps per particle targeting pi_stage.
// The proposal is an independent-coordinate Gaussian walk of scale
// proposal_scale over the free coordinates; its symmetry cancels the q-ratio
// in the acceptance probability. Returns the acceptance rate.
double mh_move(ParticleSystem& ps, const TemperingSequence& seq, int n_moves,
               std::uint64_t master_seed);

// Acceptance-rate targeting: scale *= exp(rate * (observed - target)),
// clamped to [1e-6, 1e2]. The multiplier carries the correction across
// stages, where the base scale is re-derived from the particle spread.
void adapt_proposal(ParticleSystem& ps, double observed_acceptance, const SmcConfig& cfg);

// Per-coordinate base scale: weighted particle standard deviation times
// base_scale_factor times the adaptation multiplier. Falls back to the prior
// standard deviation when the particle cloud has collapsed.
void set_stage_proposal_scale(ParticleSystem& ps, const SmcConfig& cfg,
                              const PriorSpec& prior);

// Full sampler: initialize from the prior, then for n = 1..P reweight,
// resample when ESS < ess_threshold * N, and apply K MH moves with proposal
// adaptation.
ParticleSystem run(const SmcConfig& cfg, const TemperingSequence& seq);

// One more tempering transition for a batch appended after a completed run.
void extend_online(ParticleSystem& ps, TemperingSequence& seq, std::vector<int> new_batch,
                   const SmcConfig& cfg);

// Initial system at stage 0 (prior samples, uniform weights). Exposed for
// the online change-point detector, which starts segments empty.
ParticleSystem init_particles(const SmcConfig& cfg, const TemperingSequence& seq);

}  // namespace gpsmc
