#include "smc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common.hpp"

namespace gpsmc {

std::vector<int> TemperingSequence::prefix_rows(int n) const {
  if (n < 0 || n > num_stages()) throw ConfigError("prefix_rows: stage out of range");
  std::vector<int> rows;
  for (int b = 0; b < n; ++b) rows.insert(rows.end(), batches[b].begin(), batches[b].end());
  return rows;
}

void TemperingSequence::append_batch(std::vector<int> batch) {
  for (int r : batch)
    if (r < 0 || r >= model.data.size()) throw ConfigError("append_batch: row index out of range");
  batches.push_back(std::move(batch));
}

int TemperingSequence::append_observation(const Eigen::VectorXd& x, double y) {
  if (x.size() != model.data.dim())
    throw ConfigError("append_observation: input dimension mismatch");
  const int n = static_cast<int>(model.data.size());
  model.data.X.conservativeResize(n + 1, Eigen::NoChange);
  model.data.X.row(n) = x.transpose();
  model.data.y.conservativeResize(n + 1);
  model.data.y[n] = y;
  return n;
}

void TemperingSequence::validate() const {
  model.data.validate();
  prior.validate_against(model.layout());
  // Empty batches are legal: they make the tempering step a unit ratio.
  std::vector<char> seen(model.data.size(), 0);
  for (const auto& batch : batches) {
    for (int r : batch) {
      if (r < 0 || r >= model.data.size())
        throw ConfigError("tempering sequence: row index out of range");
      if (seen[r]) throw ConfigError("tempering sequence: row appears in two batches");
      seen[r] = 1;
    }
  }
}

std::vector<std::vector<int>> make_batches(int n_rows, int n_batches, bool shuffle,
                                           std::uint64_t seed) {
  if (n_rows < 1) throw ConfigError("make_batches: need at least one row");
  if (n_batches < 1 || n_batches > n_rows)
    throw ConfigError("make_batches: batch count must be in [1, n_rows]");
  std::vector<int> order(n_rows);
  std::iota(order.begin(), order.end(), 0);
  if (shuffle) {
    Rng rng(derive_seed(seed, stream::kData, 0, 0));
    // Fisher-Yates with our own uniform so the permutation is stable across
    // standard libraries.
    for (int i = n_rows - 1; i > 0; --i) {
      int j = static_cast<int>(rng.uniform01() * (i + 1));
      if (j > i) j = i;
      std::swap(order[i], order[j]);
    }
  }
  const int per = (n_rows + n_batches - 1) / n_batches;
  std::vector<std::vector<int>> batches;
  for (int start = 0; start < n_rows; start += per) {
    const int stop = std::min(start + per, n_rows);
    batches.emplace_back(order.begin() + start, order.begin() + stop);
  }
  return batches;
}

void SmcConfig::validate() const {
  if (num_particles < 2) throw ConfigError("smc: num_particles must be >= 2");
  if (num_batches < 1) throw ConfigError("smc: num_batches must be >= 1");
  if (mh_moves < 0) throw ConfigError("smc: mh_moves must be >= 0");
  if (!(ess_threshold >= 0.0 && ess_threshold <= 1.0))
    throw ConfigError("smc: ess_threshold must be in [0, 1]");
  if (!(adapt_target > 0.0 && adapt_target < 1.0))
    throw ConfigError("smc: adapt_target must be in (0, 1)");
  if (!(base_scale_factor > 0.0)) throw ConfigError("smc: base_scale_factor must be positive");
}

double log_pi(const TemperingSequence& seq, int n, const Eigen::VectorXd& theta,
              std::int64_t* eval_counter) {
  const double lp = log_prior(seq.prior, theta);
  if (lp == kNegInf) return kNegInf;
  if (n == 0) return lp;
  const auto rows = seq.prefix_rows(n);
  if (rows.empty()) return lp;  // nothing but empty batches so far
  if (eval_counter) ++*eval_counter;
  return lp + log_marginal_likelihood(seq.model, theta, rows);
}

void reweight(ParticleSystem& ps, const TemperingSequence& seq) {
  const int next = ps.stage + 1;
  if (next > seq.num_stages()) throw ConfigError("reweight: no batch left to absorb");
  const int n = ps.size();
  Eigen::VectorXd new_target(n);
  for (int i = 0; i < n; ++i) {
    new_target[i] = log_pi(seq, next, ps.particles[i], &ps.eval_counter);
    ps.log_weights[i] += new_target[i] - ps.log_target[i];
  }
  const double norm = log_sum_exp(ps.log_weights);
  if (!std::isfinite(norm))
    throw NumericError("reweight: total particle degeneracy (all weights vanished)");
  ps.log_weights.array() -= norm;
  ps.log_target = std::move(new_target);
  ps.stage = next;
}

double ess(const ParticleSystem& ps) {
  const Eigen::VectorXd w = ps.weights();
  return 1.0 / w.squaredNorm();
}

void resample(ParticleSystem& ps, Rng& rng) {
  const int n = ps.size();
  const Eigen::VectorXd w = ps.weights();
  const double u = rng.uniform01();
  std::vector<int> picks(n);
  double cum = w[0];
  int j = 0;
  for (int k = 0; k < n; ++k) {
    const double pos = (k + u) / n;
    while (pos > cum && j < n - 1) cum += w[++j];
    picks[k] = j;
  }
  std::vector<Eigen::VectorXd> particles(n);
  Eigen::VectorXd target(n);
  for (int k = 0; k < n; ++k) {
    particles[k] = ps.particles[picks[k]];
    target[k] = ps.log_target[picks[k]];
  }
  ps.particles = std::move(particles);
  ps.log_target = std::move(target);
  ps.log_weights.setConstant(-std::log(static_cast<double>(n)));
}

double mh_move(ParticleSystem& ps, const TemperingSequence& seq, int n_moves,
               std::uint64_t master_seed) {
  if (n_moves <= 0) return 0.0;
  const int n = ps.size();
  const int dim = static_cast<int>(ps.particles[0].size());
  const auto free_mask = seq.prior.free_mask();
  std::int64_t proposed = 0, accepted = 0;
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(master_seed, stream::kMove, static_cast<std::uint64_t>(ps.stage),
                        static_cast<std::uint64_t>(i)));
    for (int k = 0; k < n_moves; ++k) {
      Eigen::VectorXd cand = ps.particles[i];
      for (int d = 0; d < dim; ++d)
        if (free_mask[d]) cand[d] += ps.proposal_scale[d] * rng.normal();
      ++proposed;
      // Evaluate the prior first: a zero-density candidate is rejected
      // without spending a likelihood evaluation, and the uniform draw is
      // still consumed to keep the stream aligned.
      const double cand_target = log_pi(seq, ps.stage, cand, &ps.eval_counter);
      const double log_u = std::log(rng.uniform01_open_left());
      if (cand_target != kNegInf && log_u < cand_target - ps.log_target[i]) {
        ps.particles[i] = std::move(cand);
        ps.log_target[i] = cand_target;
        ++accepted;
      }
    }
  }
  const double rate = static_cast<double>(accepted) / static_cast<double>(proposed);
  ps.acceptance_history.push_back(rate);
  return rate;
}

void adapt_proposal(ParticleSystem& ps, double observed_acceptance, const SmcConfig& cfg) {
  const double factor = std::exp(cfg.adapt_rate * (observed_acceptance - cfg.adapt_target));
  ps.scale_multiplier = std::clamp(ps.scale_multiplier * factor, 1e-6, 1e2);
}

void set_stage_proposal_scale(ParticleSystem& ps, const SmcConfig& cfg,
                              const PriorSpec& prior) {
  const int n = ps.size();
  const int dim = static_cast<int>(ps.particles[0].size());
  const Eigen::VectorXd w = ps.weights();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < n; ++i) mean += w[i] * ps.particles[i];
  Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd d = ps.particles[i] - mean;
    var += w[i] * d.cwiseProduct(d);
  }
  ps.proposal_scale.resize(dim);
  for (int d = 0; d < dim; ++d) {
    double sd = std::sqrt(std::max(var[d], 0.0));
    if (sd == 0.0) sd = prior.coords[d].stddev();  // collapsed cloud: fall back
    ps.proposal_scale[d] = sd * cfg.base_scale_factor * ps.scale_multiplier;
  }
}

ParticleSystem init_particles(const SmcConfig& cfg, const TemperingSequence& seq) {
  cfg.validate();
  seq.validate();
  ParticleSystem ps;
  const int n = cfg.num_particles;
  ps.particles = sample_prior(seq.prior, n, cfg.seed);
  ps.log_weights = Eigen::VectorXd::Constant(n, -std::log(static_cast<double>(n)));
  ps.log_target.resize(n);
  for (int i = 0; i < n; ++i) ps.log_target[i] = log_pi(seq, 0, ps.particles[i], nullptr);
  ps.stage = 0;
  ps.batches = seq.batches;
  ps.proposal_scale = Eigen::VectorXd::Ones(seq.prior.dim());
  return ps;
}

namespace {

void advance_one_stage(ParticleSystem& ps, const TemperingSequence& seq, const SmcConfig& cfg) {
  reweight(ps, seq);
  if (ess(ps) < cfg.ess_threshold * ps.size()) {
    Rng rng(derive_seed(cfg.seed, stream::kResample, static_cast<std::uint64_t>(ps.stage), 0));
    resample(ps, rng);
  }
  if (cfg.mh_moves > 0) {
    set_stage_proposal_scale(ps, cfg, seq.prior);
    const double rate = mh_move(ps, seq, cfg.mh_moves, cfg.seed);
    adapt_proposal(ps, rate, cfg);
  }
}

}  // namespace

ParticleSystem run(const SmcConfig& cfg, const TemperingSequence& seq) {
  ParticleSystem ps = init_particles(cfg, seq);
  for (int n = 0; n < seq.num_stages(); ++n) advance_one_stage(ps, seq, cfg);
  return ps;
}

void extend_online(ParticleSystem& ps, TemperingSequence& seq, std::vector<int> new_batch,
                   const SmcConfig& cfg) {
  if (ps.stage != seq.num_stages())
    throw ConfigError("extend_online: particle system is not at the final stage");
  seq.append_batch(std::move(new_batch));
  ps.batches = seq.batches;
  advance_one_stage(ps, seq, cfg);
}

}  // namespace gpsmc
