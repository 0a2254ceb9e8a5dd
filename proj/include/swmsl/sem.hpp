#pragma once

#include <cstdint>
#include <vector>

#include "swmsl/optimizers.hpp"
#include "swmsl/priors.hpp"
#include "swmsl/types.hpp"

namespace swmsl {

/// Cached per-pixel log-likelihood profiles over the admissible depth window,
/// rebuilt whenever W changes. Row n holds sum_p m_p log p(s_p | w_n, k) for
/// k in [t_lo, t_lo + K).
struct LikelihoodTable {
  int rows = 0, cols = 0;
  int t_lo = 0, K = 0;
  std::vector<double> loglik;  // N x K

  const double* row(int n) const {
    return loglik.data() + static_cast<std::size_t>(n) * K;
  }
};

LikelihoodTable build_likelihood_table(const SceneCube& scene,
                                       const IrfBank& bank,
                                       const WeightField& W);

/// One checkerboard Gibbs pass (both colors) over the depth field. Each pixel
/// draws from the categorical conditional exp(loglik + depth prior) with its
/// own RNG stream keyed by mix64(stream_key, pixel_base + n), so results are
/// identical under any parallel schedule.
void gibbs_sweep(const LikelihoodTable& table, DepthField& t, double epsilon,
                 std::uint64_t stream_key, std::uint64_t pixel_base);

struct SemOptions {
  HyperParams hyper;
  AdmmConfig admm;
  NewtonConfig newton;
  std::uint64_t seed = 1;
  /// Offset added to pixel indices when keying RNG streams; lets a scene tile
  /// reproduce the draws it would make inside a larger scene.
  std::uint64_t pixel_stream_base = 0;
  /// When >= 0, run exactly this many iterations and return the last iterate
  /// (no burn-in logic, no averaging); 0 returns the initialization.
  int fixed_iters = -1;
  /// Restrict each p~ row to bins within this radius of its mode and of the
  /// neighboring depths (0 disables truncation).
  int truncation_radius = 0;
  /// Evaluate the surrogate before/after each M-step block for the trace.
  bool record_q = true;
  /// M-step refinement threshold: when a full M-step would improve the
  /// surrogate by less than this fraction of (1 + |Q~|), keep the incumbent
  /// iterate instead (still a valid generalized-EM step). Together with the
  /// iteration-independent Gibbs streams this makes a converged chain exactly
  /// stationary, so the d_eps stopping rule can fire. 0 disables the rule.
  double freeze_q_rel = 1e-9;
};

struct SemTraceRow {
  int iter = 0;
  double rel_err = 0.0;
  double q_pre = 0.0;
  double q_post_w = 0.0;
  double q_post_phi = 0.0;
  double wall_ms = 0.0;
};

struct SemResult {
  WeightField W;
  DirichletParams phi;
  DepthField t_tilde;
  std::vector<SemTraceRow> trace;
  int burnin_iters = 0;
  bool burnin_converged = false;  // false => BurninCapReached
  int total_iters = 0;
};

/// Stochastic EM state and steps; run_sem drives the full loop.
class SemEngine {
 public:
  SemEngine(const SceneCube& scene, const IrfBank& bank, const PriorModel& prior,
            const SemOptions& opts, const WeightField* W0 = nullptr);

  const WeightField& W() const { return W_; }
  const DirichletParams& phi() const { return phi_; }
  const DepthField& t_tilde() const { return t_tilde_; }
  const std::vector<double>& p_tilde() const { return p_tilde_; }
  const LikelihoodTable& table() const { return table_; }

  /// Rebuilds the likelihood table from the current W.
  void refresh_likelihood();
  /// hyper.e_step_sweeps hot-started Gibbs passes. Streams are keyed by the
  /// sweep index within the E-step but not by the EM iteration, so a
  /// stationary chain redraws identical samples and the stopping rule can
  /// fire.
  void sample_t_tilde();
  /// p~ rows from the freshest t~, normalized with log-sum-exp.
  void compute_p_tilde();
  /// M-step: W block (Newton per pixel or ADMM) then the beta block.
  SemTraceRow m_step(int iter);

  /// Q~(W, phi) under the current p~ (data terms must be built by m_step or
  /// explicitly); exposed for tests.
  double surrogate(const WeightField& W, const DirichletParams& phi) const;
  void build_data_terms_now();

 private:
  const SceneCube& scene_;
  const IrfBank& bank_;
  PriorModel prior_;
  SemOptions opts_;

  WeightField W_;
  DirichletParams phi_;
  DepthField t_tilde_;
  LikelihoodTable table_;
  std::vector<double> p_tilde_;
  std::vector<PixelDataTerm> data_terms_;
  std::vector<std::vector<int>> cluster_pixels_;
};

SemResult run_sem(const SceneCube& scene, const IrfBank& bank,
                  const PriorModel& prior, const SemOptions& opts,
                  const WeightField* W0 = nullptr);

}  // namespace swmsl
