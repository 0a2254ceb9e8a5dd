#include "swmsl/sem.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "swmsl/parallel.hpp"
#include "swmsl/rng.hpp"
#include "swmsl/xcorr.hpp"

namespace swmsl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Stream tags separating the Gibbs uses of the base seed.
constexpr std::uint64_t kEStepTag = 0x53454d2d45535450ULL;

int draw_categorical(const std::vector<double>& logits, Rng& rng) {
  const int K = static_cast<int>(logits.size());
  double max_logit = kNegInf;
  for (double v : logits) max_logit = std::max(max_logit, v);
  if (max_logit == kNegInf) {
    // Degenerate row: fall back to a uniform draw.
    return std::min(K - 1, static_cast<int>(rng.next_unit() * K));
  }
  double total = 0.0;
  std::vector<double> weights(K);
  for (int k = 0; k < K; ++k) {
    weights[k] = std::exp(logits[k] - max_logit);
    total += weights[k];
  }
  const double u = rng.next_unit() * total;
  double cum = 0.0;
  for (int k = 0; k < K; ++k) {
    cum += weights[k];
    if (u < cum) return k;
  }
  return K - 1;
}

}  // namespace

LikelihoodTable build_likelihood_table(const SceneCube& scene,
                                       const IrfBank& bank,
                                       const WeightField& W) {
  LikelihoodTable table;
  table.rows = scene.rows();
  table.cols = scene.cols();
  table.t_lo = bank.t_min();
  table.K = bank.depth_bins();
  table.loglik.resize(static_cast<std::size_t>(scene.pixels()) * table.K);
  parallel_for(static_cast<std::size_t>(scene.pixels()), [&](std::size_t n) {
    const auto profile = likelihood_profile(scene, static_cast<int>(n),
                                            W.row(static_cast<int>(n)), W.L(),
                                            bank);
    std::copy(profile.begin(), profile.end(),
              table.loglik.begin() + n * table.K);
  });
  return table;
}

void gibbs_sweep(const LikelihoodTable& table, DepthField& t, double epsilon,
                 std::uint64_t stream_key, std::uint64_t pixel_base) {
  const int rows = table.rows, cols = table.cols;
  const int N = rows * cols;
  // Checkerboard coloring: a pixel's conditional depends only on its
  // 4-neighbors, which all carry the opposite color.
  for (int color = 0; color < 2; ++color) {
    std::vector<int> members;
    members.reserve((N + 1) / 2);
    for (int n = 0; n < N; ++n)
      if (((n / cols) + (n % cols)) % 2 == color) members.push_back(n);
    parallel_for(members.size(), [&](std::size_t m) {
      const int n = members[m];
      std::vector<double> logits(table.row(n), table.row(n) + table.K);
      add_depth_prior(logits, n, t, rows, cols, table.t_lo, epsilon);
      Rng rng(mix64(stream_key, pixel_base + static_cast<std::uint64_t>(n)));
      t[n] = table.t_lo + draw_categorical(logits, rng);
    });
  }
}

SemEngine::SemEngine(const SceneCube& scene, const IrfBank& bank,
                     const PriorModel& prior, const SemOptions& opts,
                     const WeightField* W0)
    : scene_(scene), bank_(bank), prior_(prior), opts_(opts) {
  opts_.hyper.validate();
  opts_.admm.validate();
  opts_.newton.validate();
  prior_.validate(scene.pixels());

  const int L = bank.L();
  if (W0) {
    if (W0->pixels() != scene.pixels() || W0->L() != L)
      throw ValidationError("SemEngine: W0 size mismatch");
    W0->check_simplex();
    W_ = *W0;
  } else {
    // Background-heavy interior start.
    W_ = WeightField(scene.rows(), scene.cols(), L, 0.5 / (L + 1));
  }

  if (prior_estimates_beta(prior_.kind)) {
    phi_.beta.assign(prior_.beta_groups(),
                     std::vector<double>(L + 1, opts_.hyper.beta_init));
  }
  if (prior_.kind == PriorKind::CDirichlet) {
    cluster_pixels_.resize(prior_.n_clusters);
    for (int n = 0; n < scene.pixels(); ++n)
      cluster_pixels_[prior_.clusters[n]].push_back(n);
  } else if (prior_.kind == PriorKind::GDirichlet) {
    cluster_pixels_.resize(1);
    cluster_pixels_[0].resize(scene.pixels());
    std::iota(cluster_pixels_[0].begin(), cluster_pixels_[0].end(), 0);
  }

  // Hot-start the auxiliary chain from the matched-filter depth.
  t_tilde_ = xcorr_depth(scene, bank);
  p_tilde_.assign(static_cast<std::size_t>(scene.pixels()) * bank.depth_bins(),
                  0.0);
}

void SemEngine::refresh_likelihood() {
  table_ = build_likelihood_table(scene_, bank_, W_);
}

void SemEngine::sample_t_tilde() {
  for (int sweep = 0; sweep < opts_.hyper.e_step_sweeps; ++sweep) {
    const std::uint64_t key =
        mix64(opts_.seed, kEStepTag, static_cast<std::uint64_t>(sweep));
    gibbs_sweep(table_, t_tilde_, opts_.hyper.epsilon, key,
                opts_.pixel_stream_base);
  }
}

void SemEngine::compute_p_tilde() {
  const int K = table_.K;
  const int radius = opts_.truncation_radius;
  parallel_for(static_cast<std::size_t>(scene_.pixels()), [&](std::size_t n) {
    std::vector<double> logits(table_.row(static_cast<int>(n)),
                               table_.row(static_cast<int>(n)) + K);
    add_depth_prior(logits, static_cast<int>(n), t_tilde_, table_.rows,
                    table_.cols, table_.t_lo, opts_.hyper.epsilon);

    std::vector<char> keep;
    if (radius > 0) {
      keep.assign(K, 0);
      int mode = 0;
      for (int k = 1; k < K; ++k)
        if (logits[k] > logits[mode]) mode = k;
      const auto mark = [&](int center) {
        for (int k = std::max(0, center - radius);
             k <= std::min(K - 1, center + radius); ++k)
          keep[k] = 1;
      };
      mark(mode);
      const int rows = table_.rows, cols = table_.cols;
      const int i = static_cast<int>(n) / cols, j = static_cast<int>(n) % cols;
      if (i > 0) mark(t_tilde_[static_cast<int>(n) - cols] - table_.t_lo);
      if (i + 1 < rows) mark(t_tilde_[static_cast<int>(n) + cols] - table_.t_lo);
      if (j > 0) mark(t_tilde_[static_cast<int>(n) - 1] - table_.t_lo);
      if (j + 1 < cols) mark(t_tilde_[static_cast<int>(n) + 1] - table_.t_lo);
    }

    double max_logit = kNegInf;
    for (int k = 0; k < K; ++k)
      if ((keep.empty() || keep[k]) && logits[k] > max_logit)
        max_logit = logits[k];
    double* row = p_tilde_.data() + n * K;
    if (max_logit == kNegInf) {
      std::fill(row, row + K, 1.0 / K);
      return;
    }
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
      row[k] = (keep.empty() || keep[k]) ? std::exp(logits[k] - max_logit) : 0.0;
      total += row[k];
    }
    for (int k = 0; k < K; ++k) row[k] /= total;
  });
}

void SemEngine::build_data_terms_now() {
  data_terms_ = build_data_terms(scene_, p_tilde_, bank_);
}

double SemEngine::surrogate(const WeightField& W,
                            const DirichletParams& phi) const {
  double q = 0.0;
  for (int n = 0; n < scene_.pixels(); ++n) {
    const double v = data_terms_[n].value(W.row(n));
    if (v == kNegInf) return kNegInf;
    q += v;
  }
  q += log_prior_w(W, prior_, phi);
  if (!phi.empty())
    for (const auto& beta : phi.beta)
      q += log_prior_beta(beta, prior_.theta);
  return q;
}

SemTraceRow SemEngine::m_step(int iter) {
  build_data_terms_now();

  SemTraceRow row;
  row.iter = iter;
  const bool freezing = opts_.freeze_q_rel > 0.0 && opts_.fixed_iters < 0;
  if (opts_.record_q || freezing) row.q_pre = surrogate(W_, phi_);
  const std::vector<double> w_prev = W_.data();
  const DirichletParams phi_prev = phi_;

  const int L = bank_.L();
  if (prior_.kind == PriorKind::TV || prior_.kind == PriorKind::Lap) {
    const auto result = admm_maximize_Q(data_terms_, prior_, W_, opts_.admm);
    W_ = result.W;
  } else {
    std::vector<double> kappa_beta(L + 1, prior_.kappa);
    parallel_for(static_cast<std::size_t>(scene_.pixels()), [&](std::size_t n) {
      const std::vector<double>& beta =
          prior_.kind == PriorKind::WDirichlet
              ? kappa_beta
              : phi_.beta[prior_.cluster_of(static_cast<int>(n))];
      std::vector<double> w0(W_.row(static_cast<int>(n)),
                             W_.row(static_cast<int>(n)) + L);
      const auto w = newton_maximize_Q_pixel(data_terms_[n], beta, w0,
                                             opts_.newton);
      for (int l = 0; l < L; ++l) W_(static_cast<int>(n), l) = w[l];
    });
  }
  if (opts_.record_q || freezing) row.q_post_w = surrogate(W_, phi_);

  if (!phi_.empty()) {
    for (std::size_t c = 0; c < phi_.beta.size(); ++c)
      phi_.beta[c] = newton_update_beta(W_, cluster_pixels_[c], prior_.theta,
                                        phi_.beta[c]);
  }
  if (opts_.record_q || freezing)
    row.q_post_phi = phi_.empty() ? row.q_post_w : surrogate(W_, phi_);

  if (freezing) {
    const double gain = row.q_post_phi - row.q_pre;
    if (gain < opts_.freeze_q_rel * (1.0 + std::abs(row.q_pre))) {
      std::copy(w_prev.begin(), w_prev.end(), W_.data().begin());
      phi_ = phi_prev;
      row.q_post_w = row.q_post_phi = row.q_pre;
    }
  }
  return row;
}

SemResult run_sem(const SceneCube& scene, const IrfBank& bank,
                  const PriorModel& prior, const SemOptions& opts,
                  const WeightField* W0) {
  SemEngine engine(scene, bank, prior, opts, W0);
  SemResult result;

  if (opts.fixed_iters == 0) {
    result.W = engine.W();
    result.phi = engine.phi();
    result.t_tilde = engine.t_tilde();
    return result;
  }

  const std::size_t NL =
      static_cast<std::size_t>(scene.pixels()) * bank.L();
  std::vector<double> w_prev(NL);
  std::vector<std::vector<double>> tail;
  bool burnin_done = false;

  for (int iter = 1;; ++iter) {
    const auto t0 = std::chrono::steady_clock::now();
    engine.refresh_likelihood();
    engine.sample_t_tilde();
    engine.compute_p_tilde();
    std::copy(engine.W().data().begin(), engine.W().data().end(),
              w_prev.begin());
    SemTraceRow row = engine.m_step(iter);

    double diff_sq = 0.0, prev_sq = 0.0;
    for (std::size_t i = 0; i < NL; ++i) {
      const double d = engine.W().data()[i] - w_prev[i];
      diff_sq += d * d;
      prev_sq += w_prev[i] * w_prev[i];
    }
    row.rel_err = std::sqrt(diff_sq) / std::max(std::sqrt(prev_sq), 1e-300);
    row.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    result.trace.push_back(row);

    if (opts.fixed_iters >= 0) {
      if (iter >= opts.fixed_iters) break;
      continue;
    }

    if (!burnin_done) {
      if (row.rel_err < opts.hyper.d_eps) {
        burnin_done = true;
        result.burnin_converged = true;
        result.burnin_iters = iter;
      } else if (iter >= opts.hyper.burnin_cap) {
        burnin_done = true;  // BurninCapReached: soft warning via the flag
        result.burnin_converged = false;
        result.burnin_iters = iter;
      }
      if (burnin_done && opts.hyper.n_extra == 0) break;
    } else {
      tail.push_back(engine.W().data());
      if (static_cast<int>(tail.size()) >= opts.hyper.n_extra) break;
    }
  }

  result.W = engine.W();
  if (!tail.empty()) {
    auto& avg = result.W.data();
    std::fill(avg.begin(), avg.end(), 0.0);
    for (const auto& w : tail)
      for (std::size_t i = 0; i < NL; ++i) avg[i] += w[i];
    for (std::size_t i = 0; i < NL; ++i) avg[i] /= tail.size();
  }
  result.phi = engine.phi();
  result.t_tilde = engine.t_tilde();
  result.total_iters = static_cast<int>(result.trace.size());
  if (opts.fixed_iters < 0 && result.burnin_iters == 0)
    result.burnin_iters = result.total_iters;
  return result;
}

}  // namespace swmsl
