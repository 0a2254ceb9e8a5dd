#include "swmsl/depth.hpp"

#include <algorithm>
#include <cmath>

#include "swmsl/parallel.hpp"
#include "swmsl/rng.hpp"

namespace swmsl {

namespace {
constexpr std::uint64_t kDepthTag = 0x4445505448474942ULL;
}

DepthEstimate estimate_depth(const SceneCube& scene, const IrfBank& bank,
                             const WeightField& W_hat, double epsilon,
                             int iters, int burnin, std::uint64_t seed) {
  if (iters <= burnin || burnin < 0)
    throw ValidationError("estimate_depth: need iters > burnin >= 0");
  W_hat.check_simplex();
  if (W_hat.pixels() != scene.pixels())
    throw ValidationError("estimate_depth: weight field size mismatch");

  const LikelihoodTable table = build_likelihood_table(scene, bank, W_hat);
  const int N = scene.pixels();
  const int K = table.K;

  // Hot start at the per-pixel likelihood mode.
  DepthField t(scene.rows(), scene.cols(), table.t_lo);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t n) {
    const double* row = table.row(static_cast<int>(n));
    int best = 0;
    for (int k = 1; k < K; ++k)
      if (row[k] > row[best]) best = k;
    t[static_cast<int>(n)] = table.t_lo + best;
  });

  std::vector<std::uint32_t> hist(static_cast<std::size_t>(N) * K, 0u);
  for (int it = 0; it < iters; ++it) {
    gibbs_sweep(table, t, epsilon,
                mix64(seed, kDepthTag, static_cast<std::uint64_t>(it)), 0);
    if (it >= burnin)
      for (int n = 0; n < N; ++n)
        ++hist[static_cast<std::size_t>(n) * K + (t[n] - table.t_lo)];
  }

  DepthEstimate est;
  est.t_lo = table.t_lo;
  est.K = K;
  est.depth = DepthField(scene.rows(), scene.cols(), table.t_lo);
  est.marginal.assign(static_cast<std::size_t>(N) * K, 0.0);
  est.entropy.assign(N, 0.0);
  const double retained = iters - burnin;
  for (int n = 0; n < N; ++n) {
    const std::uint32_t* h = hist.data() + static_cast<std::size_t>(n) * K;
    int mode = 0;
    double ent = 0.0;
    for (int k = 0; k < K; ++k) {
      if (h[k] > h[mode]) mode = k;
      const double p = h[k] / retained;
      est.marginal[static_cast<std::size_t>(n) * K + k] = p;
      if (p > 0.0) ent -= p * std::log(p);
    }
    est.depth[n] = table.t_lo + mode;
    est.entropy[n] = ent;
  }
  return est;
}

CdfTable depth_error_cdf(const DepthField& t_hat, const DepthField& t_truth) {
  if (t_hat.pixels() != t_truth.pixels() || t_hat.rows() != t_truth.rows())
    throw ValidationError("SizeMismatch: depth fields differ in shape");
  const int N = t_hat.pixels();
  if (N == 0) throw ValidationError("depth_error_cdf: empty fields");
  int max_err = 0;
  std::vector<int> errors(N);
  for (int n = 0; n < N; ++n) {
    errors[n] = std::abs(t_hat[n] - t_truth[n]);
    max_err = std::max(max_err, errors[n]);
  }
  std::vector<int> counts(max_err + 1, 0);
  for (int e : errors) ++counts[e];
  CdfTable table;
  table.threshold.resize(max_err + 1);
  table.fraction.resize(max_err + 1);
  long long cum = 0;
  for (int e = 0; e <= max_err; ++e) {
    cum += counts[e];
    table.threshold[e] = e;
    table.fraction[e] = static_cast<double>(cum) / N;
  }
  return table;
}

}  // namespace swmsl
