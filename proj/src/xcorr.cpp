#include "swmsl/xcorr.hpp"

#include <algorithm>
#include <vector>

#include "swmsl/parallel.hpp"

namespace swmsl {

DepthField xcorr_depth(const SceneCube& scene, const IrfBank& bank) {
  const int t_lo = bank.t_min(), t_hi = bank.t_max();
  const int K = bank.depth_bins();
  const int S = bank.support();
  DepthField t(scene.rows(), scene.cols(), t_lo);
  parallel_for(static_cast<std::size_t>(scene.pixels()), [&](std::size_t n) {
    std::vector<double> corr(K, 0.0);
    for (const auto& p : scene.photons(static_cast<int>(n))) {
      const int d_lo = std::max(0, p.bin - t_hi);
      const int d_hi = std::min(S - 1, p.bin - t_lo);
      for (int d = d_lo; d <= d_hi; ++d)
        corr[p.bin - d - t_lo] += p.count * bank.template_sum(d);
    }
    int best = 0;
    for (int k = 1; k < K; ++k)
      if (corr[k] > corr[best]) best = k;
    t[static_cast<int>(n)] = t_lo + best;
  });
  return t;
}

WeightField xcorr_weights(const SceneCube& scene, const DepthField& t_hat,
                          const IrfBank& bank, const NewtonConfig& cfg) {
  if (t_hat.pixels() != scene.pixels())
    throw ValidationError("xcorr_weights: depth field size mismatch");
  t_hat.check_range(bank.t_min(), bank.t_max());
  const int L = bank.L();
  const int K = bank.depth_bins();
  WeightField W(scene.rows(), scene.cols(), L, 0.5 / (L + 1));
  const std::vector<double> flat_beta(L + 1, 1.0 + 1e-6);
  parallel_for(static_cast<std::size_t>(scene.pixels()), [&](std::size_t n) {
    std::vector<double> one_hot(K, 0.0);
    one_hot[t_hat[static_cast<int>(n)] - bank.t_min()] = 1.0;
    const PixelDataTerm data =
        build_data_term(scene, static_cast<int>(n), one_hot.data(), bank);
    std::vector<double> w0(W.row(static_cast<int>(n)),
                           W.row(static_cast<int>(n)) + L);
    const auto w = newton_maximize_Q_pixel(data, flat_beta, w0, cfg);
    for (int l = 0; l < L; ++l) W(static_cast<int>(n), l) = w[l];
  });
  return W;
}

}  // namespace swmsl
