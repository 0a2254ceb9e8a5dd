#pragma once

#include <cstdint>
#include <vector>

#include "swmsl/sem.hpp"
#include "swmsl/types.hpp"

namespace swmsl {

struct DepthEstimate {
  DepthField depth;              // per-pixel marginal mode
  std::vector<double> marginal;  // N x K empirical marginals
  std::vector<double> entropy;   // per-pixel marginal entropy (nats)
  int t_lo = 0;
  int K = 0;
};

/// Marginal-MMAP depth from p(t | W_hat, S): checkerboard Gibbs with
/// `iters` sweeps, the first `burnin` discarded; each pixel's estimate is the
/// mode of its retained samples (ties toward the smaller bin).
DepthEstimate estimate_depth(const SceneCube& scene, const IrfBank& bank,
                             const WeightField& W_hat, double epsilon,
                             int iters, int burnin, std::uint64_t seed);

struct CdfTable {
  std::vector<int> threshold;    // error thresholds in bins, ascending
  std::vector<double> fraction;  // fraction of pixels with |error| <= threshold
};

/// Cumulative distribution of absolute depth errors |t_n - t_hat_n|.
CdfTable depth_error_cdf(const DepthField& t_hat, const DepthField& t_truth);

}  // namespace swmsl
