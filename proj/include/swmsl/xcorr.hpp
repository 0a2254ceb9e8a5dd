#pragma once

#include "swmsl/optimizers.hpp"
#include "swmsl/types.hpp"

namespace swmsl {

/// Matched-filter depth: per pixel, argmax over the admissible window of the
/// correlation between the histogram and the band-summed IRF template. Ties
/// break toward the smaller bin; empty pixels return t_min.
DepthField xcorr_depth(const SceneCube& scene, const IrfBank& bank);

/// Per-pixel maximum-likelihood weights conditioned on t_hat, solved by the
/// pixel Newton routine with a flat 1 + 1e-6 Dirichlet barrier.
WeightField xcorr_weights(const SceneCube& scene, const DepthField& t_hat,
                          const IrfBank& bank, const NewtonConfig& cfg = {});

}  // namespace swmsl
