#pragma once

#include <vector>

#include "swmsl/types.hpp"

namespace swmsl {

struct DenoiseConfig {
  double strength = 1.0;  // TV weight in the variance-stabilized domain
  int iters = 100;        // dual iterations of the TV solver
};

/// Poisson denoiser: Anscombe transform 2*sqrt(x + 3/8), TV-regularized
/// Gaussian denoising at unit noise level, and the closed-form inverse
/// (y/2)^2 - 3/8 clamped at 0. Pluggable stand-in behind an image-in/
/// image-out interface.
std::vector<double> denoise_counts(const std::vector<double>& ybar, int rows,
                                   int cols, const DenoiseConfig& cfg = {});

/// Reflectivity recovery r_hat[n][l] = w_hat[n][l] * y_hat[n] / G_l, plus the
/// background complement b_hat[n] = (1 - sum_l w_hat[n][l]) * y_hat[n] / T.
ReflectivityCube estimate_reflectivity(const WeightField& W_hat,
                                       const std::vector<double>& y_hat,
                                       const IrfBank& bank);

/// (1/N) sum_n ||r_n - r_hat_n||^2 over the spectral responses.
double reflectivity_mse(const ReflectivityCube& a, const ReflectivityCube& b);

}  // namespace swmsl
