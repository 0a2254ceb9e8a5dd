#pragma once

#include <cstdint>
#include <vector>

#include "swmsl/types.hpp"

namespace swmsl {

/// Illumination scale and background level for synthetic data. gammaT stores
/// the product gamma*T, so the expected background photons per pixel is
/// alpha*gammaT and the per-bin background rate is alpha*gammaT/T.
struct SimConfig {
  double alpha = 25.0;
  double gammaT = 0.01;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Mixture density of a single photon time of arrival:
///   p(s | w, t) = (1 - sum_l w_l)/T + sum_l w_l g_l(s - t)/G_l.
/// s and t are 0-based bins; t must lie in the admissible window.
double photon_pdf(int s, const double* w, int L, int t, const IrfBank& bank);

/// Signal-photon probabilities from spectral responses and background rate:
///   w_l = r_l G_l / (sum_l r_l G_l + T b).
std::vector<double> weights_from_reflectivity(const double* r, int L, double b,
                                              const IrfBank& bank);

/// Sum over pixels and photons of log photon_pdf; -inf when some photon has
/// zero density under (W, t).
double joint_log_likelihood(const SceneCube& scene, const WeightField& W,
                            const DepthField& t, const IrfBank& bank);

/// Draws per-bin Poisson counts from the dense rate
///   alpha*gammaT/T + sum_l alpha * r_{n,l} g_l(t - t_n),
/// one independent RNG stream per pixel. Deterministic for a fixed seed under
/// any parallel schedule.
SceneCube simulate(const SimConfig& cfg, const GroundTruth& truth,
                   const IrfBank& bank);

/// The alpha-scaled reflectivity/background cube that generated a simulated
/// scene; used as ground truth for error metrics.
ReflectivityCube scaled_truth(const GroundTruth& truth, const SimConfig& cfg,
                              const IrfBank& bank);

/// Mean signal-to-background ratio (1/N) sum_n sum_l r_{n,l} G_l / (T b_n).
double sbr(const ReflectivityCube& R, const IrfBank& bank);

}  // namespace swmsl
