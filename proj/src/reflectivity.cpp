#include "swmsl/reflectivity.hpp"

#include <algorithm>
#include <cmath>

#include "swmsl/optimizers.hpp"

namespace swmsl {

std::vector<double> denoise_counts(const std::vector<double>& ybar, int rows,
                                   int cols, const DenoiseConfig& cfg) {
  const int N = rows * cols;
  if (static_cast<int>(ybar.size()) != N)
    throw ValidationError("denoise_counts: image size mismatch");
  std::vector<double> z(N), out(N);
  for (int n = 0; n < N; ++n) {
    if (!(ybar[n] >= 0.0))
      throw ValidationError("denoise_counts: negative count");
    z[n] = 2.0 * std::sqrt(ybar[n] + 0.375);
  }
  tv_prox(z.data(), rows, cols, cfg.strength, cfg.iters, out.data());
  for (int n = 0; n < N; ++n) {
    const double half = out[n] / 2.0;
    out[n] = std::max(half * half - 0.375, 0.0);
  }
  return out;
}

ReflectivityCube estimate_reflectivity(const WeightField& W_hat,
                                       const std::vector<double>& y_hat,
                                       const IrfBank& bank) {
  W_hat.check_simplex();
  if (static_cast<int>(y_hat.size()) != W_hat.pixels())
    throw ValidationError("estimate_reflectivity: y_hat size mismatch");
  const int L = W_hat.L();
  ReflectivityCube cube(W_hat.rows(), W_hat.cols(), L);
  for (int n = 0; n < W_hat.pixels(); ++n) {
    if (!(y_hat[n] >= 0.0))
      throw ValidationError("estimate_reflectivity: negative y_hat");
    double sum_w = 0.0;
    for (int l = 0; l < L; ++l) {
      cube.r(n, l) = W_hat(n, l) * y_hat[n] / bank.G(l);
      sum_w += W_hat(n, l);
    }
    cube.b(n) = std::max(1.0 - sum_w, 0.0) * y_hat[n] / bank.T();
  }
  return cube;
}

double reflectivity_mse(const ReflectivityCube& a, const ReflectivityCube& b) {
  if (a.pixels() != b.pixels() || a.L() != b.L() || a.rows() != b.rows())
    throw ValidationError("SizeMismatch: reflectivity cubes differ in shape");
  double total = 0.0;
  for (int n = 0; n < a.pixels(); ++n)
    for (int l = 0; l < a.L(); ++l) {
      const double d = a.r(n, l) - b.r(n, l);
      total += d * d;
    }
  return total / a.pixels();
}

}  // namespace swmsl
