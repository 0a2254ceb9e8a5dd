#include "swmsl/phantom.hpp"

#include <cmath>
#include <vector>

namespace swmsl {

GroundTruth make_phantom(int rows, int cols, int L) {
  if (rows < 2 || cols < 2 || L < 1)
    throw ValidationError("make_phantom: need rows, cols >= 2 and L >= 1");

  GroundTruth truth;
  truth.depth = DepthField(rows, cols, 399);
  truth.refl = ReflectivityCube(rows, cols, L);

  // Band profiles of the two materials (each sums to 1 across bands).
  std::vector<double> bg_profile(L), fg_profile(L);
  if (L == 1) {
    bg_profile[0] = fg_profile[0] = 1.0;
  } else {
    double bg_sum = 0.0, fg_sum = 0.0;
    for (int l = 0; l < L; ++l) {
      bg_profile[l] = 1.0 + l;          // tilted up across bands
      fg_profile[l] = static_cast<double>(L - l);  // tilted down
      bg_sum += bg_profile[l];
      fg_sum += fg_profile[l];
    }
    for (int l = 0; l < L; ++l) {
      bg_profile[l] /= bg_sum;
      fg_profile[l] /= fg_sum;
    }
  }

  // Centered square covering just over a quarter of the image. Each material
  // carries a smooth 15% texture; the sin factor sums to zero over both the
  // full grid and the centered square, so mean signal mass is untouched.
  const int ri0 = (rows * 8) / 32, ri1 = (rows * 24) / 32;
  const int ci0 = (cols * 8) / 32, ci1 = (cols * 24) / 32;
  const double two_pi = 6.283185307179586;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const int n = i * cols + j;
      const bool fg = i >= ri0 && i <= ri1 && j >= ci0 && j <= ci1;
      truth.depth[n] = fg ? 549 : 399;
      const double texture =
          1.0 + 0.15 * std::sin(two_pi * i / rows) * std::cos(two_pi * j / cols);
      const double mass = (fg ? 0.60 : 0.35) * texture;
      for (int l = 0; l < L; ++l)
        truth.refl.r(n, l) = mass * (fg ? fg_profile[l] : bg_profile[l]);
    }
  }
  return truth;
}

IrfBank make_default_irf(int L) {
  if (L < 1) throw ValidationError("make_default_irf: L must be >= 1");
  const int T = 1500;
  const int t_min = 300, t_max = 899;
  const int band_offset = 55;  // wavelength-time coding delay between bands
  const int support = 15 + band_offset * (L - 1) + 65;

  std::vector<std::vector<double>> g(L, std::vector<double>(support, 0.0));
  for (int l = 0; l < L; ++l) {
    const int mode = 15 + band_offset * l;
    double sum = 0.0;
    for (int d = 0; d < support; ++d) {
      const double x = d - mode;
      const double v =
          x < 0.0 ? std::exp(-0.5 * (x / 4.0) * (x / 4.0)) : std::exp(-x / 12.0);
      g[l][d] = v;
      sum += v;
    }
    for (int d = 0; d < support; ++d) g[l][d] /= sum;  // G_l = 1
  }
  return IrfBank::validated(T, t_min, t_max, std::move(g));
}

}  // namespace swmsl
