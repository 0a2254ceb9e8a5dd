#pragma once

#include <cmath>
#include <vector>

#include "swmsl/forward_model.hpp"
#include "swmsl/rng.hpp"
#include "swmsl/types.hpp"

namespace swmsl::test {

/// Small bank with a triangular 5-bin IRF per band, unit integral, T = 64.
inline IrfBank small_bank(int L = 1, int T = 64, int t_min = 8, int t_max = 48) {
  std::vector<std::vector<double>> g(L, std::vector<double>(5 + 3 * (L - 1), 0.0));
  for (int l = 0; l < L; ++l) {
    const double shape[5] = {1.0, 3.0, 5.0, 3.0, 1.0};
    for (int d = 0; d < 5; ++d) g[l][3 * l + d] = shape[d] / 13.0;
  }
  return IrfBank::validated(T, t_min, t_max, std::move(g));
}

/// Delta IRF at lag 0 (support 1); noiseless depth testing.
inline IrfBank delta_bank(int T = 32, int t_min = 4, int t_max = 27) {
  return IrfBank::validated(T, t_min, t_max, {{1.0}});
}

/// Random interior simplex point; every augmented coordinate (each w_l and
/// the background complement) is at least `margin`.
inline std::vector<double> random_interior(Rng& rng, int L, double margin = 0.05) {
  std::vector<double> w(L);
  double total = 0.0;
  for (int l = 0; l < L; ++l) {
    w[l] = 0.05 + rng.next_unit();
    total += w[l];
  }
  const double budget = 1.0 - margin * (L + 1);
  const double scale = budget * rng.next_unit() / total;
  for (int l = 0; l < L; ++l) w[l] = margin + w[l] * scale;
  return w;
}

/// Scene with a single pixel holding the given (bin, count) pairs.
inline SceneCube one_pixel_scene(int T, std::vector<PhotonBin> photons) {
  return SceneCube::from_toa_lists(1, 1, T, {std::move(photons)});
}

/// Draws photons for one pixel from the mixture model at (w, t).
inline std::vector<PhotonBin> draw_photons(Rng& rng, const IrfBank& bank,
                                           const std::vector<double>& w, int t,
                                           int count) {
  std::vector<int> counts(bank.T(), 0);
  double sum_w = 0.0;
  for (double v : w) sum_w += v;
  for (int p = 0; p < count; ++p) {
    const double u = rng.next_unit();
    if (u < 1.0 - sum_w) {
      counts[static_cast<int>(rng.next_unit() * bank.T())]++;
      continue;
    }
    // Pick the band, then a lag from its normalized response.
    double acc = (1.0 - sum_w);
    int band = 0;
    for (int l = 0; l < static_cast<int>(w.size()); ++l) {
      acc += w[l];
      if (u < acc) {
        band = l;
        break;
      }
      band = l;
    }
    const double v = rng.next_unit();
    double cum = 0.0;
    int lag = 0;
    for (int d = 0; d < bank.support(); ++d) {
      cum += bank.a(band, d);
      if (v < cum) {
        lag = d;
        break;
      }
      lag = d;
    }
    counts[t + lag]++;
  }
  std::vector<PhotonBin> photons;
  for (int bin = 0; bin < bank.T(); ++bin)
    if (counts[bin] > 0) photons.push_back({bin, counts[bin]});
  return photons;
}

}  // namespace swmsl::test
