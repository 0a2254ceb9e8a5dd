#include "swmsl/forward_model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "swmsl/parallel.hpp"
#include "swmsl/rng.hpp"

namespace swmsl {

void SimConfig::validate() const {
  if (!(alpha > 0.0)) throw ValidationError("SimConfig: alpha must be > 0");
  if (!(gammaT >= 0.0)) throw ValidationError("SimConfig: gammaT must be >= 0");
}

double photon_pdf(int s, const double* w, int L, int t, const IrfBank& bank) {
  if (s < 0 || s >= bank.T()) {
    std::ostringstream msg;
    msg << "OutOfRangeBin: s = " << s + 1 << " outside [1," << bank.T() << "]";
    throw ValidationError(msg.str());
  }
  if (t < bank.t_min() || t > bank.t_max()) {
    std::ostringstream msg;
    msg << "OutOfRangeBin: t = " << t + 1 << " outside admissible window ["
        << bank.t_min() + 1 << "," << bank.t_max() + 1 << "]";
    throw ValidationError(msg.str());
  }
  double sum_w = 0.0;
  double signal = 0.0;
  const int d = s - t;
  for (int l = 0; l < L; ++l) {
    sum_w += w[l];
    signal += w[l] * bank.a(l, d);
  }
  return (1.0 - sum_w) / bank.T() + signal;
}

std::vector<double> weights_from_reflectivity(const double* r, int L, double b,
                                              const IrfBank& bank) {
  double mass = 0.0;
  for (int l = 0; l < L; ++l) {
    if (!(r[l] >= 0.0)) throw ValidationError("weights_from_reflectivity: negative r");
    mass += r[l] * bank.G(l);
  }
  if (!(b >= 0.0)) throw ValidationError("weights_from_reflectivity: negative b");
  const double denom = mass + bank.T() * b;
  if (denom <= 0.0)
    throw ValidationError("AllZeroSignal: r = 0 and b = 0 leave no photon source");
  std::vector<double> w(L);
  for (int l = 0; l < L; ++l) w[l] = r[l] * bank.G(l) / denom;
  return w;
}

double joint_log_likelihood(const SceneCube& scene, const WeightField& W,
                            const DepthField& t, const IrfBank& bank) {
  if (scene.pixels() != W.pixels() || scene.pixels() != t.pixels())
    throw ValidationError("joint_log_likelihood: pixel count mismatch");
  W.check_simplex();
  t.check_range(bank.t_min(), bank.t_max());
  double total = 0.0;
  for (int n = 0; n < scene.pixels(); ++n) {
    for (const auto& p : scene.photons(n)) {
      const double f = photon_pdf(p.bin, W.row(n), W.L(), t[n], bank);
      if (f <= 0.0) return -std::numeric_limits<double>::infinity();
      total += p.count * std::log(f);
    }
  }
  return total;
}

SceneCube simulate(const SimConfig& cfg, const GroundTruth& truth,
                   const IrfBank& bank) {
  cfg.validate();
  const int N = truth.depth.pixels();
  const int L = truth.refl.L();
  if (truth.refl.pixels() != N)
    throw ValidationError("simulate: truth profiles size mismatch");
  truth.depth.check_range(bank.t_min(), bank.t_max());
  truth.refl.check_nonnegative();

  const int T = bank.T();
  const double bg_rate = cfg.alpha * cfg.gammaT / T;
  const double p_no_bg = std::exp(-bg_rate);

  std::vector<std::vector<PhotonBin>> lists(N);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t n) {
    Rng rng(mix64(cfg.seed, static_cast<std::uint64_t>(n)));
    auto& list = lists[n];
    const int tn = truth.depth[static_cast<int>(n)];
    const int sig_lo = tn;
    const int sig_hi = std::min(T - 1, tn + bank.support() - 1);
    for (int t = 0; t < T; ++t) {
      double rate = bg_rate;
      if (t >= sig_lo && t <= sig_hi) {
        const int d = t - tn;
        for (int l = 0; l < L; ++l)
          rate += cfg.alpha * truth.refl.r(static_cast<int>(n), l) * bank.g(l, d);
      } else if (bg_rate <= 0.0) {
        continue;
      } else {
        // Background-only bin: one uniform decides "zero photons" cheaply.
        if (rng.next_unit() < p_no_bg) continue;
        // Rare branch: redraw the full conditional count (>= 1).
        long long c = 0;
        while (c == 0) c = rng.poisson(bg_rate);
        list.push_back({t, static_cast<int>(c)});
        continue;
      }
      const long long c = rng.poisson(rate);
      if (c > 0) list.push_back({t, static_cast<int>(c)});
    }
  });
  return SceneCube::from_toa_lists(truth.depth.rows(), truth.depth.cols(), T,
                                   std::move(lists));
}

ReflectivityCube scaled_truth(const GroundTruth& truth, const SimConfig& cfg,
                              const IrfBank& bank) {
  ReflectivityCube out(truth.refl.rows(), truth.refl.cols(), truth.refl.L());
  for (int n = 0; n < out.pixels(); ++n) {
    for (int l = 0; l < out.L(); ++l)
      out.r(n, l) = cfg.alpha * truth.refl.r(n, l);
    out.b(n) = cfg.alpha * cfg.gammaT / bank.T();
  }
  return out;
}

double sbr(const ReflectivityCube& R, const IrfBank& bank) {
  double total = 0.0;
  for (int n = 0; n < R.pixels(); ++n) {
    if (!(R.b(n) > 0.0))
      throw ValidationError("ZeroBackground: SBR undefined with b_n = 0");
    double mass = 0.0;
    for (int l = 0; l < R.L(); ++l) mass += R.r(n, l) * bank.G(l);
    total += mass / (bank.T() * R.b(n));
  }
  return total / R.pixels();
}

}  // namespace swmsl
