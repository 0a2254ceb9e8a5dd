#include "swmsl/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace swmsl {

IrfBank IrfBank::validated(int T, int t_min, int t_max,
                           std::vector<std::vector<double>> g) {
  if (g.empty()) throw ValidationError("IrfBank: no bands");
  const int support = static_cast<int>(g[0].size());
  if (support < 1) throw ValidationError("IrfBank: empty IRF support");
  for (const auto& band : g)
    if (static_cast<int>(band.size()) != support)
      throw ValidationError("IrfBank: bands differ in support length");
  if (!(0 < t_min && t_min < t_max && t_max < T - 1)) {
    std::ostringstream msg;
    msg << "IrfBank: admissible window must satisfy 0 < t_min < t_max < T-1 "
        << "(0-based), got t_min=" << t_min << " t_max=" << t_max << " T=" << T;
    throw ValidationError(msg.str());
  }

  IrfBank bank;
  bank.T_ = T;
  bank.t_min_ = t_min;
  bank.t_max_ = t_max;
  bank.support_ = support;
  bank.g_ = std::move(g);
  bank.G_.resize(bank.L());
  bank.a_.resize(bank.L());
  bank.tmpl_.assign(support, 0.0);

  for (int l = 0; l < bank.L(); ++l) {
    double G = 0.0;
    for (int d = 0; d < support; ++d) {
      const double v = bank.g_[l][d];
      if (!(v >= 0.0)) {
        std::ostringstream msg;
        msg << "NegativeIrfValue: g[" << l << "][" << d << "] = " << v;
        throw ValidationError(msg.str());
      }
      G += v;
    }
    if (!(G > 0.0))
      throw ValidationError("IrfBank: zero integral in band " + std::to_string(l));
    bank.G_[l] = G;
    bank.a_[l].resize(support);
    for (int d = 0; d < support; ++d) {
      bank.a_[l][d] = bank.g_[l][d] / G;
      bank.tmpl_[d] += bank.g_[l][d];
    }
  }

  // Constant-integral condition: the shifted IRF must lie fully inside the
  // histogram window for every admissible shift. Summation order matches the
  // computation of G, so uncropped shifts compare equal exactly.
  for (int l = 0; l < bank.L(); ++l) {
    for (int k = t_min; k <= t_max; ++k) {
      double s = 0.0;
      for (int d = 0; d < support; ++d) {
        const int t = k + d;
        if (t >= 0 && t < T) s += bank.g_[l][d];
      }
      if (s != bank.G_[l]) {
        std::ostringstream msg;
        msg << "NonconstantIntegral: band " << l << " cropped at shift t="
            << k + 1 << " (1-based); sum " << s << " != G " << bank.G_[l];
        throw ValidationError(msg.str());
      }
    }
  }
  return bank;
}

SceneCube SceneCube::from_dense(int rows, int cols, int T,
                                const std::vector<std::uint32_t>& counts) {
  if (rows < 1 || cols < 1 || T < 1)
    throw ValidationError("SceneCube: nonpositive dimensions");
  const std::size_t expected = static_cast<std::size_t>(rows) * cols * T;
  if (counts.size() != expected)
    throw ValidationError("SceneCube: dense buffer size mismatch");

  SceneCube scene(rows, cols, T);
  for (int n = 0; n < rows * cols; ++n) {
    const std::uint32_t* y = counts.data() + static_cast<std::size_t>(n) * T;
    long long total = 0;
    for (int t = 0; t < T; ++t) {
      if (y[t] == 0) continue;
      if (y[t] > static_cast<std::uint32_t>(std::numeric_limits<int>::max()))
        throw ValidationError("CountOverflow: bin count exceeds int range");
      scene.pixels_[n].push_back({t, static_cast<int>(y[t])});
      total += y[t];
    }
    scene.ybar_[n] = total;
  }
  return scene;
}

SceneCube SceneCube::from_toa_lists(int rows, int cols, int T,
                                    std::vector<std::vector<PhotonBin>> lists) {
  if (rows < 1 || cols < 1 || T < 1)
    throw ValidationError("SceneCube: nonpositive dimensions");
  if (lists.size() != static_cast<std::size_t>(rows) * cols)
    throw ValidationError("SceneCube: list count mismatch");

  SceneCube scene(rows, cols, T);
  for (int n = 0; n < rows * cols; ++n) {
    auto& list = lists[n];
    std::sort(list.begin(), list.end(),
              [](const PhotonBin& a, const PhotonBin& b) { return a.bin < b.bin; });
    long long total = 0;
    for (const auto& p : list) {
      if (p.bin < 0 || p.bin >= T) {
        std::ostringstream msg;
        msg << "BinOutOfRange: pixel " << n << " bin " << p.bin + 1
            << " outside [1," << T << "]";
        throw ValidationError(msg.str());
      }
      if (p.count < 0) throw ValidationError("SceneCube: negative multiplicity");
      if (p.count == 0) continue;
      auto& px = scene.pixels_[n];
      if (!px.empty() && px.back().bin == p.bin) {
        const long long merged = static_cast<long long>(px.back().count) + p.count;
        if (merged > std::numeric_limits<int>::max())
          throw ValidationError("CountOverflow: merged bin count exceeds int range");
        px.back().count = static_cast<int>(merged);
      } else {
        px.push_back(p);
      }
      total += p.count;
    }
    scene.ybar_[n] = total;
  }
  return scene;
}

long long SceneCube::total_counts() const {
  return std::accumulate(ybar_.begin(), ybar_.end(), 0LL);
}

std::vector<std::uint32_t> SceneCube::to_dense() const {
  std::vector<std::uint32_t> out(static_cast<std::size_t>(pixels()) * T_, 0u);
  for (int n = 0; n < pixels(); ++n)
    for (const auto& p : pixels_[n])
      out[static_cast<std::size_t>(n) * T_ + p.bin] = static_cast<std::uint32_t>(p.count);
  return out;
}

double WeightField::background(int n) const {
  double s = 0.0;
  for (int l = 0; l < L_; ++l) s += (*this)(n, l);
  return 1.0 - s;
}

bool WeightField::in_simplex(double tol) const {
  for (int n = 0; n < pixels(); ++n) {
    double s = 0.0;
    for (int l = 0; l < L_; ++l) {
      const double v = (*this)(n, l);
      if (!(v >= -tol)) return false;
      s += v;
    }
    if (!(s <= 1.0 + tol)) return false;
  }
  return true;
}

void WeightField::check_simplex(double tol) const {
  if (!in_simplex(tol))
    throw ValidationError("OutsideSimplex: weight row leaves S_L");
}

void DepthField::check_range(int t_min, int t_max) const {
  for (int n = 0; n < pixels(); ++n)
    if (t_[n] < t_min || t_[n] > t_max) {
      std::ostringstream msg;
      msg << "DepthField: t[" << n << "] = " << t_[n] + 1
          << " outside admissible window [" << t_min + 1 << "," << t_max + 1
          << "] (1-based)";
      throw ValidationError(msg.str());
    }
}

void ReflectivityCube::check_nonnegative() const {
  for (double v : r_)
    if (!(v >= 0.0)) throw ValidationError("ReflectivityCube: negative spectral response");
  for (double v : b_)
    if (!(v >= 0.0)) throw ValidationError("ReflectivityCube: negative background rate");
}

void HyperParams::validate() const {
  if (!(lambda >= 0.0)) throw ValidationError("HyperParams: lambda must be >= 0");
  if (!(epsilon >= 0.0)) throw ValidationError("HyperParams: epsilon must be >= 0");
  if (!(kappa > 1.0)) throw ValidationError("HyperParams: kappa must be > 1");
  if (!(theta > 0.0)) throw ValidationError("HyperParams: theta must be > 0");
  if (!(beta_init > 1.0)) throw ValidationError("HyperParams: beta_init must be > 1");
  if (!(d_eps > 0.0)) throw ValidationError("HyperParams: d_eps must be > 0");
  if (n_extra < 0) throw ValidationError("HyperParams: n_extra must be >= 0");
  if (clusters < 1) throw ValidationError("HyperParams: clusters must be >= 1");
  if (patch < 1 || patch % 2 == 0)
    throw ValidationError("HyperParams: patch side must be odd and >= 1");
  if (gibbs_iters <= gibbs_burnin)
    throw ValidationError("HyperParams: gibbs_iters must exceed gibbs_burnin");
  if (e_step_sweeps < 1) throw ValidationError("HyperParams: e_step_sweeps must be >= 1");
}

}  // namespace swmsl
