#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "swmsl/errors.hpp"

namespace swmsl {

/// Per-wavelength impulse responses with their integrals and the admissible
/// depth window. Bins are 0-based internally; file formats are 1-based.
/// g_l(d) is stored for lags d in [0, support).
class IrfBank {
 public:
  /// Builds a bank and enforces the invariants: nonnegative IRF values,
  /// positive integrals, 0 < t_min < t_max < T-1 (0-based), and constancy of
  /// the shifted-IRF sums over every admissible shift.
  static IrfBank validated(int T, int t_min, int t_max,
                           std::vector<std::vector<double>> g);

  int L() const { return static_cast<int>(g_.size()); }
  int T() const { return T_; }
  int t_min() const { return t_min_; }
  int t_max() const { return t_max_; }
  int support() const { return support_; }
  /// Number of admissible depth bins, K = t_max - t_min + 1.
  int depth_bins() const { return t_max_ - t_min_ + 1; }

  double g(int l, int d) const { return g_[l][d]; }
  double G(int l) const { return G_[l]; }
  /// Normalized response a_l(d) = g_l(d) / G_l; 0 outside [0, support).
  double a(int l, int d) const {
    return (d >= 0 && d < support_) ? a_[l][d] : 0.0;
  }
  /// Summed template over bands, used by the cross-correlation baseline.
  double template_sum(int d) const {
    return (d >= 0 && d < support_) ? tmpl_[d] : 0.0;
  }

  const std::vector<double>& band(int l) const { return g_[l]; }

 private:
  IrfBank() = default;
  int T_ = 0, t_min_ = 0, t_max_ = 0, support_ = 0;
  std::vector<std::vector<double>> g_, a_;
  std::vector<double> G_, tmpl_;
};

/// A bin with a photon multiplicity; ToA lists are run-length compressed.
struct PhotonBin {
  int bin = 0;
  int count = 0;
};

/// Per-pixel photon time-of-arrival lists for an image of histograms.
/// The sparse representation is canonical; dense histograms are derived.
class SceneCube {
 public:
  static SceneCube from_dense(int rows, int cols, int T,
                              const std::vector<std::uint32_t>& counts);
  /// lists[n] holds (bin, count) pairs in any order; merged and validated.
  static SceneCube from_toa_lists(int rows, int cols, int T,
                                  std::vector<std::vector<PhotonBin>> lists);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int pixels() const { return rows_ * cols_; }
  int T() const { return T_; }

  const std::vector<PhotonBin>& photons(int n) const { return pixels_[n]; }
  long long ybar(int n) const { return ybar_[n]; }
  long long total_counts() const;

  /// Dense row-major histograms (pixels x T).
  std::vector<std::uint32_t> to_dense() const;

 private:
  SceneCube(int rows, int cols, int T)
      : rows_(rows), cols_(cols), T_(T), pixels_(rows * cols),
        ybar_(rows * cols, 0) {}
  int rows_, cols_, T_;
  std::vector<std::vector<PhotonBin>> pixels_;  // sorted by bin
  std::vector<long long> ybar_;
};

/// N x L matrix of per-pixel signal-photon probabilities; each row must lie
/// in the simplex S_L = {w >= 0, sum(w) <= 1}. Background weight is implicit.
class WeightField {
 public:
  WeightField() = default;
  WeightField(int rows, int cols, int L, double fill = 0.0)
      : rows_(rows), cols_(cols), L_(L),
        w_(static_cast<std::size_t>(rows) * cols * L, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int pixels() const { return rows_ * cols_; }
  int L() const { return L_; }

  double operator()(int n, int l) const { return w_[idx(n, l)]; }
  double& operator()(int n, int l) { return w_[idx(n, l)]; }
  const double* row(int n) const { return w_.data() + idx(n, 0); }
  double* row(int n) { return w_.data() + idx(n, 0); }
  const std::vector<double>& data() const { return w_; }
  std::vector<double>& data() { return w_; }

  double background(int n) const;
  bool in_simplex(double tol = 0.0) const;
  /// Throws ValidationError("OutsideSimplex ...") when some row leaves S_L.
  void check_simplex(double tol = 1e-12) const;

 private:
  std::size_t idx(int n, int l) const {
    return static_cast<std::size_t>(n) * L_ + l;
  }
  int rows_ = 0, cols_ = 0, L_ = 0;
  std::vector<double> w_;
};

/// Per-pixel discrete ToF bin indices.
class DepthField {
 public:
  DepthField() = default;
  DepthField(int rows, int cols, int fill = 0)
      : rows_(rows), cols_(cols), t_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int pixels() const { return rows_ * cols_; }
  int operator[](int n) const { return t_[n]; }
  int& operator[](int n) { return t_[n]; }
  const std::vector<int>& data() const { return t_; }
  std::vector<int>& data() { return t_; }

  /// Throws when some t_n falls outside [t_min, t_max].
  void check_range(int t_min, int t_max) const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<int> t_;
};

/// Nonnegative spectral responses r[n][l] and per-bin background rates b[n].
class ReflectivityCube {
 public:
  ReflectivityCube() = default;
  ReflectivityCube(int rows, int cols, int L)
      : rows_(rows), cols_(cols), L_(L),
        r_(static_cast<std::size_t>(rows) * cols * L, 0.0),
        b_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int pixels() const { return rows_ * cols_; }
  int L() const { return L_; }

  double r(int n, int l) const { return r_[static_cast<std::size_t>(n) * L_ + l]; }
  double& r(int n, int l) { return r_[static_cast<std::size_t>(n) * L_ + l]; }
  const double* r_row(int n) const { return r_.data() + static_cast<std::size_t>(n) * L_; }
  double b(int n) const { return b_[n]; }
  double& b(int n) { return b_[n]; }
  const std::vector<double>& r_data() const { return r_; }
  const std::vector<double>& b_data() const { return b_; }
  std::vector<double>& r_data() { return r_; }
  std::vector<double>& b_data() { return b_; }

  void check_nonnegative() const;

 private:
  int rows_ = 0, cols_ = 0, L_ = 0;
  std::vector<double> r_, b_;
};

/// Ground truth for simulation: depth map plus unscaled reference spectral
/// responses (one scene file serves the whole illumination grid).
struct GroundTruth {
  DepthField depth;
  ReflectivityCube refl;
};

/// Fixed and estimated hyperparameters of the pipeline.
struct HyperParams {
  double lambda = 10.0;      // MRF strength
  double epsilon = 0.05;     // depth TV strength
  double kappa = 1.01;       // fixed Dirichlet parameter (W-Dirichlet)
  double theta = 0.25;       // exponential hyperprior rate
  double d_eps = 1e-10;      // burn-in stopping threshold
  int n_extra = 5;           // post-burn-in iterations (N_iter - N_bi)
  int burnin_cap = 50;       // hard cap on burn-in iterations
  int clusters = 7;          // C, cluster count for C-Dirichlet
  int patch = 3;             // patch side N_p (odd)
  int gibbs_iters = 300;     // final depth sampler iterations
  int gibbs_burnin = 50;     // final depth sampler burn-in
  int e_step_sweeps = 2;     // Gibbs passes per E-step
  int coarse_iters = 3;      // W-Dirichlet iterations before clustering
  double beta_init = 2.0;    // initial Dirichlet parameters for G-/C-Dirichlet

  void validate() const;
};

}  // namespace swmsl
