#pragma once

#include <vector>

#include "swmsl/priors.hpp"
#include "swmsl/types.hpp"

namespace swmsl {

struct AdmmConfig {
  double rho = 1.0;
  int max_iters = 200;
  double tol_abs = 1e-5;      // Boyd-style absolute tolerance
  double tol_rel = 1e-5;      // Boyd-style relative tolerance
  int tv_prox_iters = 20;     // dual iterations per TV prox call
  double lap_cg_tol = 1e-8;   // CG tolerance for the Laplacian prox
  int u_newton_iters = 50;    // inner cap for the per-pixel data solves

  void validate() const;
};

struct NewtonConfig {
  int max_iters = 100;
  double grad_tol = 1e-8;     // infinity norm of the gradient
  double backtrack = 0.5;     // step shrink factor
  int max_backtracks = 50;

  void validate() const;
};

/// Euclidean projection onto S_L = {x >= 0, sum(x) <= 1}.
std::vector<double> project_simplex_leq(std::vector<double> x);

/// One pixel's contribution to Q~2, aggregated over photon/candidate pairs
/// that share an IRF lag:
///   Q2_n(w) = u_bg log c0(w) + sum_j u_j log(c0(w) + a_j . w),
/// with c0(w) = (1 - sum w)/T. Concave on its open domain.
struct PixelDataTerm {
  int L = 0;
  double T = 1.0;
  double u_bg = 0.0;
  std::vector<double> weight;  // u_j >= 0
  std::vector<double> feat;    // J x L, row j = a_j

  int terms() const { return static_cast<int>(weight.size()); }
  /// Q2_n(w); -inf outside the domain.
  double value(const double* w) const;
  /// Adds the gradient into grad (length L). Requires interior w.
  void accumulate_gradient(const double* w, double* grad) const;
  /// Adds the Hessian into hess (L x L row-major). Requires interior w.
  void accumulate_hessian(const double* w, double* hess) const;
};

/// Builds the data term of pixel n from its p~ row (length K over
/// [t_min, t_max]).
PixelDataTerm build_data_term(const SceneCube& scene, int n,
                              const double* p_tilde_row, const IrfBank& bank);

/// Builds all pixel data terms in parallel.
std::vector<PixelDataTerm> build_data_terms(const SceneCube& scene,
                                            const std::vector<double>& p_tilde,
                                            const IrfBank& bank);

/// Maximizes Q2_n(w) + sum_l (beta_l - 1) log w_l + (beta_{L+1} - 1) log(1 - sum w)
/// over the open simplex by damped Newton with backtracking. beta has L+1
/// entries >= 1; entries > 1 make the objective strictly concave with an
/// interior maximizer. Returns w0 unchanged when it is already stationary.
std::vector<double> newton_maximize_Q_pixel(const PixelDataTerm& data,
                                            const std::vector<double>& beta,
                                            const std::vector<double>& w0,
                                            const NewtonConfig& cfg);

struct AdmmResult {
  WeightField W;
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;  // Q~ value of the returned iterate
};

/// Consensus ADMM for the TV/Lap M-step: splits the objective into a data
/// block (per-pixel Newton with quadratic penalty), a prior block (TV prox or
/// Laplacian linear solve per band) and a simplex projection block, with the
/// Boyd residual stopping rule. Returns the feasible iterate with the best
/// surrogate value seen, so the result never falls below Q~(W0).
AdmmResult admm_maximize_Q(const std::vector<PixelDataTerm>& data,
                           const PriorModel& prior, const WeightField& W0,
                           const AdmmConfig& cfg);

/// Coordinate-wise Newton maximization of
///   sum_{n in group} log Dir(w_n | beta) - theta * sum_l beta_l
/// over beta in (1, inf)^{L+1}, clamped at 1 + 1e-6. log_v_sums[l] is
/// sum_{n in group} log v_{l,n} over the augmented coordinates.
std::vector<double> newton_update_beta(const std::vector<double>& log_v_sums,
                                       int n_pixels, double theta,
                                       const std::vector<double>& beta0);

/// Convenience overload on a weight field restricted to `pixel_set`
/// (all pixels when empty).
std::vector<double> newton_update_beta(const WeightField& W,
                                       const std::vector<int>& pixel_set,
                                       double theta,
                                       const std::vector<double>& beta0);

/// prox_{tau TV}(v): anisotropic l1 TV denoising by projected gradient on the
/// dual (Chambolle-type), `iters` dual iterations.
void tv_prox(const double* v, int rows, int cols, double tau, int iters,
             double* out);

/// Solves (I + weight * L^T L) x = v by conjugate gradients (Laplacian prox).
void lap_prox(const double* v, int rows, int cols, double weight, double cg_tol,
              double* out);

}  // namespace swmsl
