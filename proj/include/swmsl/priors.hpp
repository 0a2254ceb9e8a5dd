#pragma once

#include <string>
#include <vector>

#include "swmsl/types.hpp"

namespace swmsl {

enum class PriorKind { TV, Lap, WDirichlet, GDirichlet, CDirichlet };

PriorKind prior_kind_from_name(const std::string& name);
std::string prior_kind_name(PriorKind kind);
bool prior_estimates_beta(PriorKind kind);

/// Prior model for the weight field. `clusters` maps each pixel to its group
/// and is required exactly for the C-Dirichlet kind.
struct PriorModel {
  PriorKind kind = PriorKind::WDirichlet;
  double lambda = 10.0;
  double kappa = 1.01;
  double theta = 0.25;
  std::vector<int> clusters;
  int n_clusters = 0;

  void validate(int n_pixels) const;
  /// Number of Dirichlet parameter vectors the model estimates (0, 1, or C).
  int beta_groups() const;
  int cluster_of(int n) const {
    return kind == PriorKind::CDirichlet ? clusters[n] : 0;
  }
};

/// The estimated hyperparameter set Phi: empty, one beta vector (G-Dirichlet)
/// or one per cluster (C-Dirichlet). Each vector has L+1 entries > 1.
struct DirichletParams {
  std::vector<std::vector<double>> beta;
  bool empty() const { return beta.empty(); }
};

/// Anisotropic l1 total variation with forward differences and zero-padded
/// borders, on a row-major image.
double tv_norm(const double* x, int rows, int cols);

/// 5-point Laplacian with replicated-edge (Neumann) boundary; out = L x.
void laplacian_apply(const double* x, int rows, int cols, double* out);

/// Log prior density of W up to an additive constant. Dirichlet variants
/// include their normalizing constants only when beta is being estimated
/// (G-/C-Dirichlet). Requires strictly interior rows for Dirichlet kinds.
double log_prior_w(const WeightField& W, const PriorModel& model,
                   const DirichletParams& phi = {});

/// Analytic gradient of log_prior_w, N x L row-major. Undefined for TV.
std::vector<double> grad_log_prior_w(const WeightField& W, const PriorModel& model,
                                     const DirichletParams& phi = {});

/// Truncated-exponential hyperprior: sum_l (log theta - theta*beta_l) when all
/// beta_l > 1, else -inf.
double log_prior_beta(const std::vector<double>& beta, double theta);

/// Depth MRF: -epsilon * ||t||_TV with 4-neighbor forward differences.
double log_prior_t(const DepthField& t, double epsilon);

/// Per-pixel log-likelihood profile over candidate depths k in
/// [t_min, t_max]: profile[k - t_min] = sum_p m_p log p(s_p | w, k).
std::vector<double> likelihood_profile(const SceneCube& scene, int n,
                                       const double* w, int L,
                                       const IrfBank& bank);

/// Unnormalized log conditional of t_n given the rest of the depth field:
/// likelihood profile plus -epsilon * sum_{m in nbrs(n)} |k - t_m|.
/// The caller normalizes via log-sum-exp.
std::vector<double> conditional_t_logits(int n, const DepthField& t_rest,
                                         const double* w_n, int L,
                                         const SceneCube& scene,
                                         const IrfBank& bank, double epsilon);

/// Adds the depth-TV neighbor penalty of pixel n onto an existing profile.
void add_depth_prior(std::vector<double>& logits, int n, const DepthField& t,
                     int rows, int cols, int t_lo, double epsilon);

}  // namespace swmsl
