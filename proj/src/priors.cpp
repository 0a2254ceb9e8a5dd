#include "swmsl/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace swmsl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_dirichlet_normalizer(const std::vector<double>& beta) {
  double sum = 0.0, lg = 0.0;
  for (double b : beta) {
    sum += b;
    lg += std::lgamma(b);
  }
  return std::lgamma(sum) - lg;
}

const std::vector<double>& beta_for_pixel(const PriorModel& model,
                                          const DirichletParams& phi, int n) {
  if (model.kind == PriorKind::GDirichlet) {
    if (phi.empty())
      throw ValidationError("log_prior_w: G-Dirichlet requires current beta");
    return phi.beta[0];
  }
  if (phi.beta.size() <= static_cast<std::size_t>(model.clusters[n]))
    throw ValidationError("log_prior_w: C-Dirichlet beta/cluster mismatch");
  return phi.beta[model.clusters[n]];
}

}  // namespace

PriorKind prior_kind_from_name(const std::string& name) {
  if (name == "tv") return PriorKind::TV;
  if (name == "lap") return PriorKind::Lap;
  if (name == "w-dirichlet") return PriorKind::WDirichlet;
  if (name == "g-dirichlet") return PriorKind::GDirichlet;
  if (name == "c-dirichlet") return PriorKind::CDirichlet;
  throw ValidationError("unknown prior model: " + name);
}

std::string prior_kind_name(PriorKind kind) {
  switch (kind) {
    case PriorKind::TV: return "tv";
    case PriorKind::Lap: return "lap";
    case PriorKind::WDirichlet: return "w-dirichlet";
    case PriorKind::GDirichlet: return "g-dirichlet";
    case PriorKind::CDirichlet: return "c-dirichlet";
  }
  return "?";
}

bool prior_estimates_beta(PriorKind kind) {
  return kind == PriorKind::GDirichlet || kind == PriorKind::CDirichlet;
}

void PriorModel::validate(int n_pixels) const {
  if (kind == PriorKind::CDirichlet) {
    if (static_cast<int>(clusters.size()) != n_pixels)
      throw ValidationError("PriorModel: cluster map size mismatch");
    if (n_clusters < 1) throw ValidationError("PriorModel: n_clusters < 1");
    std::vector<char> seen(n_clusters, 0);
    for (int c : clusters) {
      if (c < 0 || c >= n_clusters)
        throw ValidationError("PriorModel: cluster index out of range");
      seen[c] = 1;
    }
    for (char s : seen)
      if (!s) throw ValidationError("PriorModel: empty cluster in partition");
  } else if (!clusters.empty()) {
    throw ValidationError("PriorModel: clusters only valid for C-Dirichlet");
  }
}

int PriorModel::beta_groups() const {
  if (kind == PriorKind::GDirichlet) return 1;
  if (kind == PriorKind::CDirichlet) return n_clusters;
  return 0;
}

double tv_norm(const double* x, int rows, int cols) {
  double tv = 0.0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double v = x[i * cols + j];
      if (i + 1 < rows) tv += std::abs(x[(i + 1) * cols + j] - v);
      if (j + 1 < cols) tv += std::abs(x[i * cols + j + 1] - v);
    }
  }
  return tv;
}

void laplacian_apply(const double* x, int rows, int cols, double* out) {
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const int n = i * cols + j;
      double acc = 0.0;
      if (i > 0) acc += x[n - cols] - x[n];
      if (i + 1 < rows) acc += x[n + cols] - x[n];
      if (j > 0) acc += x[n - 1] - x[n];
      if (j + 1 < cols) acc += x[n + 1] - x[n];
      out[n] = acc;
    }
  }
}

double log_prior_w(const WeightField& W, const PriorModel& model,
                   const DirichletParams& phi) {
  W.check_simplex();
  const int N = W.pixels(), L = W.L();
  const int rows = W.rows(), cols = W.cols();

  switch (model.kind) {
    case PriorKind::TV: {
      double total = 0.0;
      std::vector<double> band(N);
      for (int l = 0; l < L; ++l) {
        for (int n = 0; n < N; ++n) band[n] = W(n, l);
        total += tv_norm(band.data(), rows, cols);
      }
      return -model.lambda * total;
    }
    case PriorKind::Lap: {
      double total = 0.0;
      std::vector<double> band(N), lap(N);
      for (int l = 0; l < L; ++l) {
        for (int n = 0; n < N; ++n) band[n] = W(n, l);
        laplacian_apply(band.data(), rows, cols, lap.data());
        for (int n = 0; n < N; ++n) total += lap[n] * lap[n];
      }
      return -0.5 * model.lambda * total;
    }
    default: {
      const bool with_normalizer = prior_estimates_beta(model.kind);
      std::vector<double> kappa_beta;
      if (model.kind == PriorKind::WDirichlet)
        kappa_beta.assign(L + 1, model.kappa);
      double total = 0.0;
      for (int n = 0; n < N; ++n) {
        const std::vector<double>& beta =
            model.kind == PriorKind::WDirichlet ? kappa_beta
                                                : beta_for_pixel(model, phi, n);
        double sum_w = 0.0;
        for (int l = 0; l < L; ++l) {
          const double v = W(n, l);
          if (v <= 0.0)
            throw ValidationError("BoundaryPoint: Dirichlet prior needs w > 0");
          total += (beta[l] - 1.0) * std::log(v);
          sum_w += v;
        }
        const double bg = 1.0 - sum_w;
        if (bg <= 0.0)
          throw ValidationError("BoundaryPoint: Dirichlet prior needs background > 0");
        total += (beta[L] - 1.0) * std::log(bg);
        if (with_normalizer) total += log_dirichlet_normalizer(beta);
      }
      return total;
    }
  }
}

std::vector<double> grad_log_prior_w(const WeightField& W, const PriorModel& model,
                                     const DirichletParams& phi) {
  const int N = W.pixels(), L = W.L();
  const int rows = W.rows(), cols = W.cols();
  std::vector<double> grad(static_cast<std::size_t>(N) * L, 0.0);

  switch (model.kind) {
    case PriorKind::TV:
      throw NumericalError(
          "NotDifferentiable: TV prior has no gradient; use its prox");
    case PriorKind::Lap: {
      std::vector<double> band(N), lap(N), lap2(N);
      for (int l = 0; l < L; ++l) {
        for (int n = 0; n < N; ++n) band[n] = W(n, l);
        laplacian_apply(band.data(), rows, cols, lap.data());
        laplacian_apply(lap.data(), rows, cols, lap2.data());
        for (int n = 0; n < N; ++n)
          grad[static_cast<std::size_t>(n) * L + l] = -model.lambda * lap2[n];
      }
      return grad;
    }
    default: {
      std::vector<double> kappa_beta;
      if (model.kind == PriorKind::WDirichlet)
        kappa_beta.assign(L + 1, model.kappa);
      for (int n = 0; n < N; ++n) {
        const std::vector<double>& beta =
            model.kind == PriorKind::WDirichlet ? kappa_beta
                                                : beta_for_pixel(model, phi, n);
        double sum_w = 0.0;
        for (int l = 0; l < L; ++l) sum_w += W(n, l);
        const double bg = 1.0 - sum_w;
        if (bg <= 0.0)
          throw ValidationError("BoundaryPoint: Dirichlet gradient needs background > 0");
        for (int l = 0; l < L; ++l) {
          const double v = W(n, l);
          if (v <= 0.0)
            throw ValidationError("BoundaryPoint: Dirichlet gradient needs w > 0");
          grad[static_cast<std::size_t>(n) * L + l] =
              (beta[l] - 1.0) / v - (beta[L] - 1.0) / bg;
        }
      }
      return grad;
    }
  }
}

double log_prior_beta(const std::vector<double>& beta, double theta) {
  double total = 0.0;
  for (double b : beta) {
    if (!(b > 1.0)) return kNegInf;
    total += std::log(theta) - theta * b;
  }
  return total;
}

double log_prior_t(const DepthField& t, double epsilon) {
  std::vector<double> x(t.pixels());
  for (int n = 0; n < t.pixels(); ++n) x[n] = t[n];
  return -epsilon * tv_norm(x.data(), t.rows(), t.cols());
}

std::vector<double> likelihood_profile(const SceneCube& scene, int n,
                                       const double* w, int L,
                                       const IrfBank& bank) {
  const int t_lo = bank.t_min(), t_hi = bank.t_max();
  const int K = bank.depth_bins();
  const int S = bank.support();
  double sum_w = 0.0;
  for (int l = 0; l < L; ++l) sum_w += w[l];
  const double c0 = (1.0 - sum_w) / bank.T();

  const auto& photons = scene.photons(n);
  std::vector<double> profile(K, 0.0);
  if (photons.empty()) return profile;

  std::vector<double> dlog(S);
  for (int d = 0; d < S; ++d) {
    double f = c0;
    for (int l = 0; l < L; ++l) f += w[l] * bank.a(l, d);
    dlog[d] = f > 0.0 ? std::log(f) : kNegInf;
  }

  if (c0 > 0.0) {
    // Out-of-support arrivals contribute log(c0); scatter only the in-support
    // corrections onto the candidate depths.
    const double base = std::log(c0);
    const double ybar = static_cast<double>(scene.ybar(n));
    for (double& v : profile) v = ybar * base;
    for (const auto& p : photons) {
      const int d_lo = std::max(0, p.bin - t_hi);
      const int d_hi = std::min(S - 1, p.bin - t_lo);
      for (int d = d_lo; d <= d_hi; ++d)
        profile[p.bin - d - t_lo] += p.count * (dlog[d] - base);
    }
  } else {
    // Boundary case sum(w) = 1: photons outside every IRF support have zero
    // density, so evaluate candidates directly.
    for (int k = t_lo; k <= t_hi; ++k) {
      double acc = 0.0;
      for (const auto& p : photons) {
        const int d = p.bin - k;
        const double f = (d >= 0 && d < S) ? std::exp(dlog[d]) : 0.0;
        if (f <= 0.0) {
          acc = kNegInf;
          break;
        }
        acc += p.count * dlog[d];
      }
      profile[k - t_lo] = acc;
    }
  }
  return profile;
}

void add_depth_prior(std::vector<double>& logits, int n, const DepthField& t,
                     int rows, int cols, int t_lo, double epsilon) {
  if (epsilon == 0.0) return;
  const int i = n / cols, j = n % cols;
  const int K = static_cast<int>(logits.size());
  int nbrs[4];
  int n_nbrs = 0;
  if (i > 0) nbrs[n_nbrs++] = n - cols;
  if (i + 1 < rows) nbrs[n_nbrs++] = n + cols;
  if (j > 0) nbrs[n_nbrs++] = n - 1;
  if (j + 1 < cols) nbrs[n_nbrs++] = n + 1;
  for (int q = 0; q < n_nbrs; ++q) {
    const int tm = t[nbrs[q]];
    for (int k = 0; k < K; ++k)
      logits[k] -= epsilon * std::abs(k + t_lo - tm);
  }
}

std::vector<double> conditional_t_logits(int n, const DepthField& t_rest,
                                         const double* w_n, int L,
                                         const SceneCube& scene,
                                         const IrfBank& bank, double epsilon) {
  std::vector<double> logits = likelihood_profile(scene, n, w_n, L, bank);
  add_depth_prior(logits, n, t_rest, scene.rows(), scene.cols(), bank.t_min(),
                  epsilon);
  return logits;
}

}  // namespace swmsl
