#include "swmsl/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "swmsl/parallel.hpp"

namespace swmsl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInteriorMargin = 1e-12;
constexpr double kBetaFloor = 1.0 + 1e-6;
constexpr double kArmijo = 1e-4;

double dot(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

void AdmmConfig::validate() const {
  if (!(rho > 0.0)) throw ValidationError("AdmmConfig: rho must be > 0");
  if (!(tol_abs > 0.0 && tol_rel > 0.0))
    throw ValidationError("AdmmConfig: tolerances must be > 0");
  if (max_iters < 1) throw ValidationError("AdmmConfig: max_iters must be >= 1");
}

void NewtonConfig::validate() const {
  if (max_iters < 1 || max_backtracks < 1 || !(grad_tol > 0.0) ||
      !(backtrack > 0.0 && backtrack < 1.0))
    throw ValidationError("NewtonConfig: invalid settings");
}

std::vector<double> project_simplex_leq(std::vector<double> x) {
  const int L = static_cast<int>(x.size());
  double clipped_sum = 0.0;
  for (double v : x) clipped_sum += std::max(v, 0.0);
  if (clipped_sum <= 1.0) {
    for (double& v : x) v = std::max(v, 0.0);
    return x;
  }
  // Sum constraint active: project onto {x >= 0, sum = 1} by the sort-based
  // rule of Held/Duchi.
  std::vector<double> sorted(x);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (int i = 0; i < L; ++i) {
    cum += sorted[i];
    const double cand = (cum - 1.0) / (i + 1);
    if (sorted[i] - cand > 0.0) theta = cand;
  }
  for (double& v : x) v = std::max(v - theta, 0.0);
  return x;
}

double PixelDataTerm::value(const double* w) const {
  double sum_w = 0.0;
  for (int l = 0; l < L; ++l) sum_w += w[l];
  const double c0 = (1.0 - sum_w) / T;
  double total = 0.0;
  if (u_bg > 0.0) {
    if (c0 <= 0.0) return kNegInf;
    total += u_bg * std::log(c0);
  }
  for (int j = 0; j < terms(); ++j) {
    const double denom = c0 + dot(feat.data() + static_cast<std::size_t>(j) * L, w, L);
    if (denom <= 0.0) return kNegInf;
    total += weight[j] * std::log(denom);
  }
  return total;
}

void PixelDataTerm::accumulate_gradient(const double* w, double* grad) const {
  double sum_w = 0.0;
  for (int l = 0; l < L; ++l) sum_w += w[l];
  const double c0 = (1.0 - sum_w) / T;
  if (u_bg > 0.0) {
    const double coeff = u_bg / (T * c0);
    for (int l = 0; l < L; ++l) grad[l] -= coeff;
  }
  for (int j = 0; j < terms(); ++j) {
    const double* a = feat.data() + static_cast<std::size_t>(j) * L;
    const double denom = c0 + dot(a, w, L);
    const double coeff = weight[j] / denom;
    for (int l = 0; l < L; ++l) grad[l] += coeff * (a[l] - 1.0 / T);
  }
}

void PixelDataTerm::accumulate_hessian(const double* w, double* hess) const {
  double sum_w = 0.0;
  for (int l = 0; l < L; ++l) sum_w += w[l];
  const double c0 = (1.0 - sum_w) / T;
  if (u_bg > 0.0) {
    const double coeff = u_bg / (T * T * c0 * c0);
    for (int l = 0; l < L; ++l)
      for (int m = 0; m < L; ++m) hess[l * L + m] -= coeff;
  }
  std::vector<double> diff(L);
  for (int j = 0; j < terms(); ++j) {
    const double* a = feat.data() + static_cast<std::size_t>(j) * L;
    const double denom = c0 + dot(a, w, L);
    const double coeff = weight[j] / (denom * denom);
    for (int l = 0; l < L; ++l) diff[l] = a[l] - 1.0 / T;
    for (int l = 0; l < L; ++l)
      for (int m = 0; m < L; ++m) hess[l * L + m] -= coeff * diff[l] * diff[m];
  }
}

PixelDataTerm build_data_term(const SceneCube& scene, int n,
                              const double* p_tilde_row, const IrfBank& bank) {
  const int L = bank.L();
  const int S = bank.support();
  const int t_lo = bank.t_min(), t_hi = bank.t_max();

  PixelDataTerm term;
  term.L = L;
  term.T = bank.T();

  std::vector<double> u(S, 0.0);
  for (const auto& p : scene.photons(n)) {
    const int d_lo = std::max(0, p.bin - t_hi);
    const int d_hi = std::min(S - 1, p.bin - t_lo);
    for (int d = d_lo; d <= d_hi; ++d)
      u[d] += p.count * p_tilde_row[p.bin - d - t_lo];
  }

  double in_support = 0.0;
  for (int d = 0; d < S; ++d) {
    if (u[d] <= 0.0) continue;
    bool zero_feat = true;
    for (int l = 0; l < L; ++l)
      if (bank.a(l, d) != 0.0) zero_feat = false;
    if (zero_feat) continue;  // behaves like a background-only pair
    in_support += u[d];
    term.weight.push_back(u[d]);
    for (int l = 0; l < L; ++l) term.feat.push_back(bank.a(l, d));
  }
  term.u_bg = std::max(0.0, static_cast<double>(scene.ybar(n)) - in_support);
  return term;
}

std::vector<PixelDataTerm> build_data_terms(const SceneCube& scene,
                                            const std::vector<double>& p_tilde,
                                            const IrfBank& bank) {
  const int N = scene.pixels();
  const int K = bank.depth_bins();
  std::vector<PixelDataTerm> terms(N);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t n) {
    terms[n] = build_data_term(scene, static_cast<int>(n),
                               p_tilde.data() + n * K, bank);
  });
  return terms;
}

namespace {

// Shared damped-Newton ascent over smooth concave pixel objectives.
// Objective interface supplies value / gradient / Hessian and a feasibility
// predicate checked during the line search.
struct PixelObjective {
  const PixelDataTerm* data = nullptr;
  const double* beta = nullptr;   // L+1 barrier parameters, or nullptr
  const double* target = nullptr; // quadratic penalty center, or nullptr
  double rho = 0.0;
  int L = 0;

  bool feasible(const double* w) const {
    if (beta) {
      double s = 0.0;
      for (int l = 0; l < L; ++l) {
        if (w[l] < kInteriorMargin) return false;
        s += w[l];
      }
      if (1.0 - s < kInteriorMargin) return false;
    }
    return true;
  }

  double value(const double* w) const {
    double f = data->value(w);
    if (f == kNegInf) return f;
    if (beta) {
      double s = 0.0;
      for (int l = 0; l < L; ++l) {
        if (beta[l] > 1.0) f += (beta[l] - 1.0) * std::log(w[l]);
        s += w[l];
      }
      if (beta[L] > 1.0) f += (beta[L] - 1.0) * std::log(1.0 - s);
    }
    if (target) {
      double q = 0.0;
      for (int l = 0; l < L; ++l) {
        const double d = w[l] - target[l];
        q += d * d;
      }
      f -= 0.5 * rho * q;
    }
    return f;
  }

  void gradient(const double* w, double* grad) const {
    std::fill(grad, grad + L, 0.0);
    data->accumulate_gradient(w, grad);
    if (beta) {
      double s = 0.0;
      for (int l = 0; l < L; ++l) s += w[l];
      const double bg = 1.0 - s;
      for (int l = 0; l < L; ++l) {
        if (beta[l] > 1.0) grad[l] += (beta[l] - 1.0) / w[l];
        if (beta[L] > 1.0) grad[l] -= (beta[L] - 1.0) / bg;
      }
    }
    if (target)
      for (int l = 0; l < L; ++l) grad[l] -= rho * (w[l] - target[l]);
  }

  void hessian(const double* w, double* hess) const {
    std::fill(hess, hess + L * L, 0.0);
    data->accumulate_hessian(w, hess);
    if (beta) {
      double s = 0.0;
      for (int l = 0; l < L; ++l) s += w[l];
      const double bg = 1.0 - s;
      for (int l = 0; l < L; ++l) {
        if (beta[l] > 1.0) hess[l * L + l] -= (beta[l] - 1.0) / (w[l] * w[l]);
        if (beta[L] > 1.0) {
          const double coeff = (beta[L] - 1.0) / (bg * bg);
          for (int m = 0; m < L; ++m) hess[l * L + m] -= coeff;
        }
      }
    }
    if (target)
      for (int l = 0; l < L; ++l) hess[l * L + l] -= rho;
  }
};

// Damped Newton with Armijo backtracking; returns w unchanged when already
// stationary, which keeps converged SEM iterations bitwise stable.
std::vector<double> newton_ascent(const PixelObjective& obj,
                                  const std::vector<double>& w0,
                                  const NewtonConfig& cfg) {
  const int L = obj.L;
  std::vector<double> w = w0;
  std::vector<double> grad(L), cand(L);
  Eigen::MatrixXd H(L, L);
  Eigen::VectorXd g(L), step(L);

  double f = obj.value(w.data());
  if (f == kNegInf)
    throw NumericalError("newton_maximize_Q_pixel: infeasible start");

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    obj.gradient(w.data(), grad.data());
    double gmax = 0.0;
    for (int l = 0; l < L; ++l) gmax = std::max(gmax, std::abs(grad[l]));
    if (gmax < cfg.grad_tol) return w;

    std::vector<double> hess(static_cast<std::size_t>(L) * L);
    obj.hessian(w.data(), hess.data());
    for (int l = 0; l < L; ++l) {
      g[l] = grad[l];
      for (int m = 0; m < L; ++m) H(l, m) = -hess[l * L + m];
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    bool use_newton = ldlt.info() == Eigen::Success && ldlt.isPositive();
    if (use_newton) {
      step = ldlt.solve(g);
      if (step.dot(g) <= 0.0) use_newton = false;
    }
    if (!use_newton) step = g;  // ascent fallback

    const double slope = step.dot(g);
    // Evaluation noise floor of the objective; once the Armijo increment
    // falls below it, demand only noise-level non-decrease so the quadratic
    // endgame can finish instead of stalling on rounding.
    const double noise = 1e-14 * (1.0 + std::abs(f));
    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
      for (int l = 0; l < L; ++l) cand[l] = w[l] + t * step[l];
      if (obj.feasible(cand.data())) {
        const double fc = obj.value(cand.data());
        const double inc = kArmijo * t * slope;
        if (fc > kNegInf && (fc >= f + inc || (inc <= noise && fc >= f - noise))) {
          w = cand;
          f = fc;
          accepted = true;
          break;
        }
      }
      t *= cfg.backtrack;
    }
    if (!accepted)
      throw NumericalError("LineSearchFailed: no acceptable Newton step");
  }
  return w;
}

}  // namespace

std::vector<double> newton_maximize_Q_pixel(const PixelDataTerm& data,
                                            const std::vector<double>& beta,
                                            const std::vector<double>& w0,
                                            const NewtonConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(beta.size()) != data.L + 1)
    throw ValidationError("newton_maximize_Q_pixel: beta must have L+1 entries");
  for (double b : beta)
    if (!(b >= 1.0))
      throw ValidationError("newton_maximize_Q_pixel: beta entries must be >= 1");
  PixelObjective obj;
  obj.data = &data;
  obj.beta = beta.data();
  obj.L = data.L;
  return newton_ascent(obj, w0, cfg);
}

namespace {

double field_norm(const std::vector<double>& v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

}  // namespace

AdmmResult admm_maximize_Q(const std::vector<PixelDataTerm>& data,
                           const PriorModel& prior, const WeightField& W0,
                           const AdmmConfig& cfg) {
  cfg.validate();
  if (prior.kind != PriorKind::TV && prior.kind != PriorKind::Lap)
    throw ValidationError("admm_maximize_Q: prior must be TV or Lap");
  const int N = W0.pixels(), L = W0.L();
  const int rows = W0.rows(), cols = W0.cols();
  if (static_cast<int>(data.size()) != N)
    throw ValidationError("admm_maximize_Q: data term count mismatch");

  const std::size_t NL = static_cast<std::size_t>(N) * L;
  std::vector<double> X(W0.data()), U(X), V(X), Z(X);
  std::vector<double> DU(NL, 0.0), DV(NL, 0.0), DZ(NL, 0.0);

  const auto surrogate = [&](const std::vector<double>& w) {
    double q = 0.0;
    for (int n = 0; n < N; ++n) {
      const double v = data[n].value(w.data() + static_cast<std::size_t>(n) * L);
      if (v == kNegInf) return kNegInf;
      q += v;
    }
    std::vector<double> band(N);
    for (int l = 0; l < L; ++l) {
      for (int n = 0; n < N; ++n) band[n] = w[static_cast<std::size_t>(n) * L + l];
      if (prior.kind == PriorKind::TV) {
        q -= prior.lambda * tv_norm(band.data(), rows, cols);
      } else {
        std::vector<double> lap(N);
        laplacian_apply(band.data(), rows, cols, lap.data());
        double ss = 0.0;
        for (int n = 0; n < N; ++n) ss += lap[n] * lap[n];
        q -= 0.5 * prior.lambda * ss;
      }
    }
    return q;
  };

  AdmmResult result;
  result.W = W0;
  result.objective = surrogate(X);

  NewtonConfig inner;
  inner.max_iters = cfg.u_newton_iters;
  inner.grad_tol = 1e-9;

  std::vector<double> band(N), out(N);
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    // U: per-pixel data solves against the consensus target.
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t n) {
      std::vector<double> target(L), w0(L);
      for (int l = 0; l < L; ++l) {
        target[l] = X[n * L + l] - DU[n * L + l];
        w0[l] = U[n * L + l];
      }
      PixelObjective obj;
      obj.data = &data[n];
      obj.target = target.data();
      obj.rho = cfg.rho;
      obj.L = L;
      if (obj.value(w0.data()) == kNegInf) {
        // Warm start left the data-term domain (a new p~ can add background
        // weight to a row sitting on sum(w) = 1); restart from a shrunken
        // projection, which is always in the domain.
        w0 = project_simplex_leq(std::move(w0));
        for (double& v : w0) v *= 1.0 - 1e-9;
      }
      std::vector<double> u;
      try {
        u = newton_ascent(obj, w0, inner);
      } catch (const NumericalError&) {
        u = w0;  // inexact block update; later iterations recover
      }
      for (int l = 0; l < L; ++l) U[n * L + l] = u[l];
    });

    // V: prior prox per band.
    for (int l = 0; l < L; ++l) {
      for (int n = 0; n < N; ++n)
        band[n] = X[static_cast<std::size_t>(n) * L + l] -
                  DV[static_cast<std::size_t>(n) * L + l];
      if (prior.kind == PriorKind::TV)
        tv_prox(band.data(), rows, cols, prior.lambda / cfg.rho,
                cfg.tv_prox_iters, out.data());
      else
        lap_prox(band.data(), rows, cols, prior.lambda / cfg.rho, cfg.lap_cg_tol,
                 out.data());
      for (int n = 0; n < N; ++n) V[static_cast<std::size_t>(n) * L + l] = out[n];
    }

    // Z: simplex projection per pixel.
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t n) {
      std::vector<double> v(L);
      for (int l = 0; l < L; ++l) v[l] = X[n * L + l] - DZ[n * L + l];
      const auto z = project_simplex_leq(std::move(v));
      for (int l = 0; l < L; ++l) Z[n * L + l] = z[l];
    });

    // Consensus average and dual updates.
    double dual_sq = 0.0;
    std::vector<double> X_new(NL);
    for (std::size_t i = 0; i < NL; ++i) {
      X_new[i] = (U[i] + DU[i] + V[i] + DV[i] + Z[i] + DZ[i]) / 3.0;
      const double dx = X_new[i] - X[i];
      dual_sq += dx * dx;
    }
    double primal_sq = 0.0;
    for (std::size_t i = 0; i < NL; ++i) {
      const double ru = U[i] - X_new[i];
      const double rv = V[i] - X_new[i];
      const double rz = Z[i] - X_new[i];
      primal_sq += ru * ru + rv * rv + rz * rz;
      DU[i] += ru;
      DV[i] += rv;
      DZ[i] += rz;
    }
    X.swap(X_new);
    result.iterations = iter;

    const double q = surrogate(Z);
    if (q > result.objective) {
      result.objective = q;
      std::copy(Z.begin(), Z.end(), result.W.data().begin());
    }

    const double r_norm = std::sqrt(primal_sq);
    const double s_norm = cfg.rho * std::sqrt(3.0 * dual_sq);
    const double block_norm = std::sqrt(
        field_norm(U) * field_norm(U) + field_norm(V) * field_norm(V) +
        field_norm(Z) * field_norm(Z));
    const double x_norm = std::sqrt(3.0) * field_norm(X);
    const double dual_norm = cfg.rho * std::sqrt(
        field_norm(DU) * field_norm(DU) + field_norm(DV) * field_norm(DV) +
        field_norm(DZ) * field_norm(DZ));
    const double eps_pri = std::sqrt(3.0 * NL) * cfg.tol_abs +
                           cfg.tol_rel * std::max(block_norm, x_norm);
    const double eps_dual =
        std::sqrt(3.0 * NL) * cfg.tol_abs + cfg.tol_rel * dual_norm;
    if (r_norm <= eps_pri && s_norm <= eps_dual) {
      result.converged = true;
      break;
    }
  }
  return result;
}

std::vector<double> newton_update_beta(const std::vector<double>& log_v_sums,
                                       int n_pixels, double theta,
                                       const std::vector<double>& beta0) {
  const int D = static_cast<int>(beta0.size());
  if (static_cast<int>(log_v_sums.size()) != D)
    throw ValidationError("newton_update_beta: dimension mismatch");
  if (n_pixels < 1) throw ValidationError("newton_update_beta: empty group");
  const double M = n_pixels;

  std::vector<double> beta(beta0);
  for (double& b : beta) b = std::max(b, kBetaFloor);

  // One-coordinate objective restricted to beta_l (others fixed).
  const auto f1 = [&](double bl, double b_rest, double S_l) {
    return M * (std::lgamma(b_rest + bl) - std::lgamma(bl)) + (bl - 1.0) * S_l -
           theta * bl;
  };

  for (int sweep = 0; sweep < 500; ++sweep) {
    double max_delta = 0.0;
    for (int l = 0; l < D; ++l) {
      double b_total = std::accumulate(beta.begin(), beta.end(), 0.0);
      const double b_rest = b_total - beta[l];
      const double g = M * (boost::math::digamma(b_total) -
                            boost::math::digamma(beta[l])) +
                       log_v_sums[l] - theta;
      const double h = M * (boost::math::trigamma(b_total) -
                            boost::math::trigamma(beta[l]));
      double cand = beta[l] - g / h;  // h < 0 for D >= 2
      if (!std::isfinite(cand)) cand = beta[l];
      cand = std::max(cand, kBetaFloor);
      // Monotone safeguard: halve the step toward the current point until the
      // 1-D objective does not decrease.
      const double f_cur = f1(beta[l], b_rest, log_v_sums[l]);
      for (int bt = 0; bt < 60 && f1(cand, b_rest, log_v_sums[l]) < f_cur - 1e-12;
           ++bt)
        cand = beta[l] + 0.5 * (cand - beta[l]);
      if (f1(cand, b_rest, log_v_sums[l]) < f_cur) cand = beta[l];
      max_delta = std::max(max_delta, std::abs(cand - beta[l]));
      beta[l] = cand;
    }
    if (max_delta < 1e-10) break;
  }
  return beta;
}

std::vector<double> newton_update_beta(const WeightField& W,
                                       const std::vector<int>& pixel_set,
                                       double theta,
                                       const std::vector<double>& beta0) {
  const int L = W.L();
  std::vector<int> all;
  const std::vector<int>* set = &pixel_set;
  if (pixel_set.empty()) {
    all.resize(W.pixels());
    std::iota(all.begin(), all.end(), 0);
    set = &all;
  }
  std::vector<double> sums(L + 1, 0.0);
  for (int n : *set) {
    double s = 0.0;
    for (int l = 0; l < L; ++l) {
      const double v = std::max(W(n, l), kInteriorMargin);
      sums[l] += std::log(v);
      s += W(n, l);
    }
    sums[L] += std::log(std::max(1.0 - s, kInteriorMargin));
  }
  return newton_update_beta(sums, static_cast<int>(set->size()), theta, beta0);
}

void tv_prox(const double* v, int rows, int cols, double tau, int iters,
             double* out) {
  const int N = rows * cols;
  if (tau <= 0.0 || iters <= 0) {
    std::copy(v, v + N, out);
    return;
  }
  // Projected gradient ascent on the dual with the safe step 1/8; anisotropic
  // TV gives a per-component box constraint |p| <= tau.
  std::vector<double> pv(N, 0.0), ph(N, 0.0), x(N);
  const double step = 0.125;
  for (int it = 0; it < iters; ++it) {
    // x = v - div* p  (adjoint of forward differences)
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        const int n = i * cols + j;
        double acc = 0.0;
        if (i + 1 < rows) acc -= pv[n];
        if (i > 0) acc += pv[n - cols];
        if (j + 1 < cols) acc -= ph[n];
        if (j > 0) acc += ph[n - 1];
        x[n] = v[n] - acc;
      }
    }
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        const int n = i * cols + j;
        if (i + 1 < rows)
          pv[n] = std::clamp(pv[n] + step * (x[n + cols] - x[n]), -tau, tau);
        if (j + 1 < cols)
          ph[n] = std::clamp(ph[n] + step * (x[n + 1] - x[n]), -tau, tau);
      }
    }
  }
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const int n = i * cols + j;
      double acc = 0.0;
      if (i + 1 < rows) acc -= pv[n];
      if (i > 0) acc += pv[n - cols];
      if (j + 1 < cols) acc -= ph[n];
      if (j > 0) acc += ph[n - 1];
      out[n] = v[n] - acc;
    }
  }
}

void lap_prox(const double* v, int rows, int cols, double weight, double cg_tol,
              double* out) {
  const int N = rows * cols;
  if (weight <= 0.0) {
    std::copy(v, v + N, out);
    return;
  }
  std::vector<double> x(v, v + N), r(N), p(N), Ap(N), tmp(N);
  const auto apply_A = [&](const double* in, double* res) {
    laplacian_apply(in, rows, cols, tmp.data());
    laplacian_apply(tmp.data(), rows, cols, res);
    for (int n = 0; n < N; ++n) res[n] = in[n] + weight * res[n];
  };
  apply_A(x.data(), Ap.data());
  double rr = 0.0;
  for (int n = 0; n < N; ++n) {
    r[n] = v[n] - Ap[n];
    p[n] = r[n];
    rr += r[n] * r[n];
  }
  const double v_norm = std::sqrt(std::inner_product(v, v + N, v, 0.0));
  const double threshold = cg_tol * std::max(v_norm, 1e-30);
  for (int it = 0; it < 10 * N && std::sqrt(rr) > threshold; ++it) {
    apply_A(p.data(), Ap.data());
    const double pAp = std::inner_product(p.begin(), p.end(), Ap.begin(), 0.0);
    if (pAp <= 0.0) break;
    const double alpha = rr / pAp;
    double rr_new = 0.0;
    for (int n = 0; n < N; ++n) {
      x[n] += alpha * p[n];
      r[n] -= alpha * Ap[n];
      rr_new += r[n] * r[n];
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (int n = 0; n < N; ++n) p[n] = r[n] + beta * p[n];
  }
  std::copy(x.begin(), x.end(), out);
}

}  // namespace swmsl
