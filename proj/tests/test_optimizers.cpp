#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "swmsl/forward_model.hpp"
#include "swmsl/optimizers.hpp"
#include "swmsl/rng.hpp"

using namespace swmsl;

namespace {

// Brute-force projection oracle: grid minimization of ||x - y||^2 over S_2.
std::vector<double> grid_project_2d(const std::vector<double>& x, double step) {
  std::vector<double> best(2, 0.0);
  double best_d2 = std::numeric_limits<double>::infinity();
  for (double a = 0.0; a <= 1.0 + 1e-12; a += step) {
    for (double b = 0.0; a + b <= 1.0 + 1e-12; b += step) {
      const double d2 = (a - x[0]) * (a - x[0]) + (b - x[1]) * (b - x[1]);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = {a, b};
      }
    }
  }
  return best;
}

// Random p~ row over the admissible window.
std::vector<double> random_p_tilde(Rng& rng, int K) {
  std::vector<double> p(K);
  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    p[k] = rng.next_unit() < 0.1 ? rng.next_unit() : 0.0;
    total += p[k];
  }
  if (total == 0.0) {
    p[K / 2] = 1.0;
    return p;
  }
  for (double& v : p) v /= total;
  return p;
}

double direct_Q2(const SceneCube& scene, const std::vector<double>& p_tilde,
                 const double* w, int L, const IrfBank& bank) {
  double total = 0.0;
  for (int k = bank.t_min(); k <= bank.t_max(); ++k) {
    const double pk = p_tilde[k - bank.t_min()];
    if (pk == 0.0) continue;
    for (const auto& p : scene.photons(0))
      total += pk * p.count * std::log(photon_pdf(p.bin, w, L, k, bank));
  }
  return total;
}

}  // namespace

TEST_CASE("simplex projection is the identity on feasible points") {
  Rng rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    const int L = 1 + static_cast<int>(rng.next_unit() * 4);
    const auto w = test::random_interior(rng, L);
    const auto p = project_simplex_leq(w);
    for (int l = 0; l < L; ++l) CHECK(p[l] == w[l]);
  }
}

TEST_CASE("simplex projection hand values match the brute-force oracle") {
  {
    const auto p = project_simplex_leq({2.0, 2.0});
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
    const auto o = grid_project_2d({2.0, 2.0}, 1e-3);
    CHECK(std::abs(p[0] - o[0]) <= 2e-3);
    CHECK(std::abs(p[1] - o[1]) <= 2e-3);
  }
  {
    const auto p = project_simplex_leq({-1.0, 0.3});
    CHECK(p[0] == 0.0);
    CHECK(p[1] == doctest::Approx(0.3).epsilon(1e-12));
    const auto o = grid_project_2d({-1.0, 0.3}, 1e-3);
    CHECK(std::abs(p[0] - o[0]) <= 2e-3);
    CHECK(std::abs(p[1] - o[1]) <= 2e-3);
  }
}

TEST_CASE("simplex projection agrees with the grid oracle on random points") {
  Rng rng(73);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> x = {4.0 * rng.next_unit() - 2.0,
                                   4.0 * rng.next_unit() - 2.0};
    const auto p = project_simplex_leq(x);
    const auto o = grid_project_2d(x, 1e-3);
    CHECK(std::abs(p[0] - o[0]) <= 2e-3);
    CHECK(std::abs(p[1] - o[1]) <= 2e-3);
  }
}

TEST_CASE("simplex projection is idempotent and non-expansive") {
  Rng rng(79);
  for (int trial = 0; trial < 100; ++trial) {
    const int L = 2 + static_cast<int>(rng.next_unit() * 3);
    std::vector<double> x(L), y(L);
    for (int l = 0; l < L; ++l) {
      x[l] = 4.0 * rng.next_unit() - 2.0;
      y[l] = 4.0 * rng.next_unit() - 2.0;
    }
    const auto px = project_simplex_leq(x);
    const auto ppx = project_simplex_leq(px);
    double sum = 0.0;
    for (int l = 0; l < L; ++l) {
      CHECK(px[l] >= 0.0);
      CHECK(std::abs(ppx[l] - px[l]) <= 1e-12);
      sum += px[l];
    }
    CHECK(sum <= 1.0 + 1e-12);
    const auto py = project_simplex_leq(y);
    double d_orig = 0.0, d_proj = 0.0;
    for (int l = 0; l < L; ++l) {
      d_orig += (x[l] - y[l]) * (x[l] - y[l]);
      d_proj += (px[l] - py[l]) * (px[l] - py[l]);
    }
    CHECK(d_proj <= d_orig + 1e-12);
  }
}

TEST_CASE("pixel data term reproduces the weighted log-likelihood") {
  Rng rng(83);
  for (int L : {1, 2}) {
    const auto bank = test::small_bank(L);
    for (int trial = 0; trial < 10; ++trial) {
      const auto w_true = test::random_interior(rng, L);
      const auto photons = test::draw_photons(rng, bank, w_true, 20, 35);
      const SceneCube scene = test::one_pixel_scene(bank.T(), photons);
      const auto p_tilde = random_p_tilde(rng, bank.depth_bins());
      const PixelDataTerm term = build_data_term(scene, 0, p_tilde.data(), bank);
      for (int probe = 0; probe < 5; ++probe) {
        const auto w = test::random_interior(rng, L);
        CHECK(term.value(w.data()) ==
              doctest::Approx(direct_Q2(scene, p_tilde, w.data(), L, bank))
                  .epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("pixel data term gradient and Hessian match finite differences") {
  Rng rng(89);
  const int L = 2;
  const auto bank = test::small_bank(L);
  const double h = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    const auto w_true = test::random_interior(rng, L);
    const auto photons = test::draw_photons(rng, bank, w_true, 21, 30);
    const SceneCube scene = test::one_pixel_scene(bank.T(), photons);
    const auto p_tilde = random_p_tilde(rng, bank.depth_bins());
    const PixelDataTerm term = build_data_term(scene, 0, p_tilde.data(), bank);

    const auto w = test::random_interior(rng, L);
    std::vector<double> grad(L, 0.0);
    term.accumulate_gradient(w.data(), grad.data());
    std::vector<double> hess(L * L, 0.0);
    term.accumulate_hessian(w.data(), hess.data());

    for (int l = 0; l < L; ++l) {
      auto plus = w, minus = w;
      plus[l] += h;
      minus[l] -= h;
      const double fd = (term.value(plus.data()) - term.value(minus.data())) / (2 * h);
      CHECK(std::abs(fd - grad[l]) <= 1e-5 * std::max(1.0, std::abs(grad[l])));

      std::vector<double> gp(L, 0.0), gm(L, 0.0);
      term.accumulate_gradient(plus.data(), gp.data());
      term.accumulate_gradient(minus.data(), gm.data());
      for (int m = 0; m < L; ++m) {
        const double hd = (gp[m] - gm[m]) / (2 * h);
        CHECK(std::abs(hd - hess[l * L + m]) <=
              1e-4 * std::max(1.0, std::abs(hess[l * L + m])));
      }
    }
  }
}

TEST_CASE("newton with no photons lands on the Dirichlet mode") {
  for (int L : {1, 2, 3}) {
    PixelDataTerm empty;
    empty.L = L;
    empty.T = 64.0;
    const std::vector<double> beta(L + 1, 1.5);
    const std::vector<double> w0(L, 0.5 / (L + 1));
    const auto w = newton_maximize_Q_pixel(empty, beta, w0, {});
    for (int l = 0; l < L; ++l)
      CHECK(w[l] == doctest::Approx(1.0 / (L + 1)).epsilon(1e-6));
  }
}

TEST_CASE("newton matches exhaustive grid search on L=1 problems") {
  Rng rng(97);
  const auto bank = test::small_bank(1);
  const int K = bank.depth_bins();
  NewtonConfig cfg;
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> w_true = {0.1 + 0.7 * rng.next_unit()};
    const int t = bank.t_min() + static_cast<int>(rng.next_unit() * (K - 5));
    const auto photons =
        test::draw_photons(rng, bank, w_true, t, 10 + static_cast<int>(rng.next_unit() * 40));
    if (photons.empty()) continue;
    const SceneCube scene = test::one_pixel_scene(bank.T(), photons);
    std::vector<double> p_tilde(K, 0.0);
    p_tilde[t - bank.t_min()] = 1.0;
    const PixelDataTerm term = build_data_term(scene, 0, p_tilde.data(), bank);

    const std::vector<double> beta = {1.01, 1.01};
    const auto w = newton_maximize_Q_pixel(term, beta, {0.25}, cfg);

    // Exhaustive grid search of the same objective at step 1e-3.
    double best_w = 0.0, best_f = -std::numeric_limits<double>::infinity();
    for (double cand = 1e-6; cand < 1.0; cand += 1e-3) {
      const double f = term.value(&cand) + 0.01 * std::log(cand) +
                       0.01 * std::log(1.0 - cand);
      if (f > best_f) {
        best_f = f;
        best_w = cand;
      }
    }
    CHECK(std::abs(w[0] - best_w) <= 2e-3);

    // First-order optimality at the returned point.
    std::vector<double> grad(1, 0.0);
    term.accumulate_gradient(w.data(), grad.data());
    grad[0] += 0.01 / w[0] - 0.01 / (1.0 - w[0]);
    CHECK(std::abs(grad[0]) < cfg.grad_tol);
  }
}

TEST_CASE("newton is a no-op at an already stationary point") {
  Rng rng(101);
  const auto bank = test::small_bank(1);
  const auto photons = test::draw_photons(rng, bank, {0.4}, 20, 30);
  const SceneCube scene = test::one_pixel_scene(bank.T(), photons);
  std::vector<double> p_tilde(bank.depth_bins(), 0.0);
  p_tilde[20 - bank.t_min()] = 1.0;
  const PixelDataTerm term = build_data_term(scene, 0, p_tilde.data(), bank);
  const std::vector<double> beta = {1.01, 1.01};
  const auto w1 = newton_maximize_Q_pixel(term, beta, {0.25}, {});
  const auto w2 = newton_maximize_Q_pixel(term, beta, w1, {});
  CHECK(w1[0] == w2[0]);  // bitwise
}

TEST_CASE("admm with zero prior strength matches per-pixel newton") {
  Rng rng(103);
  const auto bank = test::small_bank(1);
  const int rows = 2, cols = 2;
  std::vector<std::vector<PhotonBin>> lists;
  std::vector<int> truth;
  for (int n = 0; n < rows * cols; ++n) {
    truth.push_back(bank.t_min() + 4 + 3 * n);
    lists.push_back(
        test::draw_photons(rng, bank, {0.3 + 0.1 * n}, truth.back(), 25));
  }
  const SceneCube scene =
      SceneCube::from_toa_lists(rows, cols, bank.T(), std::move(lists));
  const int K = bank.depth_bins();
  std::vector<PixelDataTerm> data;
  for (int n = 0; n < rows * cols; ++n) {
    std::vector<double> p(K, 0.0);
    p[truth[n] - bank.t_min()] = 1.0;
    data.push_back(build_data_term(scene, n, p.data(), bank));
  }

  PriorModel prior;
  prior.kind = PriorKind::TV;
  prior.lambda = 0.0;
  WeightField W0(rows, cols, 1, 0.25);
  AdmmConfig cfg;
  cfg.tol_abs = 1e-8;
  cfg.tol_rel = 1e-8;
  cfg.max_iters = 2000;
  const auto result = admm_maximize_Q(data, prior, W0, cfg);
  CHECK(result.converged);

  const std::vector<double> flat = {1.0 + 1e-6, 1.0 + 1e-6};
  for (int n = 0; n < rows * cols; ++n) {
    const auto w = newton_maximize_Q_pixel(data[n], flat, {0.25}, {});
    CHECK(std::abs(result.W(n, 0) - w[0]) <= 1e-4);
  }
}

TEST_CASE("admm keeps pure-background weights near zero") {
  const auto bank = test::small_bank(1);
  const int rows = 2, cols = 2;
  const int K = bank.depth_bins();
  // One photon per pixel, far away from the conditioning depth: the MLE is
  // w = 0 and the projection keeps feasibility.
  std::vector<std::vector<PhotonBin>> lists(rows * cols, {{2, 1}});
  const SceneCube scene =
      SceneCube::from_toa_lists(rows, cols, bank.T(), std::move(lists));
  std::vector<PixelDataTerm> data;
  for (int n = 0; n < rows * cols; ++n) {
    std::vector<double> p(K, 0.0);
    p[K - 1] = 1.0;
    data.push_back(build_data_term(scene, n, p.data(), bank));
  }
  PriorModel prior;
  prior.kind = PriorKind::TV;
  prior.lambda = 10.0;
  WeightField W0(rows, cols, 1, 0.25);
  const auto result = admm_maximize_Q(data, prior, W0, {});
  for (int n = 0; n < rows * cols; ++n) {
    CHECK(result.W(n, 0) >= 0.0);
    CHECK(result.W(n, 0) < 0.02);
  }
}

TEST_CASE("admm objective never falls below the starting surrogate and grows with budget") {
  Rng rng(107);
  const auto bank = test::small_bank(1);
  const int rows = 4, cols = 4;
  std::vector<std::vector<PhotonBin>> lists;
  for (int n = 0; n < rows * cols; ++n)
    lists.push_back(test::draw_photons(rng, bank, {0.4}, bank.t_min() + 6, 12));
  const SceneCube scene =
      SceneCube::from_toa_lists(rows, cols, bank.T(), std::move(lists));
  const int K = bank.depth_bins();
  std::vector<PixelDataTerm> data;
  for (int n = 0; n < rows * cols; ++n) {
    std::vector<double> p(K, 0.0);
    p[6] = 1.0;
    data.push_back(build_data_term(scene, n, p.data(), bank));
  }
  PriorModel prior;
  prior.kind = PriorKind::TV;
  prior.lambda = 5.0;
  WeightField W0(rows, cols, 1, 0.25);

  double prev = -std::numeric_limits<double>::infinity();
  for (int budget : {1, 3, 10, 40, 150}) {
    AdmmConfig cfg;
    cfg.max_iters = budget;
    const auto result = admm_maximize_Q(data, prior, W0, cfg);
    CHECK(result.objective >= prev - 1e-9);
    prev = result.objective;
    CHECK(result.W.in_simplex(1e-12));
  }
}

TEST_CASE("admm with the Laplacian prior converges and smooths") {
  Rng rng(109);
  const auto bank = test::small_bank(1);
  const int rows = 4, cols = 4;
  std::vector<std::vector<PhotonBin>> lists;
  for (int n = 0; n < rows * cols; ++n)
    lists.push_back(test::draw_photons(
        rng, bank, {n % 2 == 0 ? 0.55 : 0.25}, bank.t_min() + 6, 20));
  const SceneCube scene =
      SceneCube::from_toa_lists(rows, cols, bank.T(), std::move(lists));
  const int K = bank.depth_bins();
  std::vector<PixelDataTerm> data;
  for (int n = 0; n < rows * cols; ++n) {
    std::vector<double> p(K, 0.0);
    p[6] = 1.0;
    data.push_back(build_data_term(scene, n, p.data(), bank));
  }
  PriorModel noprior;
  noprior.kind = PriorKind::Lap;
  noprior.lambda = 0.0;
  PriorModel strong = noprior;
  strong.lambda = 500.0;
  WeightField W0(rows, cols, 1, 0.25);
  const auto free_fit = admm_maximize_Q(data, noprior, W0, {});
  const auto smooth_fit = admm_maximize_Q(data, strong, W0, {});
  const auto spread = [&](const WeightField& W) {
    double lo = 1.0, hi = 0.0;
    for (int n = 0; n < W.pixels(); ++n) {
      lo = std::min(lo, W(n, 0));
      hi = std::max(hi, W(n, 0));
    }
    return hi - lo;
  };
  CHECK(spread(smooth_fit.W) < spread(free_fit.W));
}

TEST_CASE("beta update is symmetric, clamps under a huge rate, and matches golden section") {
  // Symmetry: one pixel at the uniform point.
  {
    WeightField W(1, 1, 2, 1.0 / 3.0);
    const auto beta = newton_update_beta(W, {}, 0.25, {2.0, 2.0, 2.0});
    CHECK(beta[0] == doctest::Approx(beta[1]).epsilon(1e-7));
    CHECK(beta[1] == doctest::Approx(beta[2]).epsilon(1e-7));
  }
  // theta -> infinity drives beta to the truncation clamp.
  {
    WeightField W(1, 1, 2, 1.0 / 3.0);
    const auto beta = newton_update_beta(W, {}, 1e9, {2.0, 2.0, 2.0});
    for (double b : beta) CHECK(b == doctest::Approx(1.0 + 1e-6).epsilon(1e-9));
  }
  // Golden-section oracle per coordinate on a 3-pixel toy.
  {
    Rng rng(113);
    WeightField W(1, 3, 2);
    for (int n = 0; n < 3; ++n) {
      const auto w = test::random_interior(rng, 2, 0.2);
      for (int l = 0; l < 2; ++l) W(n, l) = w[l];
    }
    const double theta = 0.25;
    const auto beta = newton_update_beta(W, {}, theta, {2.0, 2.0, 2.0});

    std::vector<double> sums(3, 0.0);
    for (int n = 0; n < 3; ++n) {
      sums[0] += std::log(W(n, 0));
      sums[1] += std::log(W(n, 1));
      sums[2] += std::log(1.0 - W(n, 0) - W(n, 1));
    }
    const auto f1 = [&](int l, double bl) {
      double B = bl;
      for (int m = 0; m < 3; ++m)
        if (m != l) B += beta[m];
      return 3.0 * (std::lgamma(B) - std::lgamma(bl)) + (bl - 1.0) * sums[l] -
             theta * bl;
    };
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int l = 0; l < 3; ++l) {
      double lo = 1.0 + 1e-6, hi = 50.0;
      double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
      for (int it = 0; it < 200; ++it) {
        if (f1(l, x1) < f1(l, x2)) {
          lo = x1;
          x1 = x2;
          x2 = lo + golden * (hi - lo);
        } else {
          hi = x2;
          x2 = x1;
          x1 = hi - golden * (hi - lo);
        }
      }
      CHECK(std::abs(beta[l] - 0.5 * (lo + hi)) <= 1e-4);
    }
  }
}

TEST_CASE("tv prox basics") {
  // Constant image is a fixed point.
  std::vector<double> v(16, 0.7), out(16);
  tv_prox(v.data(), 4, 4, 1.0, 50, out.data());
  for (double x : out) CHECK(x == doctest::Approx(0.7).epsilon(1e-12));

  // tau = 0 is the identity.
  Rng rng(127);
  for (auto& x : v) x = rng.next_unit();
  tv_prox(v.data(), 4, 4, 0.0, 50, out.data());
  CHECK(out == v);

  // Positive tau reduces total variation.
  tv_prox(v.data(), 4, 4, 0.5, 100, out.data());
  CHECK(tv_norm(out.data(), 4, 4) < tv_norm(v.data(), 4, 4));
}

TEST_CASE("lap prox solves its linear system") {
  Rng rng(131);
  const int rows = 5, cols = 4, N = rows * cols;
  std::vector<double> v(N), x(N), lap(N), lap2(N);
  for (auto& e : v) e = rng.next_unit();
  const double weight = 0.8;
  lap_prox(v.data(), rows, cols, weight, 1e-12, x.data());
  laplacian_apply(x.data(), rows, cols, lap.data());
  laplacian_apply(lap.data(), rows, cols, lap2.data());
  for (int n = 0; n < N; ++n)
    CHECK(x[n] + weight * lap2[n] == doctest::Approx(v[n]).epsilon(1e-8));
}
