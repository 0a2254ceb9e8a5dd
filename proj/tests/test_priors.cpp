#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "swmsl/priors.hpp"
#include "swmsl/rng.hpp"

using namespace swmsl;

namespace {

WeightField random_field(Rng& rng, int rows, int cols, int L,
                         double margin = 0.1) {
  WeightField W(rows, cols, L);
  for (int n = 0; n < W.pixels(); ++n) {
    const auto w = test::random_interior(rng, L, margin);
    for (int l = 0; l < L; ++l) W(n, l) = w[l];
  }
  return W;
}

PriorModel model_of(PriorKind kind, int n_pixels = 0) {
  PriorModel m;
  m.kind = kind;
  if (kind == PriorKind::CDirichlet) {
    m.n_clusters = 2;
    m.clusters.resize(n_pixels);
    for (int n = 0; n < n_pixels; ++n) m.clusters[n] = n % 2;
  }
  return m;
}

DirichletParams phi_of(PriorKind kind, int L) {
  DirichletParams phi;
  if (kind == PriorKind::GDirichlet)
    phi.beta = {std::vector<double>(L + 1, 2.0)};
  else if (kind == PriorKind::CDirichlet)
    phi.beta = {std::vector<double>(L + 1, 2.0),
                std::vector<double>(L + 1, 3.0)};
  return phi;
}

}  // namespace

TEST_CASE("TV and Lap priors vanish on constant images") {
  WeightField W(4, 5, 2, 0.2);
  CHECK(log_prior_w(W, model_of(PriorKind::TV)) == 0.0);
  CHECK(log_prior_w(W, model_of(PriorKind::Lap)) == 0.0);
}

TEST_CASE("W-Dirichlet log prior, single pixel direct evaluation") {
  WeightField W(1, 1, 1, 0.5);
  PriorModel m = model_of(PriorKind::WDirichlet);
  m.kappa = 2.0;
  // beta = (2,2): (2-1)log 0.5 + (2-1)log 0.5.
  CHECK(log_prior_w(W, m) == doctest::Approx(2.0 * std::log(0.5)).epsilon(1e-14));
}

TEST_CASE("Dirichlet priors demand interior points") {
  WeightField W(1, 1, 1, 0.0);
  PriorModel m = model_of(PriorKind::WDirichlet);
  CHECK_THROWS_WITH_AS(log_prior_w(W, m), doctest::Contains("BoundaryPoint"),
                       ValidationError);
  WeightField full(1, 1, 1, 1.0);
  CHECK_THROWS_WITH_AS(log_prior_w(full, m), doctest::Contains("BoundaryPoint"),
                       ValidationError);
}

TEST_CASE("Dirichlet priors are pixel-separable") {
  Rng rng(41);
  for (PriorKind kind :
       {PriorKind::WDirichlet, PriorKind::GDirichlet, PriorKind::CDirichlet}) {
    const int L = 2;
    const WeightField W = random_field(rng, 1, 2, L);
    const PriorModel m = model_of(kind, 2);
    const DirichletParams phi = phi_of(kind, L);

    WeightField a(1, 1, L), b(1, 1, L);
    for (int l = 0; l < L; ++l) {
      a(0, l) = W(0, l);
      b(0, l) = W(1, l);
    }
    PriorModel ma = m, mb = m;
    DirichletParams phia = phi, phib = phi;
    if (kind == PriorKind::CDirichlet) {
      ma.clusters = {0};
      ma.n_clusters = 1;
      phia.beta = {phi.beta[0]};
      mb.clusters = {0};
      mb.n_clusters = 1;
      phib.beta = {phi.beta[1]};
    }
    CHECK(log_prior_w(W, m, phi) ==
          doctest::Approx(log_prior_w(a, ma, phia) + log_prior_w(b, mb, phib))
              .epsilon(1e-12));
  }
}

TEST_CASE("MRF priors are invariant to per-band constant shifts") {
  Rng rng(43);
  const WeightField W = random_field(rng, 4, 4, 2, 0.4);
  WeightField shifted = W;
  for (int n = 0; n < W.pixels(); ++n) shifted(n, 0) += 0.05;
  REQUIRE(shifted.in_simplex());
  for (PriorKind kind : {PriorKind::TV, PriorKind::Lap}) {
    const PriorModel m = model_of(kind);
    CHECK(log_prior_w(W, m) ==
          doctest::Approx(log_prior_w(shifted, m)).epsilon(1e-10));
  }
}

TEST_CASE("gradients match central finite differences") {
  Rng rng(47);
  const int rows = 3, cols = 3, L = 2;
  const double h = 1e-6;
  for (PriorKind kind : {PriorKind::Lap, PriorKind::WDirichlet,
                         PriorKind::GDirichlet, PriorKind::CDirichlet}) {
    const PriorModel m = model_of(kind, rows * cols);
    const DirichletParams phi = phi_of(kind, L);
    for (int point = 0; point < 10; ++point) {
      WeightField W = random_field(rng, rows, cols, L);
      const auto grad = grad_log_prior_w(W, m, phi);
      for (int n = 0; n < W.pixels(); ++n) {
        for (int l = 0; l < L; ++l) {
          WeightField plus = W, minus = W;
          plus(n, l) += h;
          minus(n, l) -= h;
          const double fd =
              (log_prior_w(plus, m, phi) - log_prior_w(minus, m, phi)) /
              (2 * h);
          const double g = grad[static_cast<std::size_t>(n) * L + l];
          CHECK(std::abs(fd - g) <= 1e-5 * std::max(1.0, std::abs(g)));
        }
      }
    }
  }
}

TEST_CASE("W-Dirichlet gradient has the closed form") {
  Rng rng(53);
  const int L = 3;
  WeightField W = random_field(rng, 1, 1, L);
  PriorModel m = model_of(PriorKind::WDirichlet);
  m.kappa = 1.7;
  const auto grad = grad_log_prior_w(W, m);
  const double bg = W.background(0);
  for (int l = 0; l < L; ++l)
    CHECK(grad[l] == doctest::Approx((m.kappa - 1.0) *
                                     (1.0 / W(0, l) - 1.0 / bg))
                         .epsilon(1e-12));
}

TEST_CASE("Lap gradient vanishes on constant images") {
  WeightField W(4, 4, 1, 0.3);
  const auto grad = grad_log_prior_w(W, model_of(PriorKind::Lap));
  for (double g : grad) CHECK(g == 0.0);
}

TEST_CASE("TV prior has no gradient") {
  WeightField W(2, 2, 1, 0.3);
  CHECK_THROWS_WITH_AS(grad_log_prior_w(W, model_of(PriorKind::TV)),
                       doctest::Contains("NotDifferentiable"), NumericalError);
}

TEST_CASE("all priors are concave along random interior segments") {
  Rng rng(59);
  const int rows = 3, cols = 3, L = 2;
  for (PriorKind kind : {PriorKind::TV, PriorKind::Lap, PriorKind::WDirichlet,
                         PriorKind::GDirichlet, PriorKind::CDirichlet}) {
    const PriorModel m = model_of(kind, rows * cols);
    const DirichletParams phi = phi_of(kind, L);
    for (int seg = 0; seg < 20; ++seg) {
      const WeightField A = random_field(rng, rows, cols, L);
      const WeightField B = random_field(rng, rows, cols, L);
      WeightField mid(rows, cols, L);
      for (std::size_t i = 0; i < mid.data().size(); ++i)
        mid.data()[i] = 0.5 * (A.data()[i] + B.data()[i]);
      const double chord =
          0.5 * (log_prior_w(A, m, phi) + log_prior_w(B, m, phi));
      CHECK(log_prior_w(mid, m, phi) >= chord - 1e-9);
    }
  }
}

TEST_CASE("beta hyperprior: truncation, direct value, monotonicity") {
  CHECK(log_prior_beta({0.5, 2.0}, 0.25) ==
        -std::numeric_limits<double>::infinity());
  CHECK(log_prior_beta({2.0, 2.0}, 0.25) ==
        doctest::Approx(2.0 * (std::log(0.25) - 0.5)).epsilon(1e-14));
  const double base = log_prior_beta({2.0, 2.0}, 0.25);
  CHECK(log_prior_beta({2.5, 2.0}, 0.25) < base);
  CHECK(log_prior_beta({2.0, 3.0}, 0.25) < base);
}

TEST_CASE("depth prior values") {
  DepthField flat(3, 3, 400);
  CHECK(log_prior_t(flat, 0.05) == 0.0);

  DepthField pair(1, 2, 0);
  pair[0] = 300;
  pair[1] = 310;
  CHECK(log_prior_t(pair, 0.05) == doctest::Approx(-0.5).epsilon(1e-14));

  // Moving a pixel away from its neighbors' range only lowers the prior.
  DepthField img(2, 2, 400);
  double prev = log_prior_t(img, 0.05);
  for (int step = 1; step <= 5; ++step) {
    img[3] = 400 + 10 * step;
    const double cur = log_prior_t(img, 0.05);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("conditional depth logits: prior-only and likelihood-only cases") {
  const auto bank = test::delta_bank();
  const int K = bank.depth_bins();

  // No photons, isolated pixel: uniform logits.
  {
    const SceneCube empty = test::one_pixel_scene(bank.T(), {});
    const double w = 0.2;
    DepthField t(1, 1, bank.t_min());
    const auto logits = conditional_t_logits(0, t, &w, 1, empty, bank, 0.0);
    for (double v : logits) CHECK(v == 0.0);
  }

  // No photons, one neighbor at k0: logits are -eps|k - k0| with mode at k0.
  {
    SceneCube empty = SceneCube::from_toa_lists(1, 2, bank.T(), {{}, {}});
    DepthField t(1, 2, bank.t_min());
    const int k0 = bank.t_min() + 7;
    t[1] = k0;
    const double w = 0.2;
    const auto logits = conditional_t_logits(0, t, &w, 1, empty, bank, 0.05);
    int mode = 0;
    for (int k = 0; k < K; ++k) {
      CHECK(logits[k] == doctest::Approx(-0.05 * std::abs(k + bank.t_min() - k0))
                             .epsilon(1e-12));
      if (logits[k] > logits[mode]) mode = k;
    }
    CHECK(mode + bank.t_min() == k0);
  }

  // One photon, delta IRF, w = 1, eps = 0: all mass at the photon bin.
  {
    const int s = bank.t_min() + 5;
    const SceneCube one = test::one_pixel_scene(bank.T(), {{s, 1}});
    const double w = 1.0;
    DepthField t(1, 1, bank.t_min());
    const auto logits = conditional_t_logits(0, t, &w, 1, one, bank, 0.0);
    for (int k = 0; k < K; ++k) {
      if (k + bank.t_min() == s)
        CHECK(logits[k] == doctest::Approx(0.0));
      else
        CHECK(logits[k] == -std::numeric_limits<double>::infinity());
    }
  }
}

TEST_CASE("conditional logits with eps = 0 equal the likelihood profile") {
  const auto bank = test::small_bank(2);
  Rng rng(61);
  const auto w = test::random_interior(rng, 2);
  const auto photons = test::draw_photons(rng, bank, w, 25, 40);
  const SceneCube scene = test::one_pixel_scene(bank.T(), photons);
  DepthField t(1, 1, bank.t_min());
  const auto logits = conditional_t_logits(0, t, w.data(), 2, scene, bank, 0.0);
  const auto profile = likelihood_profile(scene, 0, w.data(), 2, bank);
  REQUIRE(logits.size() == profile.size());
  for (std::size_t k = 0; k < logits.size(); ++k)
    CHECK(logits[k] == doctest::Approx(profile[k]).epsilon(1e-12));
}

TEST_CASE("likelihood profile matches direct photon_pdf evaluation") {
  const auto bank = test::small_bank(3);
  Rng rng(67);
  for (int trial = 0; trial < 10; ++trial) {
    const auto w = test::random_interior(rng, 3);
    const auto photons = test::draw_photons(rng, bank, w, 22, 30);
    const SceneCube scene = test::one_pixel_scene(bank.T(), photons);
    const auto profile = likelihood_profile(scene, 0, w.data(), 3, bank);
    for (int k = bank.t_min(); k <= bank.t_max(); k += 7) {
      double direct = 0.0;
      for (const auto& p : photons)
        direct += p.count * std::log(photon_pdf(p.bin, w.data(), 3, k, bank));
      CHECK(profile[k - bank.t_min()] == doctest::Approx(direct).epsilon(1e-10));
    }
  }
}
