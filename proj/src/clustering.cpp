#include "swmsl/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "swmsl/parallel.hpp"
#include "swmsl/rng.hpp"

namespace swmsl {

WeightField coarse_weight_estimate(const SceneCube& scene, const IrfBank& bank,
                                   const SemOptions& opts, int n_coarse) {
  if (n_coarse < 0)
    throw ValidationError("coarse_weight_estimate: n_coarse must be >= 0");
  SemOptions coarse = opts;
  coarse.fixed_iters = n_coarse;
  coarse.record_q = false;
  PriorModel prior;
  prior.kind = PriorKind::WDirichlet;
  prior.kappa = opts.hyper.kappa;
  return run_sem(scene, bank, prior, coarse).W;
}

std::vector<double> extract_patches(const WeightField& W, int side) {
  if (side < 1 || side % 2 == 0)
    throw ValidationError("extract_patches: patch side must be odd and >= 1");
  const int rows = W.rows(), cols = W.cols(), L = W.L();
  const int half = side / 2;
  const int dim = side * side * L;
  std::vector<double> patches(static_cast<std::size_t>(W.pixels()) * dim);
  parallel_for(static_cast<std::size_t>(W.pixels()), [&](std::size_t n) {
    const int i = static_cast<int>(n) / cols, j = static_cast<int>(n) % cols;
    double* out = patches.data() + n * dim;
    int idx = 0;
    for (int di = -half; di <= half; ++di) {
      const int ii = std::clamp(i + di, 0, rows - 1);
      for (int dj = -half; dj <= half; ++dj) {
        const int jj = std::clamp(j + dj, 0, cols - 1);
        const int m = ii * cols + jj;
        for (int l = 0; l < L; ++l) out[idx++] = W(m, l);
      }
    }
  });
  return patches;
}

namespace {

double sq_dist(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

}  // namespace

KmeansResult kmeans_cluster(const std::vector<double>& points, int n, int dim,
                            int C, std::uint64_t seed) {
  if (n < 1 || dim < 1) throw ValidationError("kmeans_cluster: empty input");
  if (C < 1 || C > n)
    throw ValidationError("kmeans_cluster: need 1 <= C <= n points");
  if (points.size() != static_cast<std::size_t>(n) * dim)
    throw ValidationError("kmeans_cluster: point buffer size mismatch");

  KmeansResult result;
  // Count distinct points; k-means cannot produce more nonempty clusters.
  std::map<std::vector<double>, int> distinct;
  for (int i = 0; i < n; ++i) {
    std::vector<double> key(points.begin() + static_cast<std::size_t>(i) * dim,
                            points.begin() + static_cast<std::size_t>(i + 1) * dim);
    distinct.emplace(std::move(key), i);
  }
  int k = C;
  if (static_cast<int>(distinct.size()) < C) {
    k = static_cast<int>(distinct.size());
    result.degenerate = true;  // DegenerateInput: fewer clusters returned
  }

  // k-means++ seeding.
  Rng rng(mix64(seed, 0x6b6d65616e73ULL));
  std::vector<double> centers(static_cast<std::size_t>(k) * dim);
  std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
  {
    const int first = static_cast<int>(rng.next_unit() * n);
    std::copy(points.begin() + static_cast<std::size_t>(first) * dim,
              points.begin() + static_cast<std::size_t>(first + 1) * dim,
              centers.begin());
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d2 =
            sq_dist(points.data() + static_cast<std::size_t>(i) * dim,
                    centers.data() + static_cast<std::size_t>(c - 1) * dim, dim);
        min_d2[i] = std::min(min_d2[i], d2);
        total += min_d2[i];
      }
      int pick = 0;
      if (total > 0.0) {
        const double u = rng.next_unit() * total;
        double cum = 0.0;
        for (int i = 0; i < n; ++i) {
          cum += min_d2[i];
          if (u < cum) {
            pick = i;
            break;
          }
          pick = i;
        }
      } else {
        pick = static_cast<int>(rng.next_unit() * n);
      }
      std::copy(points.begin() + static_cast<std::size_t>(pick) * dim,
                points.begin() + static_cast<std::size_t>(pick + 1) * dim,
                centers.begin() + static_cast<std::size_t>(c) * dim);
    }
  }

  std::vector<int> labels(n, 0), new_labels(n, 0);
  std::vector<int> counts(k, 0);
  for (int iter = 0; iter < 100; ++iter) {
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      const double* p = points.data() + i * dim;
      int best = 0;
      double best_d2 = sq_dist(p, centers.data(), dim);
      for (int c = 1; c < k; ++c) {
        const double d2 =
            sq_dist(p, centers.data() + static_cast<std::size_t>(c) * dim, dim);
        if (d2 < best_d2) {
          best_d2 = d2;
          best = c;
        }
      }
      new_labels[i] = best;
    });
    const bool changed = new_labels != labels;
    labels = new_labels;
    if (!changed && iter > 0) break;

    std::fill(centers.begin(), centers.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      ++counts[labels[i]];
      const double* p = points.data() + static_cast<std::size_t>(i) * dim;
      double* c = centers.data() + static_cast<std::size_t>(labels[i]) * dim;
      for (int d = 0; d < dim; ++d) c[d] += p[d];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      double* ctr = centers.data() + static_cast<std::size_t>(c) * dim;
      for (int d = 0; d < dim; ++d) ctr[d] /= counts[c];
    }
    // Reseed empty clusters from the point farthest from its center.
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      int far = 0;
      double far_d2 = -1.0;
      for (int i = 0; i < n; ++i) {
        const double d2 = sq_dist(
            points.data() + static_cast<std::size_t>(i) * dim,
            centers.data() + static_cast<std::size_t>(labels[i]) * dim, dim);
        if (d2 > far_d2) {
          far_d2 = d2;
          far = i;
        }
      }
      std::copy(points.begin() + static_cast<std::size_t>(far) * dim,
                points.begin() + static_cast<std::size_t>(far + 1) * dim,
                centers.begin() + static_cast<std::size_t>(c) * dim);
      labels[far] = c;
    }
  }

  // Compact labels so clusters are nonempty and contiguous.
  std::vector<int> remap(k, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (remap[labels[i]] < 0) remap[labels[i]] = next++;
    labels[i] = remap[labels[i]];
  }
  result.labels = std::move(labels);
  result.n_clusters = next;
  if (result.n_clusters < C) result.degenerate = true;
  return result;
}

KmeansResult cluster_pixels(const SceneCube& scene, const IrfBank& bank,
                            const SemOptions& opts) {
  const WeightField coarse =
      coarse_weight_estimate(scene, bank, opts, opts.hyper.coarse_iters);
  const int side = opts.hyper.patch;
  const auto patches = extract_patches(coarse, side);
  return kmeans_cluster(patches, scene.pixels(), side * side * bank.L(),
                        std::min(opts.hyper.clusters, scene.pixels()),
                        opts.seed);
}

}  // namespace swmsl
