#pragma once

#include <cstdint>
#include <vector>

#include "swmsl/sem.hpp"
#include "swmsl/types.hpp"

namespace swmsl {

/// Coarse weight field: a truncated W-Dirichlet SEM run (last iterate, no
/// averaging). n_coarse = 0 returns the initialization.
WeightField coarse_weight_estimate(const SceneCube& scene, const IrfBank& bank,
                                   const SemOptions& opts, int n_coarse);

/// Vectorized patch (side x side x L) around every pixel with replicated-edge
/// padding; windows are concatenated in row-major order. Returns N rows of
/// length side*side*L.
std::vector<double> extract_patches(const WeightField& W, int side);

struct KmeansResult {
  std::vector<int> labels;  // pixel -> cluster, compacted to [0, n_clusters)
  int n_clusters = 0;
  bool degenerate = false;  // fewer distinct points than requested clusters
};

/// Lloyd's algorithm with k-means++ seeding and the l2 distance; empty
/// clusters are reseeded from the point farthest from its center.
/// Deterministic under the seed.
KmeansResult kmeans_cluster(const std::vector<double>& points, int n, int dim,
                            int C, std::uint64_t seed);

/// Full C-Dirichlet group construction: coarse SEM pass, patch extraction,
/// k-means.
KmeansResult cluster_pixels(const SceneCube& scene, const IrfBank& bank,
                            const SemOptions& opts);

}  // namespace swmsl
