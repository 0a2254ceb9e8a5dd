#include "swmsl/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "swmsl/clustering.hpp"
#include "swmsl/forward_model.hpp"
#include "swmsl/reflectivity.hpp"
#include "swmsl/xcorr.hpp"

namespace swmsl {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

Reconstruction reconstruct_scene(const SceneCube& scene, const IrfBank& bank,
                                 const std::string& method,
                                 const SemOptions& opts) {
  Reconstruction rec;
  const auto t0 = Clock::now();

  if (method == "xcorr") {
    rec.depth = xcorr_depth(scene, bank);
    rec.W = xcorr_weights(scene, rec.depth, bank, opts.newton);
    rec.sem_seconds = seconds_since(t0);
    rec.depth_seconds = 0.0;
  } else {
    PriorModel prior;
    prior.kind = prior_kind_from_name(method);
    prior.lambda = opts.hyper.lambda;
    prior.kappa = opts.hyper.kappa;
    prior.theta = opts.hyper.theta;
    if (prior.kind == PriorKind::CDirichlet) {
      const auto clusters = cluster_pixels(scene, bank, opts);
      prior.clusters = clusters.labels;
      prior.n_clusters = clusters.n_clusters;
      rec.cluster_map = clusters.labels;
    }
    SemResult sem = run_sem(scene, bank, prior, opts);
    rec.sem_seconds = seconds_since(t0);
    rec.W = std::move(sem.W);
    rec.phi = std::move(sem.phi);
    rec.trace = std::move(sem.trace);
    rec.n_iter = sem.total_iters;
    rec.burnin_converged = sem.burnin_converged;

    const auto t1 = Clock::now();
    DepthEstimate est =
        estimate_depth(scene, bank, rec.W, opts.hyper.epsilon,
                       opts.hyper.gibbs_iters, opts.hyper.gibbs_burnin,
                       opts.seed);
    rec.depth_seconds = seconds_since(t1);
    rec.depth = std::move(est.depth);
    rec.entropy = std::move(est.entropy);
  }

  std::vector<double> ybar(scene.pixels());
  for (int n = 0; n < scene.pixels(); ++n)
    ybar[n] = static_cast<double>(scene.ybar(n));
  const auto y_hat = denoise_counts(ybar, scene.rows(), scene.cols());
  rec.refl = estimate_reflectivity(rec.W, y_hat, bank);
  return rec;
}

std::vector<CellResult> run_grid(const GroundTruth& truth, const IrfBank& bank,
                                 const GridSpec& spec, const SemOptions& opts) {
  std::vector<CellResult> cells;
  for (double alpha : spec.alphas) {
    for (double gammaT : spec.gammaTs) {
      for (std::uint64_t seed : spec.seeds) {
        SimConfig sim;
        sim.alpha = alpha;
        sim.gammaT = gammaT;
        sim.seed = seed;
        SceneCube scene = simulate(sim, truth, bank);
        const ReflectivityCube truth_scaled = scaled_truth(truth, sim, bank);
        const double sbr_value = gammaT > 0.0 ? sbr(truth_scaled, bank) : 0.0;
        const double counts_mean =
            static_cast<double>(scene.total_counts()) / scene.pixels();

        for (const auto& method : spec.methods) {
          CellResult cell;
          cell.alpha = alpha;
          cell.gammaT = gammaT;
          cell.method = method;
          cell.seed = seed;
          cell.counts_mean = counts_mean;
          cell.sbr_value = sbr_value;
          try {
            SemOptions cell_opts = opts;
            cell_opts.seed = seed;
            const Reconstruction rec =
                reconstruct_scene(scene, bank, method, cell_opts);
            cell.mse_r = reflectivity_mse(rec.refl, truth_scaled);
            cell.cdf = depth_error_cdf(rec.depth, truth.depth);
            cell.n_iter = rec.n_iter;
            cell.total_sec = rec.sem_seconds;
            cell.depth_sec = rec.depth_seconds;
            cell.sec_per_iter =
                rec.n_iter > 0 ? rec.sem_seconds / rec.n_iter : 0.0;
          } catch (const Error& e) {
            cell.ok = false;
            cell.error = e.what();
          }
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

namespace {

// Pointwise average of CDFs; shorter tables are extended with 1.0.
CdfTable average_cdfs(const std::vector<const CdfTable*>& tables) {
  CdfTable out;
  std::size_t max_len = 0;
  for (const auto* t : tables) max_len = std::max(max_len, t->threshold.size());
  out.threshold.resize(max_len);
  out.fraction.assign(max_len, 0.0);
  for (std::size_t e = 0; e < max_len; ++e) {
    out.threshold[e] = static_cast<int>(e);
    for (const auto* t : tables)
      out.fraction[e] += e < t->fraction.size() ? t->fraction[e] : 1.0;
    out.fraction[e] /= tables.size();
  }
  return out;
}

}  // namespace

std::vector<CellResult> aggregate_cells(const std::vector<CellResult>& cells) {
  std::map<std::tuple<double, double, std::string>, std::vector<const CellResult*>>
      groups;
  for (const auto& c : cells)
    groups[{c.alpha, c.gammaT, c.method}].push_back(&c);

  std::vector<CellResult> out;
  for (const auto& [key, members] : groups) {
    CellResult agg;
    agg.alpha = std::get<0>(key);
    agg.gammaT = std::get<1>(key);
    agg.method = std::get<2>(key);
    agg.seed = 0;
    int ok_count = 0;
    std::vector<const CdfTable*> cdfs;
    for (const auto* m : members) {
      if (!m->ok) {
        agg.ok = false;
        agg.error = m->error;
        continue;
      }
      ++ok_count;
      agg.counts_mean += m->counts_mean;
      agg.sbr_value += m->sbr_value;
      agg.mse_r += m->mse_r;
      agg.n_iter += m->n_iter;
      agg.sec_per_iter += m->sec_per_iter;
      agg.total_sec += m->total_sec;
      agg.depth_sec += m->depth_sec;
      cdfs.push_back(&m->cdf);
    }
    if (ok_count > 0) {
      agg.counts_mean /= ok_count;
      agg.sbr_value /= ok_count;
      agg.mse_r /= ok_count;
      agg.n_iter = (agg.n_iter + ok_count / 2) / ok_count;
      agg.sec_per_iter /= ok_count;
      agg.total_sec /= ok_count;
      agg.depth_sec /= ok_count;
      agg.cdf = average_cdfs(cdfs);
    }
    out.push_back(std::move(agg));
  }
  return out;
}

std::vector<TimingRow> timing_report(const std::vector<CellResult>& cells) {
  std::vector<TimingRow> rows;
  for (const auto& c : aggregate_cells(cells)) {
    if (!c.ok) continue;
    TimingRow row;
    row.alpha = c.alpha;
    row.gammaT = c.gammaT;
    row.method = c.method;
    row.n_iter = c.n_iter;
    row.sec_per_iter = c.sec_per_iter;
    row.total_sec = c.total_sec;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace swmsl
