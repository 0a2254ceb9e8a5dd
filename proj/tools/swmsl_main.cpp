#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swmsl/clustering.hpp"
#include "swmsl/depth.hpp"
#include "swmsl/evaluation.hpp"
#include "swmsl/forward_model.hpp"
#include "swmsl/io.hpp"
#include "swmsl/phantom.hpp"
#include "swmsl/reflectivity.hpp"
#include "swmsl/sem.hpp"
#include "swmsl/types.hpp"
#include "swmsl/xcorr.hpp"

namespace {

using swmsl::SemOptions;

std::string join_args(int argc, char** argv) {
  std::ostringstream ss;
  for (int i = 0; i < argc; ++i) ss << (i ? " " : "") << argv[i];
  return ss.str();
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

// Shared hyperparameter flags; every stochastic command takes --seed.
void add_hyper_options(CLI::App* cmd, SemOptions& opts) {
  cmd->add_option("--lambda", opts.hyper.lambda, "MRF strength (TV/Lap)");
  cmd->add_option("--epsilon", opts.hyper.epsilon, "depth TV strength");
  cmd->add_option("--kappa", opts.hyper.kappa, "fixed Dirichlet parameter");
  cmd->add_option("--theta", opts.hyper.theta, "exponential hyperprior rate");
  cmd->add_option("--d-eps", opts.hyper.d_eps, "burn-in stopping threshold");
  cmd->add_option("--n-extra", opts.hyper.n_extra, "post-burn-in iterations");
  cmd->add_option("--burnin-cap", opts.hyper.burnin_cap, "burn-in hard cap");
  cmd->add_option("--clusters", opts.hyper.clusters, "C-Dirichlet cluster count");
  cmd->add_option("--patch", opts.hyper.patch, "clustering patch side");
  cmd->add_option("--gibbs-iters", opts.hyper.gibbs_iters,
                  "depth sampler iterations");
  cmd->add_option("--gibbs-burnin", opts.hyper.gibbs_burnin,
                  "depth sampler burn-in");
  cmd->add_option("--sweeps", opts.hyper.e_step_sweeps, "Gibbs passes per E-step");
  cmd->add_option("--coarse-iters", opts.hyper.coarse_iters,
                  "W-Dirichlet iterations before clustering");
  cmd->add_option("--beta-init", opts.hyper.beta_init,
                  "initial Dirichlet parameters (G-/C-Dirichlet)");
  cmd->add_option("--truncation-radius", opts.truncation_radius,
                  "candidate-depth truncation radius (0 = full window)");
  cmd->add_option("--seed", opts.seed, "RNG seed");
}

std::vector<double> parse_reals(const std::string& csv) {
  std::vector<double> out;
  std::istringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::istringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoull(tok));
  return out;
}

std::vector<std::string> parse_names(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

swmsl::IrfBank load_irf(const std::string& path, int builtin_bands) {
  if (!path.empty()) return swmsl::read_irf(path);
  return swmsl::make_default_irf(builtin_bands);
}

swmsl::GroundTruth load_truth(const std::string& path, int builtin_bands) {
  if (!path.empty()) return swmsl::read_truth(path);
  return swmsl::make_phantom(32, 32, builtin_bands);
}

int run_cli(int argc, char** argv) {
  CLI::App app{
      "Depth and multispectral reflectivity reconstruction from "
      "single-waveform single-photon Lidar histograms"};
  app.require_subcommand(1);
  const std::string command_line = join_args(argc, argv);

  // --- simulate ---------------------------------------------------------
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Draw a synthetic scene from truth profiles and an IRF bank");
  std::string sim_truth, sim_irf, sim_out;
  swmsl::SimConfig sim_cfg;
  int sim_bands = 1;
  bool sim_dense = false;
  sim_cmd->add_option("--truth", sim_truth,
                      "truth profile file (default: bundled phantom)");
  sim_cmd->add_option("--irf", sim_irf, "IRF bank file (default: bundled IRF)");
  sim_cmd->add_option("--alpha", sim_cfg.alpha, "illumination scale");
  sim_cmd->add_option("--gammaT", sim_cfg.gammaT,
                      "background level gamma*T (mean background photons/alpha)");
  sim_cmd->add_option("--seed", sim_cfg.seed, "RNG seed");
  sim_cmd->add_option("--bands", sim_bands, "bands for the bundled phantom/IRF");
  sim_cmd->add_flag("--dense", sim_dense, "write the binary dense format");
  sim_cmd->add_option("--out", sim_out, "output scene path")->required();

  // --- reconstruct ------------------------------------------------------
  auto* rec_cmd = app.add_subcommand(
      "reconstruct", "Stochastic-EM reconstruction of depth and reflectivity");
  std::string rec_scene, rec_irf, rec_prior = "c-dirichlet", rec_out;
  bool rec_dense = false;
  SemOptions rec_opts;
  rec_cmd->add_option("--scene", rec_scene, "scene file")->required();
  rec_cmd->add_option("--irf", rec_irf, "IRF bank file")->required();
  rec_cmd->add_option("--prior", rec_prior,
                      "tv | lap | w-dirichlet | g-dirichlet | c-dirichlet");
  rec_cmd->add_flag("--dense-scene", rec_dense, "scene file is binary dense");
  add_hyper_options(rec_cmd, rec_opts);
  rec_cmd->add_option("--out", rec_out, "output prefix")->required();

  // --- baseline ---------------------------------------------------------
  auto* base_cmd = app.add_subcommand(
      "baseline", "Cross-correlation baseline (matched filter + ML weights)");
  std::string base_scene, base_irf, base_out;
  bool base_dense = false;
  base_cmd->add_option("--scene", base_scene, "scene file")->required();
  base_cmd->add_option("--irf", base_irf, "IRF bank file")->required();
  base_cmd->add_flag("--dense-scene", base_dense, "scene file is binary dense");
  base_cmd->add_option("--out", base_out, "output prefix")->required();

  // --- evaluate ---------------------------------------------------------
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "Run the synthetic (alpha, gamma) grid and emit CSV tables");
  std::string eval_truth, eval_irf, eval_dir;
  std::string eval_alphas = "25,100";
  std::string eval_gammas = "0.01,0.05,0.1,0.3,0.5,1,5";
  std::string eval_methods = "tv,lap,w-dirichlet,g-dirichlet,c-dirichlet,xcorr";
  std::string eval_seeds = "1,2,3";
  int eval_bands = 1;
  SemOptions eval_opts;
  eval_cmd->add_option("--truth", eval_truth,
                       "truth profile file (default: bundled phantom)");
  eval_cmd->add_option("--irf", eval_irf, "IRF bank file (default: bundled IRF)");
  eval_cmd->add_option("--alphas", eval_alphas, "comma-separated alpha values");
  eval_cmd->add_option("--gammaTs", eval_gammas, "comma-separated gamma*T values");
  eval_cmd->add_option("--methods", eval_methods, "comma-separated method names");
  eval_cmd->add_option("--seeds", eval_seeds, "comma-separated seeds");
  eval_cmd->add_option("--bands", eval_bands, "bands for the bundled phantom/IRF");
  add_hyper_options(eval_cmd, eval_opts);
  eval_cmd->add_option("--out", eval_dir, "output directory")->required();

  // --- cluster ----------------------------------------------------------
  auto* clu_cmd = app.add_subcommand(
      "cluster", "Debug output of the C-Dirichlet pixel clustering");
  std::string clu_scene, clu_irf, clu_out;
  bool clu_dense = false;
  SemOptions clu_opts;
  clu_cmd->add_option("--scene", clu_scene, "scene file")->required();
  clu_cmd->add_option("--irf", clu_irf, "IRF bank file")->required();
  clu_cmd->add_flag("--dense-scene", clu_dense, "scene file is binary dense");
  add_hyper_options(clu_cmd, clu_opts);
  clu_cmd->add_option("--out", clu_out, "output prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message / help text
    return code == 0 ? 0 : 2;     // usage errors exit 2
  }

  if (sim_cmd->parsed()) {
    const auto bank = load_irf(sim_irf, sim_bands);
    const auto truth = load_truth(sim_truth, sim_bands);
    const auto scene = swmsl::simulate(sim_cfg, truth, bank);
    if (sim_dense)
      swmsl::write_scene_dense(sim_out, scene);
    else
      swmsl::write_scene(sim_out, scene);
    swmsl::write_manifest(sim_out + "_manifest.json", command_line,
                          {{"alpha", fmt(sim_cfg.alpha)},
                           {"gammaT", fmt(sim_cfg.gammaT)},
                           {"seed", std::to_string(sim_cfg.seed)},
                           {"dense", sim_dense ? "true" : "false"}});
    std::cout << "wrote " << sim_out << " (" << scene.total_counts()
              << " photons over " << scene.pixels() << " pixels)\n";
    return 0;
  }

  if (rec_cmd->parsed()) {
    const auto bank = swmsl::read_irf(rec_irf);
    const auto scene = rec_dense ? swmsl::read_scene_dense(rec_scene)
                                 : swmsl::read_scene(rec_scene);
    const auto rec = swmsl::reconstruct_scene(scene, bank, rec_prior, rec_opts);
    swmsl::write_depth(rec_out + "_depth.txt", rec.depth);
    swmsl::write_weights(rec_out + "_weights.txt", rec.W);
    swmsl::write_reflectivity(rec_out + "_reflectivity.txt", rec.refl);
    swmsl::write_matrix(rec_out + "_entropy.txt", rec.entropy, scene.rows(),
                        scene.cols());
    swmsl::write_trace_csv(rec_out + "_trace.csv", rec.trace);
    if (!rec.cluster_map.empty())
      swmsl::write_int_matrix(rec_out + "_clusters.txt", rec.cluster_map,
                              scene.rows(), scene.cols());
    swmsl::write_manifest(rec_out + "_manifest.json", command_line,
                          {{"prior", rec_prior},
                           {"lambda", fmt(rec_opts.hyper.lambda)},
                           {"epsilon", fmt(rec_opts.hyper.epsilon)},
                           {"kappa", fmt(rec_opts.hyper.kappa)},
                           {"theta", fmt(rec_opts.hyper.theta)},
                           {"seed", std::to_string(rec_opts.seed)}});
    std::cout << "reconstruction finished after " << rec.n_iter
              << " iterations (burn-in "
              << (rec.burnin_converged ? "converged" : "hit the cap") << ")\n";
    return 0;
  }

  if (base_cmd->parsed()) {
    const auto bank = swmsl::read_irf(base_irf);
    const auto scene = base_dense ? swmsl::read_scene_dense(base_scene)
                                  : swmsl::read_scene(base_scene);
    SemOptions opts;
    const auto rec = swmsl::reconstruct_scene(scene, bank, "xcorr", opts);
    swmsl::write_depth(base_out + "_depth.txt", rec.depth);
    swmsl::write_weights(base_out + "_weights.txt", rec.W);
    swmsl::write_reflectivity(base_out + "_reflectivity.txt", rec.refl);
    swmsl::write_manifest(base_out + "_manifest.json", command_line,
                          {{"method", "xcorr"}});
    std::cout << "baseline finished\n";
    return 0;
  }

  if (eval_cmd->parsed()) {
    const auto bank = load_irf(eval_irf, eval_bands);
    const auto truth = load_truth(eval_truth, eval_bands);
    swmsl::GridSpec spec;
    spec.alphas = parse_reals(eval_alphas);
    spec.gammaTs = parse_reals(eval_gammas);
    spec.methods = parse_names(eval_methods);
    spec.seeds = parse_seeds(eval_seeds);
    std::filesystem::create_directories(eval_dir);
    const auto cells = swmsl::run_grid(truth, bank, spec, eval_opts);
    swmsl::write_grid_csv(eval_dir + "/results.csv", cells);
    const auto agg = swmsl::aggregate_cells(cells);
    swmsl::write_grid_csv(eval_dir + "/results_mean.csv", agg);
    swmsl::write_timing_csv(eval_dir + "/timing.csv", swmsl::timing_report(cells));
    for (const auto& c : agg) {
      if (!c.ok) continue;
      std::ostringstream name;
      name << eval_dir << "/cdf_a" << c.alpha << "_g" << c.gammaT << "_"
           << c.method << ".csv";
      swmsl::write_cdf(name.str(), c.cdf);
    }
    swmsl::write_manifest(eval_dir + "/manifest.json", command_line,
                          {{"alphas", eval_alphas},
                           {"gammaTs", eval_gammas},
                           {"methods", eval_methods},
                           {"seeds", eval_seeds}});
    std::cout << "wrote " << cells.size() << " grid cells to " << eval_dir
              << "\n";
    return 0;
  }

  if (clu_cmd->parsed()) {
    const auto bank = swmsl::read_irf(clu_irf);
    const auto scene = clu_dense ? swmsl::read_scene_dense(clu_scene)
                                 : swmsl::read_scene(clu_scene);
    const auto result = swmsl::cluster_pixels(scene, bank, clu_opts);
    swmsl::write_int_matrix(clu_out + "_clusters.txt", result.labels,
                            scene.rows(), scene.cols());
    swmsl::write_manifest(clu_out + "_manifest.json", command_line,
                          {{"clusters", std::to_string(result.n_clusters)},
                           {"degenerate", result.degenerate ? "true" : "false"},
                           {"seed", std::to_string(clu_opts.seed)}});
    if (result.degenerate)
      std::cerr << "warning: fewer distinct patches than requested clusters; "
                << result.n_clusters << " clusters returned\n";
    std::cout << "wrote cluster map with " << result.n_clusters << " groups\n";
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const swmsl::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 3;
  } catch (const swmsl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
