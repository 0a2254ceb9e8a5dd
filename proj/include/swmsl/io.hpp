#pragma once

#include <string>
#include <vector>

#include "swmsl/depth.hpp"
#include "swmsl/evaluation.hpp"
#include "swmsl/sem.hpp"
#include "swmsl/types.hpp"

namespace swmsl {

/// File formats are text-first and 1-based (bins and pixel indices), with a
/// binary dense option for high-count scenes. All writers round-trip
/// losslessly; parsers report the offending line on malformed input.

// IRF bank: header "L T t_min t_max support", then `support` lines of L
// whitespace-separated nonnegative reals.
IrfBank read_irf(const std::string& path);
void write_irf(const std::string& path, const IrfBank& bank);

// Sparse scene: header "rows cols T", then lines "pixel bin count" sorted by
// (pixel, bin); zero-count pixels have no lines.
SceneCube read_scene(const std::string& path);
void write_scene(const std::string& path, const SceneCube& scene);

// Dense scene: binary row-major 32-bit little-endian counts at `path`, plus a
// text sidecar "<path>.hdr" holding "rows cols T". Bit-exact round trip.
SceneCube read_scene_dense(const std::string& path);
void write_scene_dense(const std::string& path, const SceneCube& scene);

// Ground truth: header "rows cols L", then one line per pixel
// "t r_1 ... r_L" in row-major order.
GroundTruth read_truth(const std::string& path);
void write_truth(const std::string& path, const GroundTruth& truth);

// Depth map: text matrix of 1-based bin indices, header "rows cols".
DepthField read_depth(const std::string& path);
void write_depth(const std::string& path, const DepthField& t);

// Weight field: header "rows cols L", then L row-major matrices (one per
// band), blank-line separated.
WeightField read_weights(const std::string& path);
void write_weights(const std::string& path, const WeightField& W);

// Reflectivity cube: header "rows cols L", then L spectral matrices followed
// by the background-rate matrix.
ReflectivityCube read_reflectivity(const std::string& path);
void write_reflectivity(const std::string& path, const ReflectivityCube& cube);

// Plain real matrix with header "rows cols" (entropy maps and the like).
std::vector<double> read_matrix(const std::string& path, int& rows, int& cols);
void write_matrix(const std::string& path, const std::vector<double>& data,
                  int rows, int cols);
void write_int_matrix(const std::string& path, const std::vector<int>& data,
                      int rows, int cols);

// Iteration trace CSV: iter,rel_err,q_pre,q_post_w,q_post_phi,wall_ms.
void write_trace_csv(const std::string& path,
                     const std::vector<SemTraceRow>& trace);

// Grid results CSV:
// alpha,gammaT,method,seed,counts,sbr,mse_r,n_iter,sec_per_iter,total_sec,status
void write_grid_csv(const std::string& path,
                    const std::vector<CellResult>& cells);

// Timing CSV: alpha,gammaT,method,n_iter,sec_per_iter,total_sec.
void write_timing_csv(const std::string& path,
                      const std::vector<TimingRow>& rows);

// Depth-error CDF: threshold,fraction per line.
void write_cdf(const std::string& path, const CdfTable& cdf);
CdfTable read_cdf(const std::string& path);

// Reproducibility manifest (JSON) with the command line, options, seed,
// thread count and library version.
void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace swmsl
