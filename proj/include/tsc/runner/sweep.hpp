#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tsc/runner/trainer.hpp"

namespace tsc {

struct SweepResult {
  std::vector<RunReport> reports;
  std::filesystem::path csv_path;
};

/// One run per (model, depth, seed), with the models from sweep_models().
/// A failing run is recorded (error set) and the sweep continues. Writes
/// per-run reports under output_dir/<model>_d<depth>_s<seed>/ and
/// output_dir/sweep.csv: one row per model, one column per depth, each cell
/// the mean best accuracy over seeds.
SweepResult run_depth_sweep(const RunConfig& config, const PreparedData& data,
                            const std::vector<Index>& depths);

/// For each value of `axis` (lambda, tau or beta) and each depth of
/// config.sweep.depth (or model.depth), runs every seed of config.model.
/// Writes output_dir/param_sweep_<axis>.csv with columns
/// axis,value,depth,mean_accuracy,mean_mad.
SweepResult run_param_sweep(const RunConfig& config, const PreparedData& data,
                            const std::string& axis, const std::vector<double>& values);

/// Mean of best_accuracy over reports without an error; NaN if none.
double mean_best_accuracy(const std::vector<RunReport>& reports);

}  // namespace tsc
