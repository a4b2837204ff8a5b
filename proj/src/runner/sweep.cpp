#include "tsc/runner/sweep.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <thread>

#include "tsc/core/errors.hpp"
#include "tsc/graph/dataset_io.hpp"

namespace tsc {
namespace {

struct Job {
  RunConfig config;
  std::uint64_t seed = 0;
  std::filesystem::path run_dir;
};

RunReport run_job(const Job& job, const PreparedData& data) {
  try {
    return run_single(job.config, data, job.seed, job.run_dir);
  } catch (const std::exception& e) {
    RunReport failed;
    failed.config = to_json(job.config);
    failed.model_name = job.config.model.name();
    failed.seed = job.seed;
    failed.depth = job.config.model.depth;
    failed.error = e.what();
    return failed;
  }
}

std::vector<RunReport> run_jobs(const std::vector<Job>& jobs, const PreparedData& data,
                                Index workers) {
  std::vector<RunReport> reports(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) reports[i] = run_job(jobs[i], data);
  };
  const Index count = std::min<Index>(workers, jobs.size());
  if (count <= 1) {
    worker();
    return reports;
  }
  std::vector<std::thread> threads;
  for (Index t = 0; t < count; ++t) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  return reports;
}

std::string slug(const std::string& model_name) {
  std::string out;
  for (char c : model_name) out += c == '+' ? '_' : static_cast<char>(std::tolower(c));
  return out;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string format_cell(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

double mean_final_mad(const std::vector<RunReport>& reports) {
  double total = 0.0;
  Index count = 0;
  for (const RunReport& r : reports) {
    if (!r.error.empty() && !r.diverged) continue;
    if (r.final_metrics.mad_per_layer.empty()) continue;
    total += r.final_metrics.mad_per_layer.back();
    ++count;
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN() : total / count;
}

}  // namespace

double mean_best_accuracy(const std::vector<RunReport>& reports) {
  double total = 0.0;
  Index count = 0;
  for (const RunReport& r : reports) {
    // Diverged runs keep their partial best accuracy.
    if (!r.error.empty() && !r.diverged) continue;
    total += r.best_accuracy;
    ++count;
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN() : total / count;
}

SweepResult run_depth_sweep(const RunConfig& config, const PreparedData& data,
                            const std::vector<Index>& depths) {
  config.validate();
  if (depths.empty()) throw ConfigError("depth sweep needs at least one depth");
  for (std::size_t i = 1; i < depths.size(); ++i) {
    if (depths[i] <= depths[i - 1]) throw ConfigError("sweep depths must be strictly ascending");
  }
  const std::vector<ModelConfig> models = sweep_models(config);
  std::vector<Job> jobs;
  for (const ModelConfig& m : models) {
    for (Index depth : depths) {
      for (std::uint64_t seed : config.seeds) {
        Job job;
        job.config = config;
        job.config.model = m;
        job.config.model.depth = depth;
        job.seed = seed;
        job.run_dir = config.output_dir / (slug(m.name()) + "_d" + std::to_string(depth) + "_s" +
                                           std::to_string(seed));
        jobs.push_back(std::move(job));
      }
    }
  }
  SweepResult result;
  result.reports = run_jobs(jobs, data, config.workers);

  std::string csv = "model";
  for (Index depth : depths) csv += "," + std::to_string(depth);
  csv += '\n';
  std::size_t k = 0;
  for (const ModelConfig& m : models) {
    csv += m.name();
    for (std::size_t d = 0; d < depths.size(); ++d) {
      std::vector<RunReport> cell(result.reports.begin() + k,
                                  result.reports.begin() + k + config.seeds.size());
      k += config.seeds.size();
      csv += "," + format_cell(mean_best_accuracy(cell));
    }
    csv += '\n';
  }
  result.csv_path = config.output_dir / "sweep.csv";
  write_file_atomic(result.csv_path, csv);
  return result;
}

SweepResult run_param_sweep(const RunConfig& config, const PreparedData& data,
                            const std::string& axis, const std::vector<double>& values) {
  config.validate();
  if (values.empty()) throw ConfigError("parameter sweep needs at least one value");
  std::function<void(ModelConfig&, double)> set;
  if (axis == "lambda") {
    set = [](ModelConfig& m, double v) { m.lambda = v; };
  } else if (axis == "tau") {
    set = [](ModelConfig& m, double v) { m.contrastive.temperature = v; };
  } else if (axis == "beta") {
    set = [](ModelConfig& m, double v) { m.contrastive.loss_weight = v; };
  } else {
    throw ConfigError("unknown sweep axis '" + axis + "' (lambda, tau, beta)");
  }
  const std::vector<Index> depths =
      config.sweep.depth ? *config.sweep.depth : std::vector<Index>{config.model.depth};

  std::vector<Job> jobs;
  for (double v : values) {
    for (Index depth : depths) {
      for (std::uint64_t seed : config.seeds) {
        Job job;
        job.config = config;
        set(job.config.model, v);
        job.config.model.depth = depth;
        job.config.model.validate();
        job.seed = seed;
        job.run_dir = config.output_dir / (axis + "_" + format_value(v) + "_d" +
                                           std::to_string(depth) + "_s" + std::to_string(seed));
        jobs.push_back(std::move(job));
      }
    }
  }
  SweepResult result;
  result.reports = run_jobs(jobs, data, config.workers);

  std::string csv = "axis,value,depth,mean_accuracy,mean_mad\n";
  std::size_t k = 0;
  for (double v : values) {
    for (Index depth : depths) {
      std::vector<RunReport> cell(result.reports.begin() + k,
                                  result.reports.begin() + k + config.seeds.size());
      k += config.seeds.size();
      csv += axis + "," + format_value(v) + "," + std::to_string(depth) + "," +
             format_cell(mean_best_accuracy(cell)) + "," + format_cell(mean_final_mad(cell)) +
             '\n';
    }
  }
  result.csv_path = config.output_dir / ("param_sweep_" + axis + ".csv");
  write_file_atomic(result.csv_path, csv);
  return result;
}

}  // namespace tsc
