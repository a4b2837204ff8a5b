// Command-line front end: run, sweep, metrics, dump, sbm.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tsc/core/errors.hpp"
#include "tsc/graph/dataset_io.hpp"
#include "tsc/graph/graph_ops.hpp"
#include "tsc/graph/sbm.hpp"
#include "tsc/metrics/metrics.hpp"
#include "tsc/runner/embeddings.hpp"
#include "tsc/runner/sweep.hpp"
#include "tsc/runner/trainer.hpp"

namespace {

using tsc::Index;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
  bool force_exact = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "Run configuration (JSON)");
  cmd->add_option("--seed", o.seed, "Use this single seed instead of the config's list");
  cmd->add_option("--output-dir", o.output_dir, "Directory for reports and CSV files");
  cmd->add_flag("--force-exact", o.force_exact,
                "Keep exact contrastive denominators on large graphs");
}

tsc::RunConfig resolve(const CommonOptions& o) {
  tsc::RunConfig c = o.config_path.empty() ? tsc::RunConfig{} : tsc::load_run_config(o.config_path);
  if (o.seed) c.seeds = {*o.seed};
  if (!o.output_dir.empty()) c.output_dir = o.output_dir;
  if (o.force_exact) c.force_exact = true;
  c.validate();
  return c;
}

void print_warnings(const tsc::PreparedData& data) {
  for (const std::string& w : data.warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_run(const CommonOptions& o) {
  const tsc::RunConfig config = resolve(o);
  const tsc::PreparedData data = tsc::prepare_data(config);
  print_warnings(data);
  std::vector<tsc::RunReport> reports;
  for (std::uint64_t seed : config.seeds) {
    const auto dir = config.seeds.size() == 1
                         ? config.output_dir
                         : config.output_dir / ("seed_" + std::to_string(seed));
    reports.push_back(tsc::run_single(config, data, seed, dir));
    const tsc::RunReport& r = reports.back();
    std::printf("%s depth=%zu seed=%llu best_acc=%.4f (epoch %zu) final_mad=%.4f%s\n",
                r.model_name.c_str(), r.depth, static_cast<unsigned long long>(seed),
                r.best_accuracy, r.best_epoch, r.final_metrics.mad_per_layer.back(),
                r.diverged ? " DIVERGED" : "");
  }
  if (config.seeds.size() > 1) {
    nlohmann::json summary = {{"model", reports.front().model_name},
                              {"mean_best_accuracy", tsc::mean_best_accuracy(reports)},
                              {"runs", nlohmann::json::array()}};
    for (const tsc::RunReport& r : reports) {
      summary["runs"].push_back({{"seed", r.seed},
                                 {"best_accuracy", r.best_accuracy},
                                 {"diverged", r.diverged}});
    }
    tsc::write_file_atomic(config.output_dir / "report.json", summary.dump(2) + "\n");
    std::printf("mean best accuracy: %.4f\n", tsc::mean_best_accuracy(reports));
  }
  return 0;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma - start);
    if (item.empty()) throw tsc::ConfigError("empty entry in value list '" + text + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw tsc::ConfigError("not a number: '" + item + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<Index> to_counts(const std::vector<double>& values) {
  std::vector<Index> out;
  for (double v : values) {
    if (v < 1 || v != static_cast<double>(static_cast<Index>(v))) {
      throw tsc::ConfigError("expected positive integers");
    }
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

int cmd_sweep(const CommonOptions& o, const std::string& axis, const std::string& values) {
  tsc::RunConfig config = resolve(o);
  const tsc::PreparedData data = tsc::prepare_data(config);
  print_warnings(data);
  tsc::SweepResult result;
  if (axis == "depth") {
    std::vector<Index> depths;
    if (!values.empty()) {
      depths = to_counts(parse_list(values));
    } else if (config.sweep.depth) {
      depths = *config.sweep.depth;
    } else {
      depths = {4, 8, 16, 32};
    }
    result = tsc::run_depth_sweep(config, data, depths);
  } else {
    std::vector<double> list;
    if (!values.empty()) {
      list = parse_list(values);
    } else if (axis == "lambda" && config.sweep.lambda) {
      list = *config.sweep.lambda;
    } else if (axis == "tau" && config.sweep.tau) {
      list = *config.sweep.tau;
    } else if (axis == "beta" && config.sweep.beta) {
      list = *config.sweep.beta;
    } else {
      throw tsc::ConfigError("no values given for axis '" + axis + "'");
    }
    result = tsc::run_param_sweep(config, data, axis, list);
  }
  Index failed = 0;
  for (const tsc::RunReport& r : result.reports) {
    if (!r.error.empty()) {
      ++failed;
      std::cerr << r.model_name << " depth " << r.depth << " seed " << r.seed << ": " << r.error
                << '\n';
    }
  }
  std::printf("%zu runs (%zu with errors), table: %s\n", result.reports.size(), failed,
              result.csv_path.string().c_str());
  return 0;
}

int cmd_metrics(const std::string& dataset_path, const std::string& orders, bool strict) {
  std::vector<std::string> warnings;
  const tsc::GraphDataset ds = tsc::load_dataset(dataset_path, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << '\n';
  const tsc::SparseMatrix adjacency = tsc::build_adjacency(ds);
  const std::vector<Index> order_list = to_counts(parse_list(orders));
  tsc::MetricReport report;
  tsc::fill_neighbor_metrics(report, adjacency, ds.labels, order_list,
                             strict ? tsc::Reachability::strict
                                    : tsc::Reachability::with_self_loops);
  Index same = 0;
  for (const auto& [u, v] : ds.edges) same += ds.labels[u] == ds.labels[v];
  const double n = static_cast<double>(ds.num_nodes);
  nlohmann::json out = {
      {"num_nodes", ds.num_nodes},
      {"num_edges", ds.edges.size()},
      {"num_features", ds.num_features},
      {"num_classes", ds.num_classes},
      {"density", n > 1 ? 2.0 * static_cast<double>(ds.edges.size()) / (n * (n - 1)) : 0.0},
      {"edge_homophily",
       ds.edges.empty() ? 0.0 : static_cast<double>(same) / static_cast<double>(ds.edges.size())},
      {"train", ds.train_count()},
      {"test", ds.test_count()},
      {"reachability", strict ? "strict" : "with_self_loops"},
      {"orders", report.orders},
      {"amo", report.amo_per_order},
      {"andcnn", report.andcnn_per_order},
  };
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_dump(const CommonOptions& o, Index layer) {
  tsc::RunConfig config = resolve(o);
  config.dump_layers = {layer};
  const tsc::PreparedData data = tsc::prepare_data(config);
  print_warnings(data);
  const tsc::RunReport r = tsc::run_single(config, data, config.seeds.front(), config.output_dir);
  for (const std::string& f : r.embedding_files) std::printf("%s\n", f.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Column masking and layer contrastive training for SGC and GCN"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  CLI::App* run = app.add_subcommand("run", "Train one model for every configured seed");
  add_common(run, run_opts);

  CommonOptions sweep_opts;
  std::string axis = "depth";
  std::string values;
  CLI::App* sweep = app.add_subcommand("sweep", "Depth or hyperparameter sweep");
  add_common(sweep, sweep_opts);
  sweep->add_option("--axis", axis, "depth, lambda, tau or beta")
      ->check(CLI::IsMember({"depth", "lambda", "tau", "beta"}));
  sweep->add_option("--values", values, "Comma-separated values");

  std::string dataset_path;
  std::string orders = "1,2,3";
  bool strict = false;
  CLI::App* metrics = app.add_subcommand("metrics", "Neighbor metrics (AMO, ANDCNN) of a dataset");
  metrics->add_option("--dataset", dataset_path, "Portable JSON dataset")->required();
  metrics->add_option("--orders", orders, "Comma-separated neighborhood orders");
  metrics->add_flag("--strict", strict, "Use powers of A instead of A + I");

  CommonOptions dump_opts;
  Index layer = 0;
  CLI::App* dump = app.add_subcommand("dump", "Train, then write one layer's embeddings");
  add_common(dump, dump_opts);
  dump->add_option("--layer", layer, "Layer index (0 = projected input)")->required();

  tsc::SbmParams sbm;
  std::string sbm_out;
  CLI::App* sbm_cmd = app.add_subcommand("sbm", "Write a stochastic block model dataset");
  sbm_cmd->add_option("--out", sbm_out, "Output JSON path")->required();
  sbm_cmd->add_option("--blocks", sbm.blocks);
  sbm_cmd->add_option("--nodes-per-block", sbm.nodes_per_block);
  sbm_cmd->add_option("--p-in", sbm.p_in);
  sbm_cmd->add_option("--p-out", sbm.p_out);
  sbm_cmd->add_option("--feature-dim", sbm.feature_dim);
  sbm_cmd->add_option("--signal", sbm.signal);
  sbm_cmd->add_option("--noise", sbm.noise);
  sbm_cmd->add_option("--seed", sbm.seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_opts);
    if (*sweep) return cmd_sweep(sweep_opts, axis, values);
    if (*metrics) return cmd_metrics(dataset_path, orders, strict);
    if (*dump) return cmd_dump(dump_opts, layer);
    if (*sbm_cmd) {
      tsc::save_dataset(tsc::generate_sbm(sbm), sbm_out);
      return 0;
    }
  } catch (const tsc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const tsc::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
