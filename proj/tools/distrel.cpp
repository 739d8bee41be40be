// Command-line front end: experiments, presets, socket workers and checks.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <iostream>

#include "checks/acceptance.hpp"
#include "distrel/baselines.hpp"
#include "distrel/datagen.hpp"
#include "distrel/dist_engine.hpp"
#include "distrel/evaluation.hpp"
#include "distrel/harness.hpp"
#include "distrel/socket_transport.hpp"

using namespace distrel;

namespace {

void print_summary(const harness::ExperimentConfig& cfg, const harness::ExperimentReport& report) {
  for (const auto& row : harness::summarize(cfg, report)) {
    fmt::print("cell {:>3} n={:<6} m={:<5} noise={:<11} c={:<5} {:<13} l2={:.4f} f1={:.3f} ok={}/{}\n",
               row.cell.index, row.cell.n, row.cell.m, data::to_string(row.cell.noise),
               row.cell.bandwidth_scale, harness::to_string(row.estimator), row.mean_l2, row.mean_f1,
               row.successes, cfg.replications);
  }
}

int run_config(harness::ExperimentConfig cfg) {
  const auto report = harness::run_experiment(cfg);
  print_summary(cfg, report);
  if (!cfg.output_path.empty()) fmt::print("wrote {}\n", cfg.output_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed penalized quantile regression"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error");

  // run
  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  std::string config_path;
  std::vector<std::string> overrides;
  run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--set", overrides, "Override a dotted key, e.g. grid.n=[5000]");

  // reproduce
  auto* repro = app.add_subcommand("reproduce", "Run a named preset");
  std::string preset_name;
  std::vector<std::string> repro_overrides;
  std::string repro_output;
  repro->add_option("preset", preset_name, "table2 | figure1 | bandwidth-sensitivity")->required();
  repro->add_option("--set", repro_overrides, "Override a dotted key");
  repro->add_option("--output", repro_output, "CSV path");
  bool dump_config = false;
  repro->add_flag("--print-config", dump_config, "Print the resolved config and exit");

  // validate
  auto* validate = app.add_subcommand("validate", "Run the property and acceptance checks");
  std::vector<int> only;
  bool all = false;
  validate->add_option("--only", only, "Criterion numbers to run");
  validate->add_flag("--all", all, "Include the long statistical criteria");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset as shard files");
  data::SimDesign design;
  std::string noise_name = "cauchy";
  Index shard_size = 500;
  std::string out_dir = ".";
  gen->add_option("--n", design.n)->default_val(5000);
  gen->add_option("--p", design.p)->default_val(500);
  gen->add_option("--s", design.s)->default_val(20);
  gen->add_option("--tau", design.tau)->default_val(0.3);
  gen->add_option("--noise", noise_name)->default_val("cauchy");
  gen->add_option("--seed", design.seed)->default_val(1);
  gen->add_option("--shard-size", shard_size)->default_val(500);
  gen->add_option("--out-dir", out_dir)->default_val(".");

  // worker
  auto* worker = app.add_subcommand("worker", "Serve one shard over TCP until SHUTDOWN");
  std::string shard_path;
  std::uint16_t port = 0;
  std::string bind_host = "127.0.0.1";
  worker->add_option("--shard", shard_path)->required()->check(CLI::ExistingFile);
  worker->add_option("--port", port)->required();
  worker->add_option("--bind", bind_host)->default_val("127.0.0.1");

  // coordinate
  auto* coord = app.add_subcommand("coordinate", "Run the distributed fit against socket workers");
  std::string first_path;
  std::vector<std::string> endpoints;
  engine::RelOptions opts;
  Index total_n = 0;
  double c0 = 1.0;
  coord->add_option("--first-shard", first_path, "Shard file of worker 0")->required()->check(CLI::ExistingFile);
  coord->add_option("--workers", endpoints, "host:port per shard, first one holds --first-shard")->required();
  coord->add_option("--n", total_n, "Total rows across workers")->required();
  coord->add_option("--s", opts.scale.s)->default_val(20);
  coord->add_option("--tau", opts.tau)->default_val(0.3);
  coord->add_option("--iterations", opts.iterations)->default_val(50);
  coord->add_option("--C0", c0)->default_val(1.0);

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) return run_config(harness::load_config(config_path, overrides));

    if (*repro) {
      auto cfg = harness::preset(preset_name);
      if (!repro_overrides.empty()) {
        cfg = harness::parse_config(harness::config_to_json(cfg), repro_overrides);
      }
      if (!repro_output.empty()) cfg.output_path = repro_output;
      if (dump_config) {
        std::cout << harness::config_to_json(cfg) << "\n";
        return 0;
      }
      return run_config(cfg);
    }

    if (*validate) {
      std::vector<int> selected = only;
      if (selected.empty()) selected = all ? checks::all_criteria() : checks::fast_criteria();
      return checks::run_criteria(selected, std::cout) ? 0 : 1;
    }

    if (*gen) {
      design.noise = data::parse_noise(noise_name);
      const auto g = data::generate(design);
      std::filesystem::create_directories(out_dir);
      const auto parts = split_even(g.data, shard_size);
      for (std::size_t k = 0; k < parts.size(); ++k) {
        const auto path = std::filesystem::path(out_dir) / fmt::format("shard_{:03}.bin", k);
        data::save_shard(path, parts[k], design.seed);
        fmt::print("{} rows={}\n", path.string(), parts[k].rows());
      }
      return 0;
    }

    if (*worker) {
      auto shard = std::make_shared<const Dataset>(data::load_shard(shard_path));
      net::SocketWorkerServer server(shard, port, bind_host);
      fmt::print("serving {} rows on {}:{}\n", shard->rows(), bind_host, server.port());
      std::fflush(stdout);
      server.serve();
      return 0;
    }

    if (*coord) {
      engine::ClusterConfig cfg;
      cfg.transport = engine::TransportKind::kSocket;
      cfg.shards.resize(endpoints.size());
      cfg.shards[0] = std::make_shared<const Dataset>(data::load_shard(first_path));
      for (const auto& e : endpoints) cfg.endpoints.push_back(net::parse_endpoint(e));
      opts.scale.n = static_cast<double>(total_n);
      opts.scale.C0_lambda = c0;
      cfg.options = opts;
      const auto r = engine::run_distributed_rel(cfg);
      for (const auto& rec : r.trace.records) {
        fmt::print("g={:<3} h={:.5f} lambda={:.5f} f0={:.5f} nnz={} bytes={}\n", rec.g, rec.bandwidth,
                   rec.lambda, rec.density, rec.nonzeros, rec.bytes);
      }
      for (Index j = 0; j < r.beta.size(); ++j) {
        if (r.beta[j] != 0.0) fmt::print("beta[{}] = {:.17g}\n", j, r.beta[j]);
      }
      if (r.status != engine::RunStatus::kCompleted) {
        fmt::print(stderr, "{}\n", r.error);
        return 2;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
