#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distrel/datagen.hpp"
#include "distrel/dist_engine.hpp"
#include "distrel/evaluation.hpp"

namespace distrel::harness {

inline constexpr int kSchemaVersion = 1;

enum class Estimator { kDistRel, kPooledRel, kAvgDc, kPooledLasso };

const char* to_string(Estimator e) noexcept;
Estimator parse_estimator(const std::string& name);

struct ExperimentConfig {
  // Grid axes; every combination is one cell.
  std::vector<Index> n{5000};
  std::vector<Index> m{500};
  std::vector<Index> p{500};
  std::vector<Index> s{20};
  std::vector<data::Noise> noise{data::Noise::kCauchy};
  std::vector<double> tau{0.3};
  std::vector<double> bandwidth_scale{1.0};

  int iterations = schedule::kDefaultIterations;
  std::vector<Estimator> estimators{Estimator::kDistRel, Estimator::kPooledRel, Estimator::kAvgDc,
                                    Estimator::kPooledLasso};
  int replications = 20;
  std::uint64_t seed_base = 20240521;
  std::vector<double> c0_grid{0.25, 0.35, 0.5, 0.7, 1.0, 1.4, 2.0};
  // Avg-DC local lambda candidates, as multiples of default_lambda0.
  std::vector<double> avg_dc_grid{0.2, 0.35, 0.5, 0.7, 1.0};
  double c0_bandwidth = 0.1;
  engine::LambdaRule lambda_rule = engine::LambdaRule::kDamped;
  engine::TransportKind transport = engine::TransportKind::kInProcess;
  int lasso_grid_size = 40;

  // Empty output_path skips file output. trace_path and summary_path default
  // to siblings of output_path.
  std::string output_path;
  std::string trace_path;
  std::string summary_path;
  std::string plot_path;

  void validate() const;
};

// JSON text with sections "grid", "algorithm" and "output"; see README.
ExperimentConfig parse_config(const std::string& json_text,
                              std::span<const std::string> overrides = {});
ExperimentConfig load_config(const std::string& path, std::span<const std::string> overrides = {});
std::string config_to_json(const ExperimentConfig& cfg);

// Named presets: "table2", "figure1", "bandwidth-sensitivity".
ExperimentConfig preset(const std::string& name);

struct Cell {
  std::size_t index = 0;
  Index n = 0, m = 0, p = 0, s = 0;
  data::Noise noise = data::Noise::kNormal;
  double tau = 0.5;
  double bandwidth_scale = 1.0;
};

std::vector<Cell> expand_grid(const ExperimentConfig& cfg);

// derive_seed(seed_base, cell index, replication).
std::uint64_t replication_seed(const ExperimentConfig& cfg, const Cell& cell, int rep) noexcept;

struct C0Selection {
  double c0 = 0.0;
  double loss = std::numeric_limits<double>::infinity();
  std::vector<double> losses;  // +inf for failed candidates
  engine::RelResult result;    // fit at the chosen C0
};

// Minimizes the validation check loss over the grid; ties go to the larger C0.
// Candidates that throw or stop early are skipped with a warning; throws
// NonConvergence if every candidate fails.
C0Selection select_c0(std::span<const double> grid,
                      const std::function<engine::RelResult(double)>& fit,
                      const Dataset& validation, double tau);

struct EstimatorOutcome {
  Estimator estimator = Estimator::kDistRel;
  Coefficients beta;
  eval::L2Error l2;
  eval::SupportMetrics support;
  double c0 = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double validation_loss = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = 0.0;
  std::string error;
  std::vector<engine::IterationRecord> trace;
  std::vector<double> iterate_l2;  // l2 error after each iteration
};

struct ReplicationOutcome {
  Cell cell;
  int rep = 0;
  std::uint64_t seed = 0;
  std::vector<EstimatorOutcome> estimators;
};

// Generates the data for one (cell, replication) and runs every estimator.
ReplicationOutcome run_replication(const ExperimentConfig& cfg, const Cell& cell, int rep);

struct ExperimentReport {
  std::vector<ReplicationOutcome> replications;  // ordered by (cell, rep)
};

// Runs all cells and replications on a work-stealing pool capped by
// DISTREL_THREADS, then writes the CSV files when output_path is set.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

struct SummaryRow {
  Cell cell;
  Estimator estimator = Estimator::kDistRel;
  std::size_t successes = 0;
  double mean_l2 = 0.0;
  double mean_relative_l2 = 0.0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f1 = 0.0;
  double mean_nonzeros = 0.0;
  double mean_wall_seconds = 0.0;
};

std::vector<SummaryRow> summarize(const ExperimentConfig& cfg, const ExperimentReport& report);

// Per-iteration median l2 error across replications, one row per
// (cell, estimator, g); one-shot estimators repeat their median.
struct PlotPoint {
  std::size_t cell = 0;
  Estimator estimator = Estimator::kDistRel;
  int g = 0;
  double median_l2 = 0.0;
};
std::vector<PlotPoint> plot_series(const ExperimentConfig& cfg, const ExperimentReport& report);

std::string replication_csv(const ExperimentConfig& cfg, const ExperimentReport& report);
std::string trace_csv(const ExperimentConfig& cfg, const ExperimentReport& report);
std::string summary_csv(const ExperimentConfig& cfg, const std::vector<SummaryRow>& rows);
std::string plot_tsv(const std::vector<PlotPoint>& points);

// Pool size: DISTREL_THREADS when set and positive, else hardware concurrency.
int thread_cap();

}  // namespace distrel::harness
