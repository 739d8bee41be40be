#include "distrel/harness.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "distrel/baselines.hpp"
#include "distrel/qr_init.hpp"

namespace distrel::harness {

using nlohmann::json;

namespace {

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

const char* to_string(engine::LambdaRule r) {
  return r == engine::LambdaRule::kDamped ? "damped" : "literal";
}

const char* to_string(engine::TransportKind t) {
  return t == engine::TransportKind::kInProcess ? "in_process" : "socket";
}

json as_list(const json& v) { return v.is_array() ? v : json::array({v}); }

template <class T>
std::vector<T> list_of(const json& v) {
  std::vector<T> out;
  for (const auto& e : as_list(v)) out.push_back(e.get<T>());
  return out;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) == known.end()) {
      throw Error(ErrorKind::kInvalidArgument, "unknown config key '" + where + key + "'");
    }
  }
}

void apply_override(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorKind::kInvalidArgument, "override must be key=value: '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &root;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) path.push_back(part);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!node->is_object()) throw Error(ErrorKind::kInvalidArgument, "cannot descend into '" + key + "'");
    node = &(*node)[path[i]];
    if (node->is_null()) *node = json::object();
  }
  (*node)[path.back()] = value;
}

json config_json(const ExperimentConfig& c) {
  json grid = {{"n", c.n}, {"m", c.m}, {"p", c.p}, {"s", c.s}, {"tau", c.tau},
               {"bandwidth_scale", c.bandwidth_scale}};
  grid["noise"] = json::array();
  for (auto nz : c.noise) grid["noise"].push_back(data::to_string(nz));
  json est = json::array();
  for (auto e : c.estimators) est.push_back(to_string(e));
  json algorithm = {{"iterations", c.iterations},
                    {"c0_grid", c.c0_grid},
                    {"avg_dc_grid", c.avg_dc_grid},
                    {"c0_bandwidth", c.c0_bandwidth},
                    {"lambda_rule", to_string(c.lambda_rule)},
                    {"transport", to_string(c.transport)},
                    {"lasso_grid_size", c.lasso_grid_size}};
  json output = {{"path", c.output_path}, {"trace", c.trace_path}, {"summary", c.summary_path},
                 {"plot", c.plot_path}};
  return json{{"grid", grid},
              {"algorithm", algorithm},
              {"estimators", est},
              {"replications", c.replications},
              {"seed_base", c.seed_base},
              {"output", output}};
}

ExperimentConfig from_json(const json& root) {
  if (!root.is_object()) throw Error(ErrorKind::kInvalidArgument, "config must be a JSON object");
  reject_unknown(root, {"grid", "algorithm", "estimators", "replications", "seed_base", "output"}, "");
  ExperimentConfig c;
  if (root.contains("grid")) {
    const json& g = root["grid"];
    reject_unknown(g, {"n", "m", "p", "s", "noise", "tau", "bandwidth_scale"}, "grid.");
    if (g.contains("n")) c.n = list_of<Index>(g["n"]);
    if (g.contains("m")) c.m = list_of<Index>(g["m"]);
    if (g.contains("p")) c.p = list_of<Index>(g["p"]);
    if (g.contains("s")) c.s = list_of<Index>(g["s"]);
    if (g.contains("tau")) c.tau = list_of<double>(g["tau"]);
    if (g.contains("bandwidth_scale")) c.bandwidth_scale = list_of<double>(g["bandwidth_scale"]);
    if (g.contains("noise")) {
      c.noise.clear();
      for (const auto& s : list_of<std::string>(g["noise"])) c.noise.push_back(data::parse_noise(s));
    }
  }
  if (root.contains("algorithm")) {
    const json& a = root["algorithm"];
    reject_unknown(a, {"iterations", "c0_grid", "avg_dc_grid", "c0_bandwidth", "lambda_rule", "transport", "lasso_grid_size"},
                   "algorithm.");
    if (a.contains("iterations")) c.iterations = a["iterations"].get<int>();
    if (a.contains("c0_grid")) c.c0_grid = list_of<double>(a["c0_grid"]);
    if (a.contains("avg_dc_grid")) c.avg_dc_grid = list_of<double>(a["avg_dc_grid"]);
    if (a.contains("c0_bandwidth")) c.c0_bandwidth = a["c0_bandwidth"].get<double>();
    if (a.contains("lasso_grid_size")) c.lasso_grid_size = a["lasso_grid_size"].get<int>();
    if (a.contains("lambda_rule")) {
      const auto r = a["lambda_rule"].get<std::string>();
      if (r == "damped") c.lambda_rule = engine::LambdaRule::kDamped;
      else if (r == "literal") c.lambda_rule = engine::LambdaRule::kLiteral;
      else throw Error(ErrorKind::kInvalidArgument, "lambda_rule must be damped or literal");
    }
    if (a.contains("transport")) {
      const auto t = a["transport"].get<std::string>();
      if (t == "in_process") c.transport = engine::TransportKind::kInProcess;
      else if (t == "socket") c.transport = engine::TransportKind::kSocket;
      else throw Error(ErrorKind::kInvalidArgument, "transport must be in_process or socket");
    }
  }
  if (root.contains("estimators")) {
    c.estimators.clear();
    for (const auto& s : list_of<std::string>(root["estimators"])) c.estimators.push_back(parse_estimator(s));
  }
  if (root.contains("replications")) c.replications = root["replications"].get<int>();
  if (root.contains("seed_base")) c.seed_base = root["seed_base"].get<std::uint64_t>();
  if (root.contains("output")) {
    const json& o = root["output"];
    reject_unknown(o, {"path", "trace", "summary", "plot"}, "output.");
    if (o.contains("path")) c.output_path = o["path"].get<std::string>();
    if (o.contains("trace")) c.trace_path = o["trace"].get<std::string>();
    if (o.contains("summary")) c.summary_path = o["summary"].get<std::string>();
    if (o.contains("plot")) c.plot_path = o["plot"].get<std::string>();
  }
  c.validate();
  return c;
}

std::string sibling(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path);
}

// Lasso targets the conditional mean, so its truth shifts the intercept by
// the noise mean (location for the Cauchy family).
Coefficients mean_target(const Coefficients& beta_star, data::Noise noise) {
  Coefficients t = beta_star;
  if (noise == data::Noise::kExponential) t[0] += 1.0;
  return t;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

const char* to_string(Estimator e) noexcept {
  switch (e) {
    case Estimator::kDistRel: return "dist_rel";
    case Estimator::kPooledRel: return "pooled_rel";
    case Estimator::kAvgDc: return "avg_dc";
    case Estimator::kPooledLasso: return "pooled_lasso";
  }
  return "unknown";
}

Estimator parse_estimator(const std::string& name) {
  for (Estimator e : {Estimator::kDistRel, Estimator::kPooledRel, Estimator::kAvgDc, Estimator::kPooledLasso}) {
    if (name == to_string(e)) return e;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown estimator '" + name + "'");
}

void ExperimentConfig::validate() const {
  auto nonempty = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::kInvalidArgument, std::string("empty grid axis ") + what);
  };
  nonempty(!n.empty(), "n");
  nonempty(!m.empty(), "m");
  nonempty(!p.empty(), "p");
  nonempty(!s.empty(), "s");
  nonempty(!noise.empty(), "noise");
  nonempty(!tau.empty(), "tau");
  nonempty(!bandwidth_scale.empty(), "bandwidth_scale");
  nonempty(!estimators.empty(), "estimators");
  nonempty(!c0_grid.empty(), "c0_grid");
  nonempty(!avg_dc_grid.empty(), "avg_dc_grid");
  for (Index v : n) if (v < 2) throw Error(ErrorKind::kInvalidArgument, "n must be >= 2");
  for (Index v : m) if (v < 1) throw Error(ErrorKind::kInvalidArgument, "m must be >= 1");
  for (Index v : p) if (v < 1) throw Error(ErrorKind::kInvalidArgument, "p must be >= 1");
  for (Index v : s) if (v < 1) throw Error(ErrorKind::kInvalidSparsity, "s must be >= 1");
  for (double t : tau) if (!(t > 0.0 && t < 1.0)) throw Error(ErrorKind::kInvalidArgument, "tau must lie in (0,1)");
  for (double c : bandwidth_scale) if (!(c > 0.0)) throw Error(ErrorKind::kInvalidBandwidth, "bandwidth_scale must be > 0");
  for (double c : c0_grid) if (!(c > 0.0)) throw Error(ErrorKind::kInvalidArgument, "C0 candidates must be > 0");
  for (double c : avg_dc_grid) if (!(c > 0.0)) throw Error(ErrorKind::kInvalidArgument, "avg_dc_grid entries must be > 0");
  if (!(c0_bandwidth > 0.0)) throw Error(ErrorKind::kInvalidArgument, "c0_bandwidth must be > 0");
  if (iterations < 0 || iterations > schedule::kIterationCap) {
    throw Error(ErrorKind::kInvalidArgument, "iterations must lie in [0, 100]");
  }
  if (replications < 1) throw Error(ErrorKind::kInvalidArgument, "replications must be >= 1");
  if (lasso_grid_size < 1) throw Error(ErrorKind::kInvalidArgument, "lasso_grid_size must be >= 1");
}

ExperimentConfig parse_config(const std::string& json_text, std::span<const std::string> overrides) {
  json root = json::parse(json_text, nullptr, false, true);
  if (root.is_discarded()) throw Error(ErrorKind::kInvalidArgument, "config is not valid JSON");
  for (const auto& o : overrides) apply_override(root, o);
  try {
    return from_json(root);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidArgument, std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path, std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2); }

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  if (name == "table2") {
    c.n = {5000, 10000};
    c.noise = {data::Noise::kCauchy};
    c.output_path = "table2.csv";
  } else if (name == "figure1") {
    c.n = {10000};
    c.noise = {data::Noise::kNormal, data::Noise::kCauchy, data::Noise::kExponential};
    c.estimators = {Estimator::kDistRel, Estimator::kPooledRel, Estimator::kAvgDc};
    c.output_path = "figure1.csv";
  } else if (name == "bandwidth-sensitivity") {
    c.n = {10000};
    c.noise = {data::Noise::kCauchy};
    c.bandwidth_scale = {0.5, 1.0, 2.0, 5.0, 10.0};
    c.estimators = {Estimator::kDistRel};
    c.replications = 10;
    c.output_path = "bandwidth_sensitivity.csv";
  } else {
    throw Error(ErrorKind::kInvalidArgument,
                "unknown preset '" + name + "' (table2, figure1, bandwidth-sensitivity)");
  }
  return c;
}

std::vector<Cell> expand_grid(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  for (Index n : cfg.n)
    for (Index m : cfg.m)
      for (Index p : cfg.p)
        for (Index s : cfg.s)
          for (data::Noise nz : cfg.noise)
            for (double tau : cfg.tau)
              for (double c : cfg.bandwidth_scale) {
                Cell cell{cells.size(), n, std::min(m, n), p, s, nz, tau, c};
                cells.push_back(cell);
              }
  return cells;
}

std::uint64_t replication_seed(const ExperimentConfig& cfg, const Cell& cell, int rep) noexcept {
  return data::derive_seed(cfg.seed_base, cell.index, static_cast<std::uint64_t>(rep));
}

C0Selection select_c0(std::span<const double> grid, const std::function<engine::RelResult(double)>& fit,
                      const Dataset& validation, double tau) {
  if (grid.empty()) throw Error(ErrorKind::kEmptyInput, "empty C0 grid");
  C0Selection sel;
  bool found = false;
  for (double c0 : grid) {
    double loss = std::numeric_limits<double>::infinity();
    engine::RelResult r;
    try {
      r = fit(c0);
      if (r.status != engine::RunStatus::kCompleted) {
        spdlog::warn("C0 = {} skipped: {}", c0, r.error);
      } else {
        loss = qr::mean_check_loss(validation, r.beta, tau);
      }
    } catch (const Error& e) {
      spdlog::warn("C0 = {} skipped: {}", c0, e.what());
    }
    sel.losses.push_back(loss);
    if (!std::isfinite(loss)) continue;
    if (!found || loss < sel.loss || (loss == sel.loss && c0 > sel.c0)) {
      found = true;
      sel.c0 = c0;
      sel.loss = loss;
      sel.result = std::move(r);
    }
  }
  if (!found) throw Error(ErrorKind::kNonConvergence, "every C0 candidate failed");
  return sel;
}

ReplicationOutcome run_replication(const ExperimentConfig& cfg, const Cell& cell, int rep) {
  ReplicationOutcome out;
  out.cell = cell;
  out.rep = rep;
  out.seed = replication_seed(cfg, cell, rep);

  data::SimDesign design;
  design.n = cell.n;
  design.p = cell.p;
  design.s = cell.s;
  design.noise = cell.noise;
  design.tau = cell.tau;
  design.seed = out.seed;
  const data::Generated train = data::generate(design);
  const data::Generated val = data::generate_validation(design);
  const auto full = std::make_shared<const Dataset>(train.data);
  std::vector<net::ShardPtr> shards;
  for (auto& s : split_even(train.data, cell.m)) shards.push_back(std::make_shared<const Dataset>(std::move(s)));

  engine::RelOptions base;
  base.tau = cell.tau;
  base.iterations = cfg.iterations;
  base.scale.s = static_cast<double>(cell.s);
  base.scale.c0_bandwidth = cfg.c0_bandwidth;
  base.bandwidth_scale = cell.bandwidth_scale;
  base.lambda_rule = cfg.lambda_rule;
  base.record_iterates = true;

  auto run_rel_family = [&](const std::vector<net::ShardPtr>& parts, EstimatorOutcome& eo) {
    const Dataset& first = *parts.front();
    engine::RelOptions opts = base;
    const qr::QrResult init = engine::initial_estimate(first, cell.n, opts);
    opts.initial = init.beta;
    engine::LocalCluster cluster(parts, cfg.transport);
    const auto fit = [&](double c0) {
      engine::RelOptions o = opts;
      o.scale.C0_lambda = c0;
      return engine::run_rel(cluster.transport(), first, 0, cell.n, o);
    };
    C0Selection sel = select_c0(cfg.c0_grid, fit, val.data, cell.tau);
    eo.c0 = sel.c0;
    eo.validation_loss = sel.loss;
    eo.beta = sel.result.beta;
    eo.trace = sel.result.trace.records;
    if (!eo.trace.empty()) eo.lambda = eo.trace.back().lambda;
    for (const auto& it : sel.result.trace.iterates) {
      eo.iterate_l2.push_back(eval::l2_error(it, train.effective_beta).absolute);
    }
    return train.effective_beta;
  };

  for (Estimator est : cfg.estimators) {
    EstimatorOutcome eo;
    eo.estimator = est;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      Coefficients truth = train.effective_beta;
      switch (est) {
        case Estimator::kDistRel:
          truth = run_rel_family(shards, eo);
          break;
        case Estimator::kPooledRel:
          truth = run_rel_family({full}, eo);
          break;
        case Estimator::kAvgDc: {
          // Local lambda validated on the averaged fit, like C0 for REL.
          const double unit = qr::default_lambda0(cell.p, cell.n, cell.m);
          eo.validation_loss = std::numeric_limits<double>::infinity();
          for (double mult : cfg.avg_dc_grid) {
            Coefficients b = baseline::avg_dc(shards, cell.tau, mult * unit);
            const double loss = qr::mean_check_loss(val.data, b, cell.tau);
            if (loss < eo.validation_loss || (loss == eo.validation_loss && mult * unit > eo.lambda)) {
              eo.validation_loss = loss;
              eo.lambda = mult * unit;
              eo.beta = std::move(b);
            }
          }
          break;
        }
        case Estimator::kPooledLasso: {
          const auto grid = baseline::lasso_grid(train.data, cfg.lasso_grid_size);
          const auto res = baseline::pooled_lasso(train.data, val.data, grid);
          eo.beta = res.beta;
          eo.lambda = res.lambda;
          eo.validation_loss = res.validation_mse;
          truth = mean_target(train.beta_star, cell.noise);
          break;
        }
      }
      eo.l2 = eval::l2_error(eo.beta, truth);
      eo.support = eval::support_metrics(eo.beta, truth);
    } catch (const std::exception& e) {
      eo.error = e.what();
      spdlog::warn("cell {} rep {} {}: {}", cell.index, rep, to_string(est), e.what());
    }
    eo.wall_seconds = seconds_since(t0);
    out.estimators.push_back(std::move(eo));
  }
  return out;
}

int thread_cap() {
  if (const char* env = std::getenv("DISTREL_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto cells = expand_grid(cfg);
  std::vector<std::pair<std::size_t, int>> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (int r = 0; r < cfg.replications; ++r) tasks.emplace_back(c, r);

  ExperimentReport report;
  report.replications.resize(tasks.size());
  tbb::task_arena arena(thread_cap());
  arena.execute([&] {
    tbb::parallel_for(std::size_t{0}, tasks.size(), [&](std::size_t i) {
      const auto [c, r] = tasks[i];
      report.replications[i] = run_replication(cfg, cells[c], r);
      spdlog::info("cell {} rep {} done", c, r);
    });
  });

  if (!cfg.output_path.empty()) {
    write_file(cfg.output_path, replication_csv(cfg, report));
    write_file(cfg.trace_path.empty() ? sibling(cfg.output_path, ".trace.csv") : cfg.trace_path,
               trace_csv(cfg, report));
    write_file(cfg.summary_path.empty() ? sibling(cfg.output_path, ".summary.csv") : cfg.summary_path,
               summary_csv(cfg, summarize(cfg, report)));
    write_file(cfg.plot_path.empty() ? sibling(cfg.output_path, ".plot.tsv") : cfg.plot_path,
               plot_tsv(plot_series(cfg, report)));
  }
  return report;
}

std::vector<SummaryRow> summarize(const ExperimentConfig& cfg, const ExperimentReport& report) {
  std::map<std::pair<std::size_t, int>, SummaryRow> acc;
  for (const auto& rep : report.replications) {
    for (const auto& eo : rep.estimators) {
      auto& row = acc[{rep.cell.index, static_cast<int>(eo.estimator)}];
      row.cell = rep.cell;
      row.estimator = eo.estimator;
      if (!eo.error.empty()) continue;
      ++row.successes;
      row.mean_l2 += eo.l2.absolute;
      row.mean_relative_l2 += eo.l2.relative;
      row.mean_precision += eo.support.precision;
      row.mean_recall += eo.support.recall;
      row.mean_f1 += eo.support.f1;
      row.mean_nonzeros += static_cast<double>(eo.support.true_positives + eo.support.false_positives);
      row.mean_wall_seconds += eo.wall_seconds;
    }
  }
  std::vector<SummaryRow> rows;
  for (auto& [key, row] : acc) {
    const double k = row.successes > 0 ? static_cast<double>(row.successes)
                                       : std::numeric_limits<double>::quiet_NaN();
    for (double* v : {&row.mean_l2, &row.mean_relative_l2, &row.mean_precision, &row.mean_recall,
                      &row.mean_f1, &row.mean_nonzeros, &row.mean_wall_seconds}) {
      *v /= k;
    }
    rows.push_back(row);
  }
  (void)cfg;
  return rows;
}

std::vector<PlotPoint> plot_series(const ExperimentConfig& cfg, const ExperimentReport& report) {
  std::map<std::pair<std::size_t, int>, std::vector<std::vector<double>>> series;
  for (const auto& rep : report.replications) {
    for (const auto& eo : rep.estimators) {
      if (!eo.error.empty()) continue;
      std::vector<double> curve = eo.iterate_l2;
      if (curve.empty()) curve.assign(static_cast<std::size_t>(std::max(cfg.iterations, 1)), eo.l2.absolute);
      series[{rep.cell.index, static_cast<int>(eo.estimator)}].push_back(std::move(curve));
    }
  }
  std::vector<PlotPoint> points;
  for (const auto& [key, curves] : series) {
    std::size_t len = 0;
    for (const auto& c : curves) len = std::max(len, c.size());
    for (std::size_t g = 0; g < len; ++g) {
      std::vector<double> at;
      for (const auto& c : curves) {
        if (g < c.size()) at.push_back(c[g]);
      }
      points.push_back(PlotPoint{key.first, static_cast<Estimator>(key.second), static_cast<int>(g + 1), median(at)});
    }
  }
  return points;
}

std::string replication_csv(const ExperimentConfig& cfg, const ExperimentReport& report) {
  std::string out =
      "schema_version,cell,rep,seed,n,m,p,s,noise,tau,bandwidth_scale,iterations,estimator,c0,lambda,"
      "validation_loss,l2_error,relative_l2_error,precision,recall,f1,nonzeros,wall_seconds,error\n";
  for (const auto& rep : report.replications) {
    const Cell& c = rep.cell;
    for (const auto& eo : rep.estimators) {
      out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                         kSchemaVersion, c.index, rep.rep, rep.seed, c.n, c.m, c.p, c.s,
                         data::to_string(c.noise), fmt_double(c.tau), fmt_double(c.bandwidth_scale),
                         cfg.iterations, to_string(eo.estimator), fmt_double(eo.c0), fmt_double(eo.lambda),
                         fmt_double(eo.validation_loss), fmt_double(eo.l2.absolute),
                         fmt_double(eo.l2.relative), fmt_double(eo.support.precision),
                         fmt_double(eo.support.recall), fmt_double(eo.support.f1),
                         eo.support.true_positives + eo.support.false_positives,
                         fmt_double(eo.wall_seconds), csv_text(eo.error));
    }
  }
  return out;
}

std::string trace_csv(const ExperimentConfig& cfg, const ExperimentReport& report) {
  (void)cfg;
  std::string out =
      "schema_version,cell,rep,seed,estimator,g,bandwidth,lambda,density,nonzeros,l2_error,kkt,"
      "solver_iterations,solver_converged,bytes,rounds,wall_seconds\n";
  for (const auto& rep : report.replications) {
    for (const auto& eo : rep.estimators) {
      for (std::size_t i = 0; i < eo.trace.size(); ++i) {
        const auto& t = eo.trace[i];
        const double l2 = i < eo.iterate_l2.size() ? eo.iterate_l2[i] : std::numeric_limits<double>::quiet_NaN();
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", kSchemaVersion,
                           rep.cell.index, rep.rep, rep.seed, to_string(eo.estimator), t.g,
                           fmt_double(t.bandwidth), fmt_double(t.lambda), fmt_double(t.density), t.nonzeros,
                           fmt_double(l2), fmt_double(t.kkt), t.solver_iterations, t.solver_converged ? 1 : 0,
                           t.bytes, t.rounds, fmt_double(t.wall_seconds));
      }
    }
  }
  return out;
}

std::string summary_csv(const ExperimentConfig& cfg, const std::vector<SummaryRow>& rows) {
  std::string out =
      "schema_version,row_type,cell,n,m,p,s,noise,tau,bandwidth_scale,iterations,replications,estimator,"
      "successes,l2_error,relative_l2_error,precision,recall,f1,nonzeros,wall_seconds\n";
  for (const auto& r : rows) {
    const Cell& c = r.cell;
    out += fmt::format("{},mean,{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", kSchemaVersion,
                       c.index, c.n, c.m, c.p, c.s, data::to_string(c.noise), fmt_double(c.tau),
                       fmt_double(c.bandwidth_scale), cfg.iterations, cfg.replications, to_string(r.estimator),
                       r.successes, fmt_double(r.mean_l2), fmt_double(r.mean_relative_l2),
                       fmt_double(r.mean_precision), fmt_double(r.mean_recall), fmt_double(r.mean_f1),
                       fmt_double(r.mean_nonzeros), fmt_double(r.mean_wall_seconds));
  }
  return out;
}

std::string plot_tsv(const std::vector<PlotPoint>& points) {
  std::string out = "cell\testimator\tg\tmedian_l2_error\n";
  for (const auto& p : points) {
    out += fmt::format("{}\t{}\t{}\t{}\n", p.cell, to_string(p.estimator), p.g, fmt_double(p.median_l2));
  }
  return out;
}

}  // namespace distrel::harness
