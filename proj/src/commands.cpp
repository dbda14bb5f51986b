#include "osag/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "osag/coverage.hpp"
#include "osag/data.hpp"
#include "osag/graph.hpp"
#include "osag/report.hpp"
#include "osag/theory.hpp"
#include "osag/trainer.hpp"

namespace osag {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Ordered fan-out: results land in fixed slots, so parallelism never changes
// output bytes.
void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
  jobs = std::clamp(jobs, 1, std::max(1, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t)
    workers.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::scoped_lock lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

bool scaled_le(double lhs, double rhs, double scale, double slack) {
  return lhs <= rhs * scale + slack;
}

AdjacencyRule graph_rule(const ContractConfig& cfg) {
  if (cfg.graph_rule == "complete") return AdjacencyRule::complete();
  return AdjacencyRule::shared_prefix(cfg.graph_prefix);
}

ContractSet build_design_contracts(const Dataset& train, const RunConfig& cfg,
                                   bool refined) {
  ContractSet coarse =
      build_governed_contracts(train, cfg.contracts.key_scheme, cfg.contracts.rare_quantile,
                               cfg.contracts.rare_priority, cfg.contracts.base_priority);
  if (!refined) return coarse;
  ContractSet fine = refine_contracts(train, coarse, cfg.contracts.refine_attribute);
  return fine;
}

TrainConfig train_config_for(const RunConfig& cfg, const SamplingPolicy& policy,
                             std::uint64_t seed) {
  TrainConfig tc;
  tc.policy = policy;
  tc.steps = cfg.train.steps;
  tc.batch = cfg.train.batch;
  tc.learning_rate = cfg.train.learning_rate;
  tc.weight_decay = cfg.train.weight_decay;
  tc.hidden = cfg.train.hidden;
  tc.seed = seed;
  tc.eval_fraction = cfg.train.eval_fraction;
  tc.loss_clip = cfg.train.loss_clip;
  tc.cov_window = cfg.train.cov_window;
  tc.log_every = cfg.train.log_every;
  return tc;
}

Eigen::VectorXd dirichlet_uniform(int m, SeededStream& stream) {
  Eigen::VectorXd v(m);
  for (int i = 0; i < m; ++i) v[i] = -std::log1p(-stream.next_unit());
  return v / v.sum();
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return kExitConfig;
    case ErrorKind::Check: return kExitCheck;
    case ErrorKind::Io: return kExitIo;
    default: return kExitFailure;
  }
}

Dataset load_dataset(const RunConfig& cfg) {
  if (cfg.data.source == "synthetic") return generate(cfg.data.synthetic);
  return load_csv(cfg.data.csv_path, *cfg.data.csv_schema);
}

void cmd_gen_data(const RunConfig& cfg) {
  const Dataset ds = load_dataset(cfg);
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  const std::string csv_path = (out / cfg.data.csv_out).string();
  write_csv(ds, csv_path);
  write_json_file((out / "manifest.json").string(),
                  manifest_json("gen-data", cfg, {cfg.data.csv_out}));
  std::cout << "wrote " << ds.size() << " samples (" << ds.num_classes() << " classes, d="
            << ds.dim() << ") to " << csv_path << "\n";
}

void cmd_train(const RunConfig& cfg, int jobs) {
  const Dataset ds = load_dataset(cfg);
  const fs::path out(cfg.out_dir);

  struct RunSlot {
    SamplingPolicy policy;
    std::uint64_t seed = 0;
    RunMetrics metrics;
    ContractSet set;
  };
  std::vector<RunSlot> runs;
  for (const auto kind : cfg.train.policies)
    for (const auto seed : cfg.train.seeds)
      runs.push_back({resolve_policy(kind, cfg.train), seed, {}, {}});

  parallel_for(static_cast<int>(runs.size()), jobs, [&](int i) {
    auto& run = runs[static_cast<std::size_t>(i)];
    const SplitDataset split = stratified_split(ds, cfg.train.eval_fraction, run.seed);
    run.set = build_design_contracts(split.train, cfg, /*refined=*/false);
    run.metrics = train(split, run.set, train_config_for(cfg, run.policy, run.seed));
  });

  std::vector<std::string> outputs;
  std::vector<json> docs;
  for (const auto& run : runs) {
    const std::string rel = "runs/" + policy_name(run.policy.kind) + "_seed" +
                            std::to_string(run.seed);
    const fs::path dir = out / rel;
    json doc = metrics_to_json(run.metrics, run.policy, run.seed, cfg);
    write_json_file((dir / "metrics.json").string(), doc);
    write_text_file((dir / "coverage.csv").string(),
                    coverage_curve_csv(run.metrics.coverage_curve));
    write_json_file((dir / "loss_table.json").string(),
                    loss_table_to_json(run.set, run.metrics.eval));
    write_text_file((dir / "contracts.json").string(), contract_set_to_json(run.set));
    outputs.push_back(rel);
    docs.push_back(std::move(doc));
  }

  const auto rows = summarize_runs(docs);
  write_json_file((out / "summary.json").string(), summary_to_json(rows, cfg.hash()));
  write_text_file((out / "summary.csv").string(), summary_csv(rows));
  outputs.insert(outputs.end(), {"summary.json", "summary.csv"});
  write_json_file((out / "manifest.json").string(), manifest_json("train", cfg, outputs));
  std::cout << render_summary_table(rows);
}

void cmd_verify_theory(const RunConfig& cfg) {
  const auto& th = cfg.theory;
  const double scale = th.rhs_scale;
  const fs::path out(cfg.out_dir);
  bool all_hold = true;
  std::string first_failure;
  const auto note_failure = [&](const std::string& what) {
    if (all_hold) first_failure = what;
    all_hold = false;
  };

  // Coverage concentration against the closed-form tail bounds.
  json cells = json::array();
  std::uint64_t stream_index = 0;
  for (const int m : th.m_values) {
    if (m < 1) throw config_error("theory: m values must be >= 1");
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(m, 1.0 / m);
    auto reports = concentration_grid(
        w, th.step_grid, th.epsilons, th.trials,
        SeededStream(th.seed).child(stream_index++).seed());
    for (auto& report : reports) {
      report.per_contract_hold = true;
      for (int c = 0; c < report.m; ++c)
        if (!scaled_le(report.per_contract_violation_rate[c], report.hoeffding_bound,
                       scale, 3.0 * report.per_contract_stderr[c]))
          report.per_contract_hold = false;
      report.union_holds = scaled_le(report.union_event_rate, report.union_bound, scale,
                                     3.0 * report.union_stderr);
      report.holds = report.per_contract_hold && report.union_holds;
      if (!report.holds)
        note_failure("concentration m=" + std::to_string(report.m) +
                     " T=" + std::to_string(report.steps));
      cells.push_back(concentration_to_json(report));
    }
  }
  json concentration{{"cells", std::move(cells)}, {"rhs_scale", scale},
                     {"config_hash", cfg.hash()}};

  // Coverage-error decay and its 1/sqrt(T) envelope.
  const Eigen::VectorXd decay_w = Eigen::VectorXd::Constant(th.decay_m, 1.0 / th.decay_m);
  const auto decay = coverage_decay_curve(decay_w, th.step_grid, th.decay_trials,
                                          SeededStream(th.seed).child(100).seed());
  double envelope_max_ratio = 1.0;
  const double reference =
      decay.back().mean_cov_err * std::sqrt(static_cast<double>(decay.back().steps));
  for (const auto& point : decay) {
    const double scaled_mean =
        point.mean_cov_err * std::sqrt(static_cast<double>(point.steps));
    if (reference > 0.0)
      envelope_max_ratio = std::max(envelope_max_ratio,
                                    std::max(scaled_mean / reference, reference / scaled_mean));
  }
  const bool envelope_holds = scaled_le(envelope_max_ratio, 2.0, scale, 0.0);
  if (!envelope_holds) note_failure("decay envelope");
  json decay_report{{"m", th.decay_m},
                    {"trials", th.decay_trials},
                    {"envelope_max_ratio", envelope_max_ratio},
                    {"holds", envelope_holds},
                    {"config_hash", cfg.hash()}};

  // Randomized risk-deviation bound trials plus the exact half-gap witness.
  {
    if (th.risk_max_m < 2) throw config_error("theory: risk_max_m must be >= 2");
    SeededStream stream = SeededStream(th.seed).child(200);
    long long violations = 0;
    double max_gap = -1.0;
    for (int t = 0; t < th.risk_trials; ++t) {
      const int m = 2 + static_cast<int>(stream.uniform_below(
                            static_cast<std::uint64_t>(th.risk_max_m - 1)));
      ContractLossVector lv;
      lv.bound = th.risk_bound;
      lv.losses.resize(m);
      for (int i = 0; i < m; ++i) lv.losses[i] = th.risk_bound * stream.next_unit();
      const Eigen::VectorXd q = dirichlet_uniform(m, stream);
      const Eigen::VectorXd q_tilde = dirichlet_uniform(m, stream);
      const auto check = risk_deviation_bound_check(lv, q, q_tilde);
      if (!scaled_le(check.lhs, check.rhs, scale, 1e-12)) ++violations;
      max_gap = std::max(max_gap, check.lhs - check.rhs);
    }
    // Two-point distributions with losses {0, B} pin lhs at exactly rhs/2.
    ContractLossVector witness;
    witness.bound = th.risk_bound;
    witness.losses.resize(2);
    witness.losses << 0.0, th.risk_bound;
    Eigen::VectorXd q(2), q_tilde(2);
    q << 1.0, 0.0;
    q_tilde << 0.0, 1.0;
    const auto wreport = risk_deviation_bound_check(witness, q, q_tilde);
    const bool witness_holds = wreport.lhs == wreport.rhs / 2.0;

    const bool holds = violations == 0 && witness_holds;
    if (!holds) note_failure("risk deviation bound");
    json risk_report{{"trials", th.risk_trials},
                     {"max_m", th.risk_max_m},
                     {"bound", th.risk_bound},
                     {"violations", violations},
                     {"max_lhs_minus_rhs", max_gap},
                     {"witness_lhs", wreport.lhs},
                     {"witness_rhs", wreport.rhs},
                     {"witness_holds", witness_holds},
                     {"rhs_scale", scale},
                     {"holds", holds},
                     {"config_hash", cfg.hash()}};
    write_json_file((out / "risk_bound.json").string(), risk_report);
  }

  // Randomized connected graphs: loss-range and induced risk bounds with the
  // minimal Lipschitz constant.
  {
    if (th.graph_max_m < 2) throw config_error("theory: graph_max_m must be >= 2");
    SeededStream stream = SeededStream(th.seed).child(300);
    long long violations = 0;
    long long graph_rhs_tighter = 0;  // vs. the plain B * L1 bound
    for (int t = 0; t < th.graph_trials; ++t) {
      const int m = 2 + static_cast<int>(stream.uniform_below(
                            static_cast<std::uint64_t>(th.graph_max_m - 1)));
      std::vector<std::pair<int, int>> edges;
      for (int v = 1; v < m; ++v)
        edges.emplace_back(static_cast<int>(stream.uniform_below(v)), v);  // spanning tree
      for (int u = 0; u < m; ++u)
        for (int v = u + 1; v < m; ++v)
          if (stream.bernoulli(0.15)) edges.emplace_back(u, v);
      const ContractGraph graph = build_graph(m, std::move(edges));

      ContractLossVector lv;
      lv.bound = th.risk_bound;
      lv.losses.resize(m);
      for (int i = 0; i < m; ++i) lv.losses[i] = th.risk_bound * stream.next_unit();
      const Eigen::VectorXd q = dirichlet_uniform(m, stream);
      const Eigen::VectorXd q_tilde = dirichlet_uniform(m, stream);

      const auto report = graph_risk_bounds(graph, lv, q, q_tilde);
      const bool max_ok = scaled_le(report.max_loss_lhs, report.max_loss_rhs, scale, 1e-12);
      const bool risk_ok = scaled_le(report.risk_lhs, report.risk_rhs, scale, 1e-12);
      if (!max_ok || !risk_ok) ++violations;
      if (report.risk_rhs < lv.bound * l1_deviation(q, q_tilde)) ++graph_rhs_tighter;
    }
    const bool holds = violations == 0;
    if (!holds) note_failure("graph risk bound");
    json graph_report{{"trials", th.graph_trials},
                      {"max_m", th.graph_max_m},
                      {"bound", th.risk_bound},
                      {"violations", violations},
                      {"graph_bound_tighter_count", graph_rhs_tighter},
                      {"rhs_scale", scale},
                      {"holds", holds},
                      {"config_hash", cfg.hash()}};
    write_json_file((out / "graph_bound.json").string(), graph_report);
  }

  concentration["holds"] = all_hold;
  write_json_file((out / "concentration.json").string(), concentration);
  write_text_file((out / "decay.csv").string(), decay_curve_csv(decay));
  write_json_file((out / "decay.json").string(), decay_report);
  write_json_file((out / "manifest.json").string(),
                  manifest_json("verify-theory", cfg,
                                {"concentration.json", "decay.csv", "decay.json",
                                 "risk_bound.json", "graph_bound.json"}));

  if (!all_hold) throw check_error("bound verification failed: " + first_failure);
  std::cout << "all verified bounds hold\n";
}

void cmd_ablate(const RunConfig& cfg, int jobs) {
  const Dataset ds = load_dataset(cfg);
  if (ds.attr_index(cfg.contracts.refine_attribute) < 0)
    throw config_error("ablate: refinement attribute '" + cfg.contracts.refine_attribute +
                       "' is not present in the dataset");

  struct Cell {
    RunMetrics rand_run;
    RunMetrics osag_run;
    double beta = 0.0;
    int m = 0;
    std::string edge_list;
  };
  const auto& seeds = cfg.train.seeds;
  const int num_seeds = static_cast<int>(seeds.size());
  std::vector<Cell> cells(static_cast<std::size_t>(2 * num_seeds));

  parallel_for(2 * num_seeds, jobs, [&](int i) {
    const bool refined = i >= num_seeds;
    const std::uint64_t seed = seeds[static_cast<std::size_t>(i % num_seeds)];
    const SplitDataset split = stratified_split(ds, cfg.train.eval_fraction, seed);
    const ContractSet set = build_design_contracts(split.train, cfg, refined);

    Cell cell;
    cell.m = set.size();
    cell.rand_run = train(split, set,
                          train_config_for(cfg, SamplingPolicy::make(PolicyKind::Rand), seed));
    cell.osag_run = train(split, set,
                          train_config_for(cfg, SamplingPolicy::make(PolicyKind::Osag), seed));
    const ContractGraph graph = build_graph(set, graph_rule(cfg.contracts));
    cell.beta = lipschitz_beta(graph, cell.osag_run.eval.contract_losses);
    cell.edge_list = edge_list_text(graph);
    cells[static_cast<std::size_t>(i)] = std::move(cell);
  });

  const fs::path out(cfg.out_dir);
  json designs = json::array();
  std::ostringstream arrows;
  arrows << "design,rand_prio_cov_err,rand_acc_all,osag_prio_cov_err,osag_acc_all,"
            "delta_acc_all,cov_err_reduction,cost_per_unit\n";
  std::vector<std::string> outputs{"ablation.json", "arrows.csv"};

  for (int d = 0; d < 2; ++d) {
    const std::string name = d == 0 ? "coarse" : "fine";
    double rand_acc = 0, rand_cov = 0, osag_acc = 0, osag_cov = 0, beta_sum = 0;
    json per_seed = json::array();
    for (int s = 0; s < num_seeds; ++s) {
      const auto& cell = cells[static_cast<std::size_t>(d * num_seeds + s)];
      rand_acc += cell.rand_run.acc_all;
      rand_cov += cell.rand_run.prio_cov_err;
      osag_acc += cell.osag_run.acc_all;
      osag_cov += cell.osag_run.prio_cov_err;
      beta_sum += cell.beta;
      const double reduction = cell.rand_run.prio_cov_err - cell.osag_run.prio_cov_err;
      const double cost = reduction > 1e-9
                              ? std::abs(cell.osag_run.acc_all - cell.rand_run.acc_all) / reduction
                              : std::numeric_limits<double>::infinity();
      per_seed.push_back({{"seed", seeds[static_cast<std::size_t>(s)]},
                          {"m", cell.m},
                          {"beta", cell.beta},
                          {"rand_acc_all", cell.rand_run.acc_all},
                          {"rand_prio_cov_err", cell.rand_run.prio_cov_err},
                          {"osag_acc_all", cell.osag_run.acc_all},
                          {"osag_prio_cov_err", cell.osag_run.prio_cov_err},
                          {"cov_err_reduction", reduction},
                          {"cost_per_unit", std::isfinite(cost) ? json(cost) : json(nullptr)}});
    }
    rand_acc /= num_seeds;
    rand_cov /= num_seeds;
    osag_acc /= num_seeds;
    osag_cov /= num_seeds;
    beta_sum /= num_seeds;
    const double delta_acc = osag_acc - rand_acc;
    const double reduction = rand_cov - osag_cov;
    const double cost =
        reduction > 1e-9 ? std::abs(delta_acc) / reduction : std::numeric_limits<double>::infinity();

    designs.push_back({{"name", name},
                       {"rand_acc_all_mean", rand_acc},
                       {"rand_prio_cov_err_mean", rand_cov},
                       {"osag_acc_all_mean", osag_acc},
                       {"osag_prio_cov_err_mean", osag_cov},
                       {"beta_mean", beta_sum},
                       {"delta_acc_all", delta_acc},
                       {"cov_err_reduction", reduction},
                       {"cost_per_unit", std::isfinite(cost) ? json(cost) : json(nullptr)},
                       {"per_seed", std::move(per_seed)}});
    arrows << name << ',' << format_g17(rand_cov) << ',' << format_g17(rand_acc) << ','
           << format_g17(osag_cov) << ',' << format_g17(osag_acc) << ','
           << format_g17(delta_acc) << ',' << format_g17(reduction) << ','
           << (std::isfinite(cost) ? format_g17(cost) : "inf") << '\n';

    const std::string edge_file = "graph_" + name + ".txt";
    write_text_file((out / edge_file).string(),
                    cells[static_cast<std::size_t>(d * num_seeds)].edge_list);
    outputs.push_back(edge_file);
  }

  write_json_file((out / "ablation.json").string(),
                  json{{"designs", std::move(designs)}, {"config_hash", cfg.hash()}});
  write_text_file((out / "arrows.csv").string(), arrows.str());
  write_json_file((out / "manifest.json").string(), manifest_json("ablate", cfg, outputs));
  std::cout << "ablation written to " << (out / "ablation.json").string() << "\n";
}

void cmd_report(const RunConfig& cfg) {
  const fs::path runs_dir = fs::path(cfg.out_dir) / "runs";
  if (!fs::exists(runs_dir))
    throw io_error("report: no runs directory under '" + cfg.out_dir + "'");
  std::vector<fs::path> metric_files;
  for (const auto& entry : fs::directory_iterator(runs_dir)) {
    const fs::path candidate = entry.path() / "metrics.json";
    if (entry.is_directory() && fs::exists(candidate)) metric_files.push_back(candidate);
  }
  std::sort(metric_files.begin(), metric_files.end());
  if (metric_files.empty())
    throw io_error("report: no per-run metrics under '" + runs_dir.string() + "'");

  std::vector<json> docs;
  docs.reserve(metric_files.size());
  for (const auto& path : metric_files) docs.push_back(read_json_file(path.string()));
  // Present policies in config order so report output matches train output.
  std::stable_sort(docs.begin(), docs.end(), [&](const json& a, const json& b) {
    const auto rank = [&](const json& doc) {
      const auto kind = doc.at("policy").at("kind").get<std::string>();
      for (std::size_t i = 0; i < cfg.train.policies.size(); ++i)
        if (policy_name(cfg.train.policies[i]) == kind) return i;
      return cfg.train.policies.size();
    };
    return rank(a) < rank(b);
  });
  const auto rows = summarize_runs(docs);
  const fs::path out(cfg.out_dir);
  write_json_file((out / "summary.json").string(), summary_to_json(rows, cfg.hash()));
  write_text_file((out / "summary.csv").string(), summary_csv(rows));
  std::cout << render_summary_table(rows);
}

}  // namespace osag
