#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "osag/config.hpp"
#include "osag/contracts.hpp"
#include "osag/graph.hpp"
#include "osag/theory.hpp"
#include "osag/trainer.hpp"

namespace osag {

// Shortest decimal form that still round-trips: %.17g.
std::string format_g17(double value);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

// Hand-formatted so target shares print with 17 significant digits.
std::string contract_set_to_json(const ContractSet& set);

nlohmann::json metrics_to_json(const RunMetrics& metrics, const SamplingPolicy& policy,
                               std::uint64_t seed, const RunConfig& cfg);

nlohmann::json loss_table_to_json(const ContractSet& set, const Evaluation& eval);

// step,kind,contract,value rows: kind=q per-contract coverage, kind=err the
// coverage-error summary (contract -1).
std::string coverage_curve_csv(const std::vector<CoverageCurvePoint>& curve);

std::string decay_curve_csv(const std::vector<DecayPoint>& curve);

nlohmann::json concentration_to_json(const ConcentrationReport& report);

struct SummaryRow {
  std::string policy;
  int runs = 0;
  double acc_all_mean = 0.0, acc_all_std = 0.0;
  double acc_high_mean = 0.0, acc_high_std = 0.0;
  double prio_cov_err_mean = 0.0, prio_cov_err_std = 0.0;
};

// Mean and sample std across seeds, one row per policy, from per-run
// metrics JSON documents.
std::vector<SummaryRow> summarize_runs(const std::vector<nlohmann::json>& run_docs);
nlohmann::json summary_to_json(const std::vector<SummaryRow>& rows,
                               const std::string& config_hash);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string render_summary_table(const std::vector<SummaryRow>& rows);

nlohmann::json manifest_json(const std::string& command, const RunConfig& cfg,
                             const std::vector<std::string>& outputs);

}  // namespace osag
