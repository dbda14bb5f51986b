#include "osag/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "osag/errors.hpp"

namespace osag {

namespace {

using nlohmann::json;

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
  int count = 0;
};

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  out.count = static_cast<int>(values.size());
  if (values.empty()) return out;
  double sum = 0.0;
  for (const double v : values) sum += v;
  out.mean = sum / values.size();
  if (values.size() > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / (values.size() - 1));
  }
  return out;
}

}  // namespace

std::string format_g17(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_text_file(const std::string& path, const std::string& content) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream file(path, std::ios::binary);
  if (!file) throw io_error("cannot open '" + path + "' for writing");
  file << content;
  if (!file) throw io_error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw io_error("cannot open '" + path + "'");
  std::ostringstream out;
  out << file.rdbuf();
  return out.str();
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw io_error("'" + path + "': invalid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::string contract_set_to_json(const ContractSet& set) {
  // Hand-rolled so target shares print with 17 significant digits.
  std::ostringstream out;
  out << "{\n";
  out << "  \"key_scheme\": " << json(set.key_scheme).dump() << ",\n";
  out << "  \"rare_quantile\": " << format_g17(set.rare_quantile) << ",\n";
  out << "  \"base_priority\": " << set.base_priority << ",\n";
  out << "  \"rare_priority\": " << set.rare_priority << ",\n";
  out << "  \"contracts\": [\n";
  for (int c = 0; c < set.size(); ++c) {
    const auto& contract = set.contracts[static_cast<std::size_t>(c)];
    out << "    {\"key_parts\": " << json(contract.key).dump()
        << ", \"member_count\": " << contract.size()
        << ", \"priority\": " << contract.priority << ", \"target_share\": "
        << (set.shares_computed ? format_g17(contract.target_share) : "null") << "}"
        << (c + 1 < set.size() ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
  return out.str();
}

json metrics_to_json(const RunMetrics& metrics, const SamplingPolicy& policy,
                     std::uint64_t seed, const RunConfig& cfg) {
  json j{{"policy",
          {{"kind", policy_name(policy.kind)},
           {"alpha", policy.alpha},
           {"lambda_c", policy.lambda_c},
           {"baseline", policy.baseline == BaselineKind::Uniform ? "uniform" : "cb"}}},
         {"seed", seed},
         {"acc_all", metrics.acc_all},
         {"acc_high", metrics.acc_high ? json(*metrics.acc_high) : json(nullptr)},
         {"prio_cov_err", metrics.prio_cov_err},
         {"first_decile_loss", metrics.first_decile_loss},
         {"last_decile_loss", metrics.last_decile_loss},
         {"total_draws", metrics.total_draws},
         {"num_contracts", metrics.num_contracts},
         {"unseen",
          {{"count", metrics.eval.unseen.count},
           {"mean_loss", metrics.eval.unseen.mean_loss},
           {"accuracy", metrics.eval.unseen.accuracy}}},
         {"config_hash", cfg.hash()},
         {"config", cfg.resolved()}};
  return j;
}

json loss_table_to_json(const ContractSet& set, const Evaluation& eval) {
  json entries = json::array();
  for (int c = 0; c < set.size(); ++c) {
    const auto& contract = set.contracts[static_cast<std::size_t>(c)];
    entries.push_back({{"key_parts", contract.key},
                       {"n", contract.size()},
                       {"test_n", eval.contract_test_counts[c]},
                       {"loss", eval.contract_losses.losses[c]},
                       {"priority", contract.priority}});
  }
  json j{{"bound", eval.contract_losses.bound}, {"entries", std::move(entries)}};
  if (eval.unseen.count > 0)
    j["unseen"] = {{"count", eval.unseen.count}, {"mean_loss", eval.unseen.mean_loss}};
  return j;
}

std::string coverage_curve_csv(const std::vector<CoverageCurvePoint>& curve) {
  std::ostringstream out;
  out << "step,kind,contract,value\n";
  for (const auto& point : curve) {
    for (Eigen::Index c = 0; c < point.coverage.size(); ++c)
      out << point.draws << ",q," << c << ',' << format_g17(point.coverage[c]) << '\n';
    out << point.draws << ",err,-1," << format_g17(point.prio_cov_err) << '\n';
  }
  return out.str();
}

std::string decay_curve_csv(const std::vector<DecayPoint>& curve) {
  std::ostringstream out;
  out << "steps,mean,std\n";
  for (const auto& point : curve)
    out << point.steps << ',' << format_g17(point.mean_cov_err) << ','
        << format_g17(point.stddev) << '\n';
  return out.str();
}

json concentration_to_json(const ConcentrationReport& report) {
  std::vector<double> rates(report.per_contract_violation_rate.data(),
                            report.per_contract_violation_rate.data() +
                                report.per_contract_violation_rate.size());
  std::vector<double> errs(report.per_contract_stderr.data(),
                           report.per_contract_stderr.data() +
                               report.per_contract_stderr.size());
  return {{"m", report.m},
          {"steps", report.steps},
          {"epsilon", report.epsilon},
          {"trials", report.trials},
          {"hoeffding_bound", report.hoeffding_bound},
          {"union_bound", report.union_bound},
          {"per_contract_violation_rate", rates},
          {"per_contract_stderr", errs},
          {"union_event_rate", report.union_event_rate},
          {"union_stderr", report.union_stderr},
          {"per_contract_hold", report.per_contract_hold},
          {"union_holds", report.union_holds},
          {"holds", report.holds}};
}

std::vector<SummaryRow> summarize_runs(const std::vector<json>& run_docs) {
  // Ordered by first appearance of each policy.
  std::vector<std::string> order;
  std::map<std::string, std::vector<const json*>> by_policy;
  for (const auto& doc : run_docs) {
    const std::string name = doc.at("policy").at("kind").get<std::string>();
    if (by_policy.find(name) == by_policy.end()) order.push_back(name);
    by_policy[name].push_back(&doc);
  }

  std::vector<SummaryRow> rows;
  for (const auto& name : order) {
    SummaryRow row;
    row.policy = name;
    std::vector<double> acc_all, acc_high, cov_err;
    for (const json* doc : by_policy[name]) {
      acc_all.push_back(doc->at("acc_all").get<double>());
      if (!doc->at("acc_high").is_null())
        acc_high.push_back(doc->at("acc_high").get<double>());
      cov_err.push_back(doc->at("prio_cov_err").get<double>());
    }
    row.runs = static_cast<int>(acc_all.size());
    const auto a = mean_std(acc_all);
    row.acc_all_mean = a.mean;
    row.acc_all_std = a.std;
    const auto h = mean_std(acc_high);
    row.acc_high_mean = h.mean;
    row.acc_high_std = h.std;
    const auto e = mean_std(cov_err);
    row.prio_cov_err_mean = e.mean;
    row.prio_cov_err_std = e.std;
    rows.push_back(std::move(row));
  }
  return rows;
}

json summary_to_json(const std::vector<SummaryRow>& rows, const std::string& config_hash) {
  json list = json::array();
  for (const auto& row : rows)
    list.push_back({{"policy", row.policy},
                    {"runs", row.runs},
                    {"acc_all_mean", row.acc_all_mean},
                    {"acc_all_std", row.acc_all_std},
                    {"acc_high_mean", row.acc_high_mean},
                    {"acc_high_std", row.acc_high_std},
                    {"prio_cov_err_mean", row.prio_cov_err_mean},
                    {"prio_cov_err_std", row.prio_cov_err_std}});
  return {{"rows", std::move(list)}, {"config_hash", config_hash}};
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "policy,runs,acc_all_mean,acc_all_std,acc_high_mean,acc_high_std,"
         "prio_cov_err_mean,prio_cov_err_std\n";
  for (const auto& row : rows)
    out << row.policy << ',' << row.runs << ',' << format_g17(row.acc_all_mean) << ','
        << format_g17(row.acc_all_std) << ',' << format_g17(row.acc_high_mean) << ','
        << format_g17(row.acc_high_std) << ',' << format_g17(row.prio_cov_err_mean) << ','
        << format_g17(row.prio_cov_err_std) << '\n';
  return out.str();
}

std::string render_summary_table(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-16s %-18s %-18s %-18s\n", "policy",
                "acc_all (%)", "acc_high (%)", "prio_cov_err (%)");
  out << line;
  for (const auto& row : rows) {
    std::snprintf(line, sizeof(line), "%-16s %7.2f +/- %-6.2f %7.2f +/- %-6.2f %7.2f +/- %-6.2f\n",
                  row.policy.c_str(), row.acc_all_mean, row.acc_all_std, row.acc_high_mean,
                  row.acc_high_std, row.prio_cov_err_mean, row.prio_cov_err_std);
    out << line;
  }
  return out.str();
}

json manifest_json(const std::string& command, const RunConfig& cfg,
                   const std::vector<std::string>& outputs) {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  return {{"command", command},
          {"config_hash", cfg.hash()},
          {"config", cfg.resolved()},
          {"outputs", outputs},
          {"timestamp_ms",
           std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
}

}  // namespace osag
