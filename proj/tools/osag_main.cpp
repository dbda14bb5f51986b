#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "osag/commands.hpp"
#include "osag/errors.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::vector<std::uint64_t> seed_list;
  std::optional<long long> cov_window;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Path to the run config (JSON)")
      ->required();
  cmd->add_option("--out", opts.out_dir, "Output directory (overrides config)");
  cmd->add_option("--seed-list", opts.seed_list, "Seeds (overrides config)")
      ->delimiter(',');
  cmd->add_option("--cov-window", opts.cov_window,
                  "Coverage window in draws; 0 measures over all draws");
  cmd->add_option("--jobs", opts.jobs, "Worker threads for independent runs")
      ->check(CLI::PositiveNumber);
}

osag::RunConfig resolve(const CommonOptions& opts) {
  osag::RunConfig cfg = osag::load_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (!opts.seed_list.empty()) cfg.train.seeds = opts.seed_list;
  if (opts.cov_window) cfg.train.cov_window = *opts.cov_window;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contract-governed sampling and training toolkit"};
  app.require_subcommand(1);

  CommonOptions gen_opts, train_opts, verify_opts, ablate_opts, report_opts;
  auto* gen = app.add_subcommand("gen-data", "Generate or re-export the dataset CSV");
  add_common(gen, gen_opts);
  auto* train = app.add_subcommand("train", "Train under the configured policy grid");
  add_common(train, train_opts);
  auto* verify = app.add_subcommand("verify-theory",
                                    "Monte Carlo verification of the coverage and risk bounds");
  add_common(verify, verify_opts);
  auto* ablate = app.add_subcommand("ablate", "Coarse vs. fine contract design comparison");
  add_common(ablate, ablate_opts);
  auto* report = app.add_subcommand("report", "Re-aggregate per-run metrics into the summary");
  add_common(report, report_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) osag::cmd_gen_data(resolve(gen_opts));
    if (train->parsed()) osag::cmd_train(resolve(train_opts), train_opts.jobs);
    if (verify->parsed()) osag::cmd_verify_theory(resolve(verify_opts));
    if (ablate->parsed()) osag::cmd_ablate(resolve(ablate_opts), ablate_opts.jobs);
    if (report->parsed()) osag::cmd_report(resolve(report_opts));
  } catch (const osag::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return osag::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return osag::kExitFailure;
  }
  return osag::kExitOk;
}
