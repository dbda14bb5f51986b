#pragma once

#include <string>

#include "osag/config.hpp"
#include "osag/errors.hpp"

namespace osag {

// CLI exit codes. Config, check, and I/O failures stay distinguishable.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCheck = 3;
inline constexpr int kExitIo = 4;

int exit_code_for(ErrorKind kind);

// Loads the dataset named by the config (synthetic or CSV).
Dataset load_dataset(const RunConfig& cfg);

void cmd_gen_data(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg, int jobs);
void cmd_verify_theory(const RunConfig& cfg);
void cmd_ablate(const RunConfig& cfg, int jobs);
void cmd_report(const RunConfig& cfg);

}  // namespace osag
