#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cervix_cad/config.hpp"

namespace cervix {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitData = 3, kExitNumerical = 4 };

/// Maps the active exception to an exit code; call from inside a catch block.
int exit_code_for_current_exception();

struct StageOutcome {
  std::string stage;
  bool skipped = false;
};

struct PipelineResult {
  std::vector<StageOutcome> stages;
  std::filesystem::path tsv;
  std::filesystem::path svg;
  std::filesystem::path text;
};

/// Layout under output_dir: data/ (prepare or synth), descriptors/,
/// fused/, reports/. Every stage directory gets a `.stamp` holding a SHA-256
/// of the stage inputs plus upstream stamps; a stage whose stamp matches and
/// whose outputs validate is skipped. A failing stage leaves `.stale` behind
/// and the error message starts with the stage name.
PipelineResult run_pipeline(const ExperimentConfig& config,
                            const std::function<void(std::string_view)>& log = {});

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::filesystem::path& path);

}  // namespace cervix
