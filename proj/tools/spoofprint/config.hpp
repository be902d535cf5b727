#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spoofprint/lowlevel.hpp"
#include "spoofprint/mel.hpp"
#include "spoofprint/mlp.hpp"
#include "spoofprint/synth.hpp"
#include "spoofprint/trainer.hpp"

namespace spoofprint::cli {

/// Everything a pipeline stage may need besides file paths. Loaded from one JSON file;
/// command-line flags override individual fields.
struct PipelineConfig {
  FrameConfig frame;
  MelConfig mel;
  TrainingConfig training = TrainingConfig::desk();
  ClassifierConfig classifier;
  SynthCorpusConfig synth = default_synth_config();
  std::vector<std::string> split;  // chain of split specs, see SplitChain
  std::string part = "test";
  unsigned threads = 0;            // 0 = hardware concurrency
  std::uint64_t seed = 1;
};

/// Keys: frame, mel, training, classifier, synth, split, part, threads, seed.
/// Unknown keys and invalid values throw ValidationError.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
PipelineConfig parse_pipeline_config(const std::string& text);

}  // namespace spoofprint::cli
