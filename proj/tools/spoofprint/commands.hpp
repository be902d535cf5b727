#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace spoofprint::cli {

namespace fs = std::filesystem;

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;   // some records failed, the rest were written
inline constexpr int kExitContract = 2;  // configuration, contract or format failure

struct SynthArgs {
  fs::path out_dir;
  std::optional<int> utterances;
};
int synth_corpus_cmd(const PipelineConfig& cfg, const SynthArgs& a);

struct ProtocolArgs {
  fs::path protocol;
  fs::path audio_dir;
  fs::path out;
};
int parse_protocol_cmd(const PipelineConfig& cfg, const ProtocolArgs& a);

struct ExtractArgs {
  fs::path manifest;
  fs::path out;
};
int extract_features_cmd(const PipelineConfig& cfg, const ExtractArgs& a);

struct EvalArgs {
  fs::path input;
  fs::path out;
  std::optional<fs::path> classes_out;
  bool shuffle_labels = false;
  bool sum_over_dims = false;
};
int eval_features_cmd(const PipelineConfig& cfg, const EvalArgs& a);
int eval_clusters_cmd(const PipelineConfig& cfg, const EvalArgs& a);

struct TrainEmbedderArgs {
  fs::path manifest;
  fs::path out;
  std::optional<fs::path> log;
};
int train_embedder_cmd(const PipelineConfig& cfg, const TrainEmbedderArgs& a);

struct EmbedArgs {
  fs::path manifest;
  fs::path checkpoint;
  fs::path out;
};
int embed_cmd(const PipelineConfig& cfg, const EmbedArgs& a);

struct ProjectArgs {
  fs::path input;
  fs::path out_csv;
  fs::path out_svg;
};
int project_cmd(const PipelineConfig& cfg, const ProjectArgs& a);

struct TrainClassifierArgs {
  fs::path input;
  fs::path out;
};
int train_classifier_cmd(const PipelineConfig& cfg, const TrainClassifierArgs& a);

struct ClassifyArgs {
  fs::path model;
  fs::path input;
  fs::path out;
  std::optional<fs::path> confusion;
  std::optional<fs::path> predictions;
};
int classify_cmd(const PipelineConfig& cfg, const ClassifyArgs& a);

struct GradCheckArgs {
  int input_dim = 40;
  int hidden = 8;
  int embed_dim = 4;
  int classes = 2;
  int per_class = 2;
  int frames = 6;
  double eps = 1e-4;
  double tolerance = 1e-4;
  std::size_t sample = 0;
  std::optional<fs::path> out;
};
int grad_check_cmd(const PipelineConfig& cfg, const GradCheckArgs& a);

}  // namespace spoofprint::cli
