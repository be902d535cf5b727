#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "spoofprint/manifest.hpp"
#include "spoofprint/mel.hpp"
#include "spoofprint/network.hpp"

namespace spoofprint {

enum class Optimizer { sgd, adam };

struct TrainingConfig {
  int classes_per_batch = 4;     // N
  int utterances_per_class = 3;  // M
  double learning_rate = 0.05;
  int steps = 300;
  double clip_norm = 3.0;
  std::uint64_t seed = 1;
  int hidden = 768;
  int embed_dim = 256;
  Optimizer optimizer = Optimizer::sgd;

  /// Small network (hidden 32, embedding 16) for CPU-scale runs.
  static TrainingConfig desk();
};

void validate(const TrainingConfig& tc);

/// N classes x M sequences of frames; sequence j*M + m is utterance m of class j.
struct Batch {
  std::vector<FrameMatrix> sequences;
  int n_classes = 0;
  int n_per_class = 0;
};

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> grad;  // ParamLayout order
  Eigen::MatrixXd similarity;
};

double batch_loss(const EmbeddingNetworkParams& p, const Batch& batch);
LossAndGradient batch_gradient(const EmbeddingNetworkParams& p, const Batch& batch);

struct TrainingLogEntry {
  int step = 0;
  double loss = 0.0;
  double grad_norm = 0.0;  // before clipping
};

struct TrainingResult {
  EmbeddingNetworkParams params;
  std::vector<TrainingLogEntry> log;
};

/// Per-band mean and inverse standard deviation over every frame of every sequence.
void fit_input_standardization(EmbeddingNetworkParams& p, const std::vector<FrameMatrix>& sequences);

/// Log-mel frames for every record, computed on `threads` workers; output order = manifest order.
std::vector<FrameMatrix> compute_log_mels(const DatasetManifest& m, const MelConfig& mc,
                                          unsigned threads = 1);

using TrainingObserver = std::function<void(const TrainingLogEntry&)>;

/// Episodic training with the angular prototypical loss. Deterministic given tc.seed.
TrainingResult train(const DatasetManifest& manifest, const TrainingConfig& tc, const MelConfig& mc,
                     const TrainingObserver& observer = {});

/// Same as train() on precomputed frames (one entry per manifest record).
TrainingResult train(const DatasetManifest& manifest, const std::vector<FrameMatrix>& frames,
                     const TrainingConfig& tc, const TrainingObserver& observer = {});

}  // namespace spoofprint
