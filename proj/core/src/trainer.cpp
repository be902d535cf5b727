#include "spoofprint/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "spoofprint/angular_loss.hpp"
#include "spoofprint/errors.hpp"
#include "spoofprint/parallel.hpp"
#include "spoofprint/rng.hpp"

namespace spoofprint {

TrainingConfig TrainingConfig::desk() {
  TrainingConfig tc;
  tc.hidden = 32;
  tc.embed_dim = 16;
  return tc;
}

void validate(const TrainingConfig& tc) {
  if (tc.classes_per_batch < 2) throw ValidationError("training config: classes_per_batch (N) must be >= 2");
  if (tc.utterances_per_class < 2) throw ValidationError("training config: utterances_per_class (M) must be >= 2");
  if (!(tc.learning_rate > 0.0)) throw ValidationError("training config: learning_rate must be positive");
  if (tc.steps < 0) throw ValidationError("training config: steps must be >= 0");
  if (!(tc.clip_norm > 0.0)) throw ValidationError("training config: clip_norm must be positive");
  if (tc.hidden < 1 || tc.embed_dim < 1) throw ValidationError("training config: hidden and embed_dim must be >= 1");
}

namespace {

Eigen::MatrixXd stack_embeddings(const std::vector<ForwardCache>& caches) {
  Eigen::MatrixXd E(static_cast<Eigen::Index>(caches.size()), caches.front().embedding.size());
  for (std::size_t i = 0; i < caches.size(); ++i) {
    E.row(static_cast<Eigen::Index>(i)) = caches[i].embedding.transpose();
  }
  return E;
}

void check_batch(const Batch& batch) {
  if (batch.sequences.size() != static_cast<std::size_t>(batch.n_classes) * batch.n_per_class) {
    throw ShapeError("batch: sequence count does not equal N x M");
  }
}

}  // namespace

double batch_loss(const EmbeddingNetworkParams& p, const Batch& batch) {
  check_batch(batch);
  std::vector<ForwardCache> caches;
  caches.reserve(batch.sequences.size());
  for (const auto& s : batch.sequences) caches.push_back(forward(p, s));
  return angular_proto_loss(stack_embeddings(caches), batch.n_classes, batch.n_per_class,
                            p.loss_scale(), p.loss_bias())
      .loss;
}

LossAndGradient batch_gradient(const EmbeddingNetworkParams& p, const Batch& batch) {
  check_batch(batch);
  std::vector<ForwardCache> caches;
  caches.reserve(batch.sequences.size());
  for (const auto& s : batch.sequences) caches.push_back(forward(p, s));
  const auto loss = angular_proto_loss(stack_embeddings(caches), batch.n_classes,
                                       batch.n_per_class, p.loss_scale(), p.loss_bias(), true);
  const ParamLayout layout(p.shape);
  LossAndGradient out;
  out.loss = loss.loss;
  out.similarity = loss.similarity;
  out.grad.assign(layout.size(), 0.0);
  for (std::size_t i = 0; i < caches.size(); ++i) {
    backward(p, caches[i], loss.d_embeddings.row(static_cast<Eigen::Index>(i)).transpose(), out.grad);
  }
  out.grad[layout.loss_scale()] += loss.d_scale;
  out.grad[layout.loss_bias()] += loss.d_bias;
  return out;
}

void fit_input_standardization(EmbeddingNetworkParams& p, const std::vector<FrameMatrix>& sequences) {
  const Eigen::Index d = p.shape.input_dim;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(d);
  double count = 0.0;
  for (const auto& s : sequences) {
    if (s.cols() != d) throw ShapeError("input standardization: frame width mismatch");
    sum += s.colwise().sum().transpose();
    sq += s.array().square().colwise().sum().matrix().transpose();
    count += static_cast<double>(s.rows());
  }
  if (count < 2.0) throw ContractError("input standardization: need at least two frames");
  p.input_mean = sum / count;
  const Eigen::VectorXd var = (sq / count - p.input_mean.cwiseAbs2()).cwiseMax(0.0);
  p.input_scale = var.unaryExpr([](double v) { return v > 1e-12 ? 1.0 / std::sqrt(v) : 1.0; });
}

std::vector<FrameMatrix> compute_log_mels(const DatasetManifest& m, const MelConfig& mc,
                                          unsigned threads) {
  std::vector<FrameMatrix> out(m.size());
  parallel_for(m.size(), threads, [&](std::size_t i) {
    out[i] = log_mel(load_waveform(m.records()[i]), mc);
  });
  return out;
}

TrainingResult train(const DatasetManifest& manifest, const TrainingConfig& tc, const MelConfig& mc,
                     const TrainingObserver& observer) {
  validate(tc);
  return train(manifest, compute_log_mels(manifest, mc), tc, observer);
}

TrainingResult train(const DatasetManifest& manifest, const std::vector<FrameMatrix>& frames,
                     const TrainingConfig& tc, const TrainingObserver& observer) {
  validate(tc);
  if (frames.size() != manifest.size()) throw ShapeError("train: one frame matrix per record required");
  if (!manifest.fully_labeled()) throw ContractError("train: every record must be labeled");

  std::map<AttackerLabel, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < manifest.size(); ++i) by_label[*manifest.records()[i].label].push_back(i);
  std::vector<std::vector<std::size_t>> pools;
  for (auto& [label, idx] : by_label) {
    if (idx.size() >= static_cast<std::size_t>(tc.utterances_per_class)) pools.push_back(idx);
  }
  if (pools.size() < static_cast<std::size_t>(tc.classes_per_batch)) {
    throw ContractError("train: need " + std::to_string(tc.classes_per_batch) + " labels with at least " +
                        std::to_string(tc.utterances_per_class) + " utterances, found " +
                        std::to_string(pools.size()));
  }

  NetworkShape shape;
  shape.input_dim = static_cast<int>(frames.front().cols());
  shape.hidden = tc.hidden;
  shape.embed_dim = tc.embed_dim;
  TrainingResult result;
  result.params = init_params(shape, Rng::mix(tc.seed, 1));
  fit_input_standardization(result.params, frames);
  const ParamLayout layout(shape);

  std::vector<double> adam_m;
  std::vector<double> adam_v;
  if (tc.optimizer == Optimizer::adam) {
    adam_m.assign(layout.size(), 0.0);
    adam_v.assign(layout.size(), 0.0);
  }

  Rng rng(Rng::mix(tc.seed, 2));
  std::vector<std::size_t> class_order(pools.size());
  for (int step = 0; step < tc.steps; ++step) {
    for (std::size_t i = 0; i < class_order.size(); ++i) class_order[i] = i;
    rng.shuffle(class_order.begin(), class_order.end());
    Batch batch;
    batch.n_classes = tc.classes_per_batch;
    batch.n_per_class = tc.utterances_per_class;
    for (int j = 0; j < tc.classes_per_batch; ++j) {
      std::vector<std::size_t> pool = pools[class_order[static_cast<std::size_t>(j)]];
      rng.shuffle(pool.begin(), pool.end());
      for (int m = 0; m < tc.utterances_per_class; ++m) {
        batch.sequences.push_back(frames[pool[static_cast<std::size_t>(m)]]);
      }
    }

    LossAndGradient lg = batch_gradient(result.params, batch);
    double sq = 0.0;
    for (double g : lg.grad) sq += g * g;
    const double norm = std::sqrt(sq);
    const double clip = norm > tc.clip_norm ? tc.clip_norm / norm : 1.0;

    auto& values = result.params.values;
    if (tc.optimizer == Optimizer::sgd) {
      for (std::size_t i = 0; i < values.size(); ++i) values[i] -= tc.learning_rate * clip * lg.grad[i];
    } else {
      constexpr double b1 = 0.9;
      constexpr double b2 = 0.999;
      constexpr double eps = 1e-8;
      const double c1 = 1.0 - std::pow(b1, step + 1);
      const double c2 = 1.0 - std::pow(b2, step + 1);
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double g = clip * lg.grad[i];
        adam_m[i] = b1 * adam_m[i] + (1.0 - b1) * g;
        adam_v[i] = b2 * adam_v[i] + (1.0 - b2) * g * g;
        values[i] -= tc.learning_rate * (adam_m[i] / c1) / (std::sqrt(adam_v[i] / c2) + eps);
      }
    }
    values[layout.loss_scale()] = std::max(values[layout.loss_scale()], kMinLossScale);

    TrainingLogEntry entry{step, lg.loss, norm};
    result.log.push_back(entry);
    if (observer) observer(entry);
  }
  return result;
}

}  // namespace spoofprint
