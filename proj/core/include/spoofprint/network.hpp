#pragma once

#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "spoofprint/mel.hpp"

namespace spoofprint {

/// Sizes of the three-stack recurrent embedder. Each stack is an LSTM of width
/// `hidden` whose output feeds a linear projection to `embed_dim`.
struct NetworkShape {
  static constexpr int kLayers = 3;
  int input_dim = 40;
  int hidden = 768;
  int embed_dim = 256;

  int layer_input(int layer) const { return layer == 0 ? input_dim : embed_dim; }
  bool operator==(const NetworkShape&) const = default;
};

using MatrixMap = Eigen::Map<Eigen::MatrixXd>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;
using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

/// Offsets of every parameter block inside one flat buffer. Gate rows are ordered
/// input, forget, cell, output. The last two entries are the loss scale and bias.
class ParamLayout {
 public:
  struct Layer {
    std::size_t w_input;   // [4H x in]
    std::size_t w_recur;   // [4H x H]
    std::size_t bias;      // [4H]
    std::size_t w_proj;    // [E x H]
    std::size_t b_proj;    // [E]
  };

  explicit ParamLayout(const NetworkShape& shape);

  const NetworkShape& shape() const noexcept { return shape_; }
  const Layer& layer(int k) const { return layers_[static_cast<std::size_t>(k)]; }
  std::size_t loss_scale() const noexcept { return loss_scale_; }
  std::size_t loss_bias() const noexcept { return loss_scale_ + 1; }
  std::size_t size() const noexcept { return loss_scale_ + 2; }

  /// Human-readable name of flat index i, e.g. "layer1.w_recur[3,2]".
  std::string describe(std::size_t i) const;

 private:
  NetworkShape shape_;
  std::vector<Layer> layers_;
  std::size_t loss_scale_ = 0;
};

/// Typed views over one flat buffer laid out by ParamLayout (parameters or gradients).
template <typename Scalar>
struct LayerBlocks {
  using Mat = Eigen::Map<std::conditional_t<std::is_const_v<Scalar>, const Eigen::MatrixXd, Eigen::MatrixXd>>;
  using Vec = Eigen::Map<std::conditional_t<std::is_const_v<Scalar>, const Eigen::VectorXd, Eigen::VectorXd>>;
  Mat w_input;
  Mat w_recur;
  Vec bias;
  Mat w_proj;
  Vec b_proj;
};

template <typename Scalar>
LayerBlocks<Scalar> layer_blocks(const ParamLayout& layout, Scalar* data, int k) {
  const auto& s = layout.shape();
  const auto& l = layout.layer(k);
  const Eigen::Index h = s.hidden;
  const Eigen::Index in = s.layer_input(k);
  const Eigen::Index e = s.embed_dim;
  return {{data + l.w_input, 4 * h, in},
          {data + l.w_recur, 4 * h, h},
          {data + l.bias, 4 * h},
          {data + l.w_proj, e, h},
          {data + l.b_proj, e}};
}

/// All trainable weights plus the frozen input standardization applied to log-mel frames.
struct EmbeddingNetworkParams {
  NetworkShape shape;
  std::vector<double> values;   // laid out by ParamLayout(shape)
  Eigen::VectorXd input_mean;   // subtracted from each frame
  Eigen::VectorXd input_scale;  // then multiplied elementwise

  ParamLayout layout() const { return ParamLayout(shape); }
  double loss_scale() const { return values[layout().loss_scale()]; }
  double loss_bias() const { return values[layout().loss_bias()]; }
};

inline constexpr double kInitLossScale = 10.0;
inline constexpr double kInitLossBias = -5.0;
inline constexpr double kMinLossScale = 1e-4;

/// Uniform(-k, k) weights and biases with k = 1/sqrt(fan_in) (hidden width for gate biases),
/// then forget-gate biases set to 1,
/// loss scale 10 and bias -5. Identity input standardization.
EmbeddingNetworkParams init_params(const NetworkShape& shape, std::uint64_t seed);

/// Activations of one sequence, kept for the backward pass.
struct ForwardCache {
  struct Layer {
    Eigen::MatrixXd input;   // [in x T]
    Eigen::MatrixXd gates;   // [4H x T] post-activation i, f, g, o
    Eigen::MatrixXd cell;    // [H x T]
    Eigen::MatrixXd hidden;  // [H x T]
  };
  std::vector<Layer> layers;
  Eigen::VectorXd projection;  // final-timestep output of stack 3, before normalization
  Eigen::VectorXd embedding;   // unit norm
};

/// Runs the three stacks over all frames; throws ShapeError on width mismatch.
ForwardCache forward(const EmbeddingNetworkParams& p, const FrameMatrix& frames);

/// L2-normalized final-timestep projection of stack 3.
Eigen::VectorXd embed(const EmbeddingNetworkParams& p, const FrameMatrix& frames);

/// Accumulates dLoss/dparams into grad (same layout as p.values) given dLoss/dembedding.
void backward(const EmbeddingNetworkParams& p, const ForwardCache& cache,
              const Eigen::VectorXd& d_embedding, std::vector<double>& grad);

}  // namespace spoofprint
