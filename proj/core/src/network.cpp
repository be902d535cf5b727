#include "spoofprint/network.hpp"

#include <cmath>

#include "spoofprint/errors.hpp"
#include "spoofprint/rng.hpp"

namespace spoofprint {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

ParamLayout::ParamLayout(const NetworkShape& shape) : shape_(shape) {
  if (shape.input_dim < 1 || shape.hidden < 1 || shape.embed_dim < 1) {
    throw ValidationError("network shape: all dimensions must be >= 1");
  }
  const std::size_t h = static_cast<std::size_t>(shape.hidden);
  const std::size_t e = static_cast<std::size_t>(shape.embed_dim);
  std::size_t off = 0;
  for (int k = 0; k < NetworkShape::kLayers; ++k) {
    const std::size_t in = static_cast<std::size_t>(shape.layer_input(k));
    Layer l{};
    l.w_input = off;
    off += 4 * h * in;
    l.w_recur = off;
    off += 4 * h * h;
    l.bias = off;
    off += 4 * h;
    l.w_proj = off;
    off += e * h;
    l.b_proj = off;
    off += e;
    layers_.push_back(l);
  }
  loss_scale_ = off;
}

std::string ParamLayout::describe(std::size_t i) const {
  if (i == loss_scale_) return "loss.scale";
  if (i == loss_scale_ + 1) return "loss.bias";
  const std::size_t h = static_cast<std::size_t>(shape_.hidden);
  for (int k = NetworkShape::kLayers - 1; k >= 0; --k) {
    const Layer& l = layers_[static_cast<std::size_t>(k)];
    if (i < l.w_input) continue;
    const std::string prefix = "layer" + std::to_string(k + 1) + ".";
    auto matrix = [&](const char* name, std::size_t base, std::size_t rows) {
      const std::size_t local = i - base;
      return prefix + name + "[" + std::to_string(local % rows) + "," + std::to_string(local / rows) + "]";
    };
    if (i >= l.b_proj) return prefix + "b_proj[" + std::to_string(i - l.b_proj) + "]";
    if (i >= l.w_proj) return matrix("w_proj", l.w_proj, static_cast<std::size_t>(shape_.embed_dim));
    if (i >= l.bias) return prefix + "bias[" + std::to_string(i - l.bias) + "]";
    if (i >= l.w_recur) return matrix("w_recur", l.w_recur, 4 * h);
    return matrix("w_input", l.w_input, 4 * h);
  }
  return "?";
}

EmbeddingNetworkParams init_params(const NetworkShape& shape, std::uint64_t seed) {
  const ParamLayout layout(shape);
  EmbeddingNetworkParams p;
  p.shape = shape;
  p.values.assign(layout.size(), 0.0);
  p.input_mean = Eigen::VectorXd::Zero(shape.input_dim);
  p.input_scale = Eigen::VectorXd::Ones(shape.input_dim);
  Rng rng(seed);
  auto fill = [&](auto&& block, int fan_in) {
    const double k = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index i = 0; i < block.size(); ++i) block.data()[i] = rng.uniform(-k, k);
  };
  for (int k = 0; k < NetworkShape::kLayers; ++k) {
    auto b = layer_blocks(layout, p.values.data(), k);
    fill(b.w_input, shape.layer_input(k));
    fill(b.w_recur, shape.hidden);
    fill(b.bias, shape.hidden);
    fill(b.w_proj, shape.hidden);
    fill(b.b_proj, shape.hidden);
    b.bias.segment(shape.hidden, shape.hidden).setOnes();
  }
  p.values[layout.loss_scale()] = kInitLossScale;
  p.values[layout.loss_bias()] = kInitLossBias;
  return p;
}

ForwardCache forward(const EmbeddingNetworkParams& p, const FrameMatrix& frames) {
  const NetworkShape& s = p.shape;
  if (frames.rows() < 1) throw ShapeError("embed: no frames");
  if (frames.cols() != s.input_dim) {
    throw ShapeError("embed: frame width " + std::to_string(frames.cols()) +
                     " does not match network input width " + std::to_string(s.input_dim));
  }
  const ParamLayout layout(s);
  const Eigen::Index T = frames.rows();
  const Eigen::Index H = s.hidden;

  ForwardCache cache;
  cache.layers.resize(NetworkShape::kLayers);
  Eigen::MatrixXd x = frames.transpose();
  x.colwise() -= p.input_mean;
  x.array().colwise() *= p.input_scale.array();

  for (int k = 0; k < NetworkShape::kLayers; ++k) {
    const auto b = layer_blocks(layout, p.values.data(), k);
    auto& L = cache.layers[static_cast<std::size_t>(k)];
    L.input = std::move(x);
    L.gates.resize(4 * H, T);
    L.cell.resize(H, T);
    L.hidden.resize(H, T);
    const Eigen::MatrixXd pre = (b.w_input * L.input).colwise() + b.bias;
    Eigen::VectorXd z(4 * H);
    for (Eigen::Index t = 0; t < T; ++t) {
      z = pre.col(t);
      if (t > 0) z.noalias() += b.w_recur * L.hidden.col(t - 1);
      for (Eigen::Index j = 0; j < H; ++j) {
        const double i_g = sigmoid(z(j));
        const double f_g = sigmoid(z(H + j));
        const double c_g = std::tanh(z(2 * H + j));
        const double o_g = sigmoid(z(3 * H + j));
        const double c_prev = t > 0 ? L.cell(j, t - 1) : 0.0;
        const double c = f_g * c_prev + i_g * c_g;
        L.gates(j, t) = i_g;
        L.gates(H + j, t) = f_g;
        L.gates(2 * H + j, t) = c_g;
        L.gates(3 * H + j, t) = o_g;
        L.cell(j, t) = c;
        L.hidden(j, t) = o_g * std::tanh(c);
      }
    }
    if (k + 1 < NetworkShape::kLayers) {
      x = (b.w_proj * L.hidden).colwise() + b.b_proj;
    } else {
      cache.projection = b.w_proj * L.hidden.col(T - 1) + b.b_proj;
    }
  }
  const double norm = std::max(cache.projection.norm(), 1e-12);
  cache.embedding = cache.projection / norm;
  return cache;
}

Eigen::VectorXd embed(const EmbeddingNetworkParams& p, const FrameMatrix& frames) {
  return forward(p, frames).embedding;
}

void backward(const EmbeddingNetworkParams& p, const ForwardCache& cache,
              const Eigen::VectorXd& d_embedding, std::vector<double>& grad) {
  const NetworkShape& s = p.shape;
  const ParamLayout layout(s);
  if (grad.size() != layout.size()) grad.assign(layout.size(), 0.0);
  const Eigen::Index H = s.hidden;
  const Eigen::Index T = cache.layers.front().hidden.cols();

  // Through the L2 normalization.
  const double norm = std::max(cache.projection.norm(), 1e-12);
  const Eigen::VectorXd& e = cache.embedding;
  const Eigen::VectorXd d_proj_last = (d_embedding - e * e.dot(d_embedding)) / norm;

  // dY for the current stack's projection output, [E x T].
  Eigen::MatrixXd d_out = Eigen::MatrixXd::Zero(s.embed_dim, T);
  d_out.col(T - 1) = d_proj_last;

  for (int k = NetworkShape::kLayers - 1; k >= 0; --k) {
    const auto b = layer_blocks(layout, p.values.data(), k);
    auto g = layer_blocks(layout, grad.data(), k);
    const auto& L = cache.layers[static_cast<std::size_t>(k)];

    g.w_proj.noalias() += d_out * L.hidden.transpose();
    g.b_proj += d_out.rowwise().sum();
    const Eigen::MatrixXd d_hidden = b.w_proj.transpose() * d_out;

    Eigen::MatrixXd d_pre(4 * H, T);
    Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(H);
    Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(H);
    for (Eigen::Index t = T - 1; t >= 0; --t) {
      for (Eigen::Index j = 0; j < H; ++j) {
        const double i_g = L.gates(j, t);
        const double f_g = L.gates(H + j, t);
        const double c_g = L.gates(2 * H + j, t);
        const double o_g = L.gates(3 * H + j, t);
        const double tc = std::tanh(L.cell(j, t));
        const double c_prev = t > 0 ? L.cell(j, t - 1) : 0.0;
        const double dh = d_hidden(j, t) + dh_next(j);
        const double dc = dh * o_g * (1.0 - tc * tc) + dc_next(j);
        d_pre(j, t) = dc * c_g * i_g * (1.0 - i_g);
        d_pre(H + j, t) = dc * c_prev * f_g * (1.0 - f_g);
        d_pre(2 * H + j, t) = dc * i_g * (1.0 - c_g * c_g);
        d_pre(3 * H + j, t) = dh * tc * o_g * (1.0 - o_g);
        dc_next(j) = dc * f_g;
      }
      dh_next.noalias() = b.w_recur.transpose() * d_pre.col(t);
    }
    g.w_input.noalias() += d_pre * L.input.transpose();
    if (T > 1) {
      g.w_recur.noalias() += d_pre.rightCols(T - 1) * L.hidden.leftCols(T - 1).transpose();
    }
    g.bias += d_pre.rowwise().sum();
    if (k > 0) d_out.noalias() = b.w_input.transpose() * d_pre;
  }
}

}  // namespace spoofprint
