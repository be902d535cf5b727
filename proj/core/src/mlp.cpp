#include "spoofprint/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "spoofprint/container.hpp"
#include "spoofprint/csv.hpp"
#include "spoofprint/errors.hpp"
#include "spoofprint/rng.hpp"

namespace spoofprint {
namespace {

std::vector<int> layer_sizes(int input_dim, std::size_t n_classes) {
  std::vector<int> sizes{input_dim};
  for (int i = 0; i < MLPParams::kHiddenLayers; ++i) sizes.push_back(MLPParams::kWidth);
  sizes.push_back(static_cast<int>(n_classes));
  return sizes;
}

Eigen::MatrixXd standardize(const MLPParams& p, const Eigen::MatrixXd& X) {
  return (X.rowwise() - p.feature_mean.transpose()).array().rowwise() * p.feature_scale.transpose().array();
}

}  // namespace

MLPParams MLPParams::zeros(int input_dim, std::vector<AttackerLabel> classes) {
  MLPParams p;
  p.input_dim = input_dim;
  p.classes = std::move(classes);
  p.feature_mean = Eigen::VectorXd::Zero(input_dim);
  p.feature_scale = Eigen::VectorXd::Ones(input_dim);
  const auto sizes = layer_sizes(input_dim, p.classes.size());
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    p.weights.push_back(Eigen::MatrixXd::Zero(sizes[l + 1], sizes[l]));
    p.biases.push_back(Eigen::VectorXd::Zero(sizes[l + 1]));
  }
  return p;
}

MLPParams train_classifier(const Eigen::MatrixXd& X, const std::vector<AttackerLabel>& y,
                           const ClassifierConfig& cfg) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw ShapeError("train_classifier: one label per row required");
  if (X.rows() == 0 || X.cols() == 0) throw ShapeError("train_classifier: empty feature matrix");
  const std::set<AttackerLabel> unique(y.begin(), y.end());
  if (unique.size() < 2) throw ContractError("train_classifier: need at least 2 classes");
  if (cfg.epochs < 0 || cfg.batch_size < 1 || !(cfg.learning_rate > 0.0)) {
    throw ValidationError("classifier config: need epochs >= 0, batch_size >= 1, learning_rate > 0");
  }

  MLPParams p = MLPParams::zeros(static_cast<int>(X.cols()), {unique.begin(), unique.end()});
  const double n = static_cast<double>(X.rows());
  p.feature_mean = X.colwise().mean().transpose();
  const Eigen::VectorXd var = ((X.rowwise() - p.feature_mean.transpose()).colwise().squaredNorm() / n).transpose();
  p.feature_scale = var.unaryExpr([](double v) { return v > 1e-24 ? 1.0 / std::sqrt(v) : 1.0; });

  std::map<AttackerLabel, int> index;
  for (std::size_t k = 0; k < p.classes.size(); ++k) index[p.classes[k]] = static_cast<int>(k);
  std::vector<int> target(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) target[i] = index[y[i]];

  Rng rng(cfg.seed);
  for (auto& W : p.weights) {
    const double s = std::sqrt(2.0 / static_cast<double>(W.cols()));
    for (Eigen::Index i = 0; i < W.size(); ++i) W.data()[i] = s * rng.normal();
  }

  const std::size_t L = p.weights.size();
  std::vector<Eigen::MatrixXd> mW, vW;
  std::vector<Eigen::VectorXd> mb, vb;
  for (std::size_t l = 0; l < L; ++l) {
    mW.push_back(Eigen::MatrixXd::Zero(p.weights[l].rows(), p.weights[l].cols()));
    vW.push_back(mW.back());
    mb.push_back(Eigen::VectorXd::Zero(p.biases[l].size()));
    vb.push_back(mb.back());
  }
  constexpr double b1 = 0.9;
  constexpr double b2 = 0.999;
  constexpr double eps = 1e-8;

  const Eigen::MatrixXd Z = standardize(p, X);
  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), 0);
  long t = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const auto B = static_cast<Eigen::Index>(stop - start);
      Eigen::MatrixXd a(Z.cols(), B);
      for (Eigen::Index j = 0; j < B; ++j) a.col(j) = Z.row(static_cast<Eigen::Index>(order[start + j])).transpose();

      std::vector<Eigen::MatrixXd> acts{a};
      for (std::size_t l = 0; l < L; ++l) {
        Eigen::MatrixXd z = (p.weights[l] * acts.back()).colwise() + p.biases[l];
        if (l + 1 < L) z = z.cwiseMax(0.0);
        acts.push_back(std::move(z));
      }
      Eigen::MatrixXd delta = acts.back();
      for (Eigen::Index j = 0; j < B; ++j) {
        delta.col(j) = softmax(delta.col(j));
        delta(target[order[start + j]], j) -= 1.0;
      }
      delta /= static_cast<double>(B);

      ++t;
      const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
      const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
      for (std::size_t l = L; l-- > 0;) {
        const Eigen::MatrixXd gW = delta * acts[l].transpose();
        const Eigen::VectorXd gb = delta.rowwise().sum();
        if (l > 0) {
          delta = (p.weights[l].transpose() * delta).cwiseProduct(
              acts[l].unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
        }
        mW[l] = b1 * mW[l] + (1.0 - b1) * gW;
        vW[l] = b2 * vW[l] + (1.0 - b2) * gW.cwiseAbs2();
        mb[l] = b1 * mb[l] + (1.0 - b1) * gb;
        vb[l] = b2 * vb[l] + (1.0 - b2) * gb.cwiseAbs2();
        p.weights[l].array() -= cfg.learning_rate * (mW[l].array() / c1) / ((vW[l].array() / c2).sqrt() + eps);
        p.biases[l].array() -= cfg.learning_rate * (mb[l].array() / c1) / ((vb[l].array() / c2).sqrt() + eps);
      }
    }
  }
  return p;
}

Eigen::VectorXd logits(const MLPParams& p, const Eigen::VectorXd& x) {
  if (x.size() != p.input_dim) {
    throw ShapeError("predict: input has dimension " + std::to_string(x.size()) + ", classifier expects " +
                     std::to_string(p.input_dim));
  }
  Eigen::VectorXd a = (x - p.feature_mean).cwiseProduct(p.feature_scale);
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    a = p.weights[l] * a + p.biases[l];
    if (l + 1 < p.weights.size()) a = a.cwiseMax(0.0);
  }
  return a;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  const Eigen::ArrayXd e = (z.array() - z.maxCoeff()).exp();
  return (e / e.sum()).matrix();
}

std::size_t argmax(const Eigen::VectorXd& v) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
  }
  return best;
}

Prediction predict(const MLPParams& p, const Eigen::VectorXd& x) {
  const Eigen::VectorXd z = logits(p, x);
  Prediction out;
  out.index = argmax(z);
  out.label = p.classes[out.index];
  out.probabilities = softmax(z);
  return out;
}

ClassifierReport summarize_predictions(const std::vector<AttackerLabel>& truth,
                                       const std::vector<AttackerLabel>& predicted,
                                       std::vector<AttackerLabel> classes) {
  if (truth.size() != predicted.size()) throw ShapeError("report: truth and prediction counts differ");
  if (truth.empty()) throw ContractError("report: empty test set");
  std::set<AttackerLabel> all(classes.begin(), classes.end());
  all.insert(truth.begin(), truth.end());
  all.insert(predicted.begin(), predicted.end());
  ClassifierReport r;
  r.classes.assign(all.begin(), all.end());
  std::map<AttackerLabel, Eigen::Index> index;
  for (std::size_t k = 0; k < r.classes.size(); ++k) index[r.classes[k]] = static_cast<Eigen::Index>(k);
  const auto K = static_cast<Eigen::Index>(r.classes.size());
  r.confusion = Eigen::MatrixXi::Zero(K, K);
  for (std::size_t i = 0; i < truth.size(); ++i) ++r.confusion(index[truth[i]], index[predicted[i]]);
  r.total = truth.size();
  r.accuracy = static_cast<double>(r.confusion.trace()) / static_cast<double>(r.total);
  r.recall = Eigen::VectorXd::Zero(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const int row = r.confusion.row(k).sum();
    if (row > 0) r.recall(k) = static_cast<double>(r.confusion(k, k)) / row;
  }
  return r;
}

ClassifierReport evaluate(const MLPParams& p, const Eigen::MatrixXd& X, const std::vector<AttackerLabel>& y) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw ShapeError("evaluate: one label per row required");
  std::vector<AttackerLabel> predicted;
  predicted.reserve(y.size());
  for (Eigen::Index i = 0; i < X.rows(); ++i) predicted.push_back(predict(p, X.row(i).transpose()).label);
  return summarize_predictions(y, predicted, p.classes);
}

void save_classifier(const MLPParams& p, const std::filesystem::path& path) {
  Container c;
  c.magic = kClassifierMagic;
  c.version = kClassifierVersion;
  c.dims = {static_cast<std::uint64_t>(p.input_dim), MLPParams::kHiddenLayers, MLPParams::kWidth,
            p.classes.size()};
  for (const auto& l : p.classes) c.strings.push_back(l.str());
  auto append = [&](const auto& m) { c.weights.insert(c.weights.end(), m.data(), m.data() + m.size()); };
  append(p.feature_mean);
  append(p.feature_scale);
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    append(p.weights[l]);
    append(p.biases[l]);
  }
  write_container(c, path);
}

MLPParams load_classifier(const std::filesystem::path& path) {
  const Container c = read_container(path, kClassifierMagic, kClassifierVersion);
  const std::string where = path.string() + ": ";
  if (c.dims.size() != 4) throw FormatError(where + "dimension table must hold 4 entries");
  if (c.dims[1] != MLPParams::kHiddenLayers) throw FormatError(where + "dimension mismatch in hidden layer count");
  if (c.dims[2] != MLPParams::kWidth) throw FormatError(where + "dimension mismatch in hidden width");
  if (c.dims[3] != c.strings.size() || c.dims[3] < 2) throw FormatError(where + "dimension mismatch in class count");
  std::vector<AttackerLabel> classes;
  for (const auto& s : c.strings) classes.emplace_back(s);
  MLPParams p = MLPParams::zeros(static_cast<int>(c.dims[0]), std::move(classes));
  std::size_t expect = 2 * static_cast<std::size_t>(p.input_dim);
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    expect += static_cast<std::size_t>(p.weights[l].size() + p.biases[l].size());
  }
  if (c.weights.size() != expect) {
    throw FormatError(where + "dimension mismatch in weights: expected " + std::to_string(expect) + ", found " +
                      std::to_string(c.weights.size()));
  }
  std::size_t off = 0;
  auto take = [&](auto& m) {
    std::copy_n(c.weights.begin() + static_cast<std::ptrdiff_t>(off), m.size(), m.data());
    off += static_cast<std::size_t>(m.size());
  };
  take(p.feature_mean);
  take(p.feature_scale);
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    take(p.weights[l]);
    take(p.biases[l]);
  }
  return p;
}

std::string confusion_csv(const ClassifierReport& r) {
  std::ostringstream out;
  out << "true\\predicted";
  for (const auto& l : r.classes) out << ',' << csv::quote(l.str());
  out << "\r\n";
  for (std::size_t i = 0; i < r.classes.size(); ++i) {
    out << csv::quote(r.classes[i].str());
    for (std::size_t j = 0; j < r.classes.size(); ++j) {
      out << ',' << r.confusion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    out << "\r\n";
  }
  return out.str();
}

std::string report_json(const ClassifierReport& r) {
  nlohmann::ordered_json j;
  j["accuracy"] = r.accuracy;
  j["total"] = r.total;
  j["classes"] = nlohmann::json::array();
  for (const auto& l : r.classes) j["classes"].push_back(l.str());
  nlohmann::ordered_json recall;
  for (std::size_t k = 0; k < r.classes.size(); ++k) recall[r.classes[k].str()] = r.recall(static_cast<Eigen::Index>(k));
  j["recall"] = recall;
  return j.dump(2) + "\n";
}

}  // namespace spoofprint
