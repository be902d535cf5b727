#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spoofprint/manifest.hpp"

namespace spoofprint {

struct ClassifierConfig {
  double learning_rate = 0.001;
  int epochs = 50;
  int batch_size = 64;
  std::uint64_t seed = 1;
};

/// Feed-forward attacker-ID classifier: three ReLU hidden layers of width 50 and a softmax
/// output over `classes`. Inputs are standardized with statistics frozen from the training set.
struct MLPParams {
  static constexpr int kHiddenLayers = 3;
  static constexpr int kWidth = 50;

  int input_dim = 0;
  std::vector<AttackerLabel> classes;  // sorted; output index order
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_scale;       // 1/std, or 1 for constant features
  std::vector<Eigen::MatrixXd> weights;  // [out x in] per layer, 4 layers
  std::vector<Eigen::VectorXd> biases;

  /// All-zero network with identity standardization.
  static MLPParams zeros(int input_dim, std::vector<AttackerLabel> classes);
};

/// Mini-batch softmax cross-entropy training with Adam (0.9, 0.999, 1e-8) and He-style init.
/// Throws ShapeError on row/label mismatch and ContractError with fewer than 2 classes.
MLPParams train_classifier(const Eigen::MatrixXd& X, const std::vector<AttackerLabel>& y,
                           const ClassifierConfig& cfg);

/// Output-layer logits for one raw (unstandardized) input.
Eigen::VectorXd logits(const MLPParams& p, const Eigen::VectorXd& x);

/// Numerically stable softmax.
Eigen::VectorXd softmax(const Eigen::VectorXd& z);

/// First index of the maximum (lowest index wins ties).
std::size_t argmax(const Eigen::VectorXd& v);

struct Prediction {
  AttackerLabel label;
  std::size_t index = 0;
  Eigen::VectorXd probabilities;
};

Prediction predict(const MLPParams& p, const Eigen::VectorXd& x);

struct ClassifierReport {
  std::vector<AttackerLabel> classes;  // union of model classes and test labels, sorted
  Eigen::MatrixXi confusion;           // rows: true class, columns: predicted class
  Eigen::VectorXd recall;              // per class; 0 for classes without test samples
  double accuracy = 0.0;
  std::size_t total = 0;
};

ClassifierReport evaluate(const MLPParams& p, const Eigen::MatrixXd& X, const std::vector<AttackerLabel>& y);

/// Report from paired truth / prediction labels. Throws ContractError when empty.
ClassifierReport summarize_predictions(const std::vector<AttackerLabel>& truth,
                                       const std::vector<AttackerLabel>& predicted,
                                       std::vector<AttackerLabel> classes = {});

inline constexpr std::array<char, 4> kClassifierMagic{'A', 'C', 'L', 'F'};
inline constexpr std::uint32_t kClassifierVersion = 1;

void save_classifier(const MLPParams& p, const std::filesystem::path& path);
MLPParams load_classifier(const std::filesystem::path& path);

/// Confusion matrix CSV with a header of predicted labels.
std::string confusion_csv(const ClassifierReport& r);
/// {"accuracy", "total", "classes", "recall": {label: value}}.
std::string report_json(const ClassifierReport& r);

}  // namespace spoofprint
