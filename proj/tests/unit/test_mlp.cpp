#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "spoofprint/errors.hpp"
#include "spoofprint/mlp.hpp"

using namespace spoofprint;
namespace fs = std::filesystem;

namespace {

struct Data {
  Eigen::MatrixXd X;
  std::vector<AttackerLabel> y;
};

Data blobs(int per_class, int classes, int d, double spread, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, spread);
  Data out{Eigen::MatrixXd(per_class * classes, d), {}};
  for (int i = 0; i < per_class * classes; ++i) {
    const int c = i % classes;
    for (int k = 0; k < d; ++k) out.X(i, k) = (k == c % d ? 3.0 * (1 + c / d) : 0.0) + noise(gen);
    out.y.emplace_back("A" + std::to_string(10 + c));
  }
  return out;
}

Data take(const Data& d, int from, int to) {
  Data out{d.X.middleRows(from, to - from), {d.y.begin() + from, d.y.begin() + to}};
  return out;
}

ClassifierConfig fast_config() {
  ClassifierConfig cfg;
  cfg.epochs = 30;
  return cfg;
}

}  // namespace

TEST(Softmax, SumsToOneAndShiftInvariant) {
  const Eigen::VectorXd z = (Eigen::VectorXd(4) << 1000.0, -3.0, 2.0, 999.5).finished();
  const Eigen::VectorXd p = softmax(z);
  EXPECT_NEAR(p.sum(), 1.0, 1e-12);
  EXPECT_TRUE(p.allFinite());
  EXPECT_EQ(argmax(z), argmax((z.array() + 123.0).matrix()));
  EXPECT_LT((softmax((z.array() - 50.0).matrix()) - p).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Argmax, LowestIndexWinsTies) {
  EXPECT_EQ(argmax((Eigen::VectorXd(4) << 1.0, 3.0, 3.0, 2.0).finished()), 1u);
  EXPECT_EQ(argmax(Eigen::VectorXd::Zero(5)), 0u);
}

TEST(MlpPredict, ZeroNetworkIsUniform) {
  const MLPParams p = MLPParams::zeros(3, {AttackerLabel("A01"), AttackerLabel("A02"), AttackerLabel("A03"), AttackerLabel("A04")});
  const Prediction pr = predict(p, Eigen::Vector3d(0.3, -2.0, 8.0));
  for (Eigen::Index k = 0; k < 4; ++k) EXPECT_NEAR(pr.probabilities(k), 0.25, 1e-15);
  EXPECT_EQ(pr.index, 0u);
  EXPECT_EQ(pr.label, AttackerLabel("A01"));
}

TEST(MlpPredict, DimensionMismatchIsShapeError) {
  const MLPParams p = MLPParams::zeros(3, {AttackerLabel("A01"), AttackerLabel("A02")});
  EXPECT_THROW(predict(p, Eigen::Vector2d(1.0, 2.0)), ShapeError);
}

TEST(MlpTrain, SeparableBlobsAreLearnedPerfectly) {
  const Data all = blobs(100, 2, 2, 0.3, 1);
  const MLPParams p = train_classifier(all.X.topRows(160), {all.y.begin(), all.y.begin() + 160}, fast_config());
  const Data test = take(all, 160, 200);
  const ClassifierReport r = evaluate(p, test.X, test.y);
  EXPECT_DOUBLE_EQ(r.accuracy, 1.0);
}

TEST(MlpTrain, ShuffledLabelsStayNearChance) {
  Data all = blobs(200, 5, 6, 1.0, 2);
  std::mt19937_64 gen(3);
  std::shuffle(all.y.begin(), all.y.end(), gen);
  const Data train = take(all, 0, 800), test = take(all, 800, 1000);
  const ClassifierReport r = evaluate(train_classifier(train.X, train.y, fast_config()), test.X, test.y);
  EXPECT_NEAR(r.accuracy, 0.20, 0.08);
}

TEST(MlpTrain, DeterministicBySeed) {
  const Data d = blobs(30, 3, 4, 1.0, 4);
  ClassifierConfig cfg = fast_config();
  cfg.epochs = 5;
  const MLPParams a = train_classifier(d.X, d.y, cfg);
  const MLPParams b = train_classifier(d.X, d.y, cfg);
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    EXPECT_EQ(a.weights[l], b.weights[l]);
    EXPECT_EQ(a.biases[l], b.biases[l]);
  }
  cfg.seed = 99;
  EXPECT_NE(train_classifier(d.X, d.y, cfg).weights[0], a.weights[0]);
}

TEST(MlpTrain, ShapeAndWidths) {
  const Data d = blobs(20, 3, 5, 1.0, 5);
  ClassifierConfig cfg = fast_config();
  cfg.epochs = 1;
  const MLPParams p = train_classifier(d.X, d.y, cfg);
  ASSERT_EQ(p.weights.size(), 4u);
  EXPECT_EQ(p.weights[0].rows(), 50);
  EXPECT_EQ(p.weights[0].cols(), 5);
  EXPECT_EQ(p.weights[3].rows(), 3);
  EXPECT_EQ(p.classes.size(), 3u);
  for (Eigen::Index i = 0; i < d.X.rows(); ++i) EXPECT_NEAR(predict(p, d.X.row(i).transpose()).probabilities.sum(), 1.0, 1e-9);
}

TEST(MlpTrain, Errors) {
  const Data d = blobs(10, 2, 2, 1.0, 6);
  EXPECT_THROW(train_classifier(d.X, {d.y.begin(), d.y.end() - 1}, fast_config()), ShapeError);
  const std::vector<AttackerLabel> one(d.y.size(), AttackerLabel("A01"));
  EXPECT_THROW(train_classifier(d.X, one, fast_config()), ContractError);
}

TEST(Evaluate, PerfectAndConstantPredictors) {
  std::vector<AttackerLabel> truth;
  for (int i = 0; i < 50; ++i) truth.emplace_back("A" + std::to_string(10 + i % 5));
  const ClassifierReport perfect = summarize_predictions(truth, truth);
  EXPECT_DOUBLE_EQ(perfect.accuracy, 1.0);
  EXPECT_EQ(perfect.confusion.trace(), 50);
  EXPECT_EQ(perfect.confusion.sum(), 50);

  std::vector<AttackerLabel> balanced;
  for (int i = 0; i < 200; ++i) balanced.emplace_back("A" + std::to_string(10 + i % 20));
  const std::vector<AttackerLabel> constant(200, AttackerLabel("A10"));
  const ClassifierReport r = summarize_predictions(balanced, constant);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.05);
  EXPECT_EQ(r.classes.size(), 20u);
  EXPECT_THROW(summarize_predictions({}, {}), ContractError);
}

TEST(Evaluate, ReportInvariants) {
  const Data all = blobs(40, 4, 3, 1.5, 7);
  const MLPParams p = train_classifier(all.X.topRows(120), {all.y.begin(), all.y.begin() + 120}, fast_config());
  const Data test = take(all, 120, 160);
  const ClassifierReport r = evaluate(p, test.X, test.y);
  EXPECT_EQ(r.total, 40u);
  EXPECT_EQ(r.confusion.sum(), 40);
  EXPECT_DOUBLE_EQ(r.accuracy, static_cast<double>(r.confusion.trace()) / 40.0);
  for (Eigen::Index c = 0; c < r.confusion.rows(); ++c) {
    EXPECT_EQ(r.confusion.row(c).sum(), 10);
    EXPECT_DOUBLE_EQ(r.recall(c), r.confusion(c, c) / 10.0);
  }
  const std::string json = report_json(r);
  EXPECT_NE(json.find("\"accuracy\""), std::string::npos);
  EXPECT_NE(confusion_csv(r).find("A10"), std::string::npos);
}

TEST(ClassifierCheckpoint, RoundTripIsBitIdentical) {
  const Data d = blobs(20, 3, 4, 1.0, 8);
  ClassifierConfig cfg = fast_config();
  cfg.epochs = 3;
  const MLPParams p = train_classifier(d.X, d.y, cfg);
  const fs::path path = fs::temp_directory_path() / ("spoofprint_clf_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  save_classifier(p, path);
  const MLPParams q = load_classifier(path);
  fs::remove(path);
  EXPECT_EQ(q.classes, p.classes);
  EXPECT_EQ(q.feature_mean, p.feature_mean);
  EXPECT_EQ(q.feature_scale, p.feature_scale);
  for (std::size_t l = 0; l < p.weights.size(); ++l) EXPECT_EQ(q.weights[l], p.weights[l]);
  for (Eigen::Index i = 0; i < d.X.rows(); ++i) {
    EXPECT_EQ(predict(p, d.X.row(i).transpose()).probabilities, predict(q, d.X.row(i).transpose()).probabilities);
  }
  EXPECT_THROW(load_classifier(path), IoError);
}
