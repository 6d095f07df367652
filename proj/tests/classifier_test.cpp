#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "newsfmt/classifier.hpp"
#include "support.hpp"

using namespace newsfmt;
using namespace newsfmt::fixtures;

namespace {

TrainingSet randomSet(std::mt19937_64& rng, int n, int d, bool randomLabels = true) {
  std::normal_distribution<double> g(0.0, 1.0);
  TrainingSet set;
  for (int i = 0; i < n; ++i) {
    Sample s;
    for (int j = 0; j < d; ++j) s.x.push_back(g(rng));
    s.label = randomLabels ? (rng() % 2 ? ImageClass::natural : ImageClass::graphics)
                           : (i % 2 ? ImageClass::natural : ImageClass::graphics);
    set.samples.push_back(std::move(s));
  }
  set.samples[0].label = ImageClass::graphics;
  set.samples[1].label = ImageClass::natural;
  return set;
}

double balancedAccuracy(const ConfusionCounts& c) { return classifierMeasures(c).balancedAccuracy.value(); }

std::filesystem::path tempFile(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(Pseudoinverse, PenroseIdentityOnRandomMatrices) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int r = 1 + static_cast<int>(rng() % 120), c = 1 + static_cast<int>(rng() % 120);
    Eigen::MatrixXd h(r, c);
    for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = g(rng);
    const Eigen::MatrixXd p = pseudoinverse(h);
    ASSERT_EQ(p.rows(), c);
    ASSERT_EQ(p.cols(), r);
    EXPECT_LE(pinvResidual(h), 1e-8);
    EXPECT_LE((p * h * p - p).norm() / p.norm(), 1e-8);
  }
}

TEST(Pseudoinverse, RankDeficient) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(40, 3), b(3, 25);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = g(rng);
  const Eigen::MatrixXd h = a * b;  // rank 3
  EXPECT_LE(pinvResidual(h), 1e-8);
  EXPECT_NEAR((h * pseudoinverse(h)).trace(), 3.0, 1e-8);  // projector onto range(h)
}

TEST(Pseudoinverse, FullColumnRankMatchesNormalEquations) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd h(30, 6);
  for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = g(rng);
  const Eigen::MatrixXd oracle = (h.transpose() * h).inverse() * h.transpose();
  EXPECT_LE((pseudoinverse(h) - oracle).norm(), 1e-10);
}

TEST(Pseudoinverse, ZeroMatrix) {
  const Eigen::MatrixXd p = pseudoinverse(Eigen::MatrixXd::Zero(4, 3));
  EXPECT_EQ(p.rows(), 3);
  EXPECT_EQ(p.norm(), 0.0);
}

TEST(Elm, ExactFitWhenHiddenEqualsSamples) {
  std::mt19937_64 rng(4);
  for (int n : {20, 100, 200}) {
    const TrainingSet set = randomSet(rng, n, 8);
    const ElmModel model = elmTrain(set, n, Activation::sigmoid, 11);
    EXPECT_LE(trainingResidual(model, set), 1e-6) << "N = L = " << n;
    for (const auto& s : set.samples) EXPECT_EQ(elmPredict(model, s.x), s.label);
  }
}

TEST(Elm, HiddenNodeHandValues) {
  ElmModel m;
  m.inputWeights = Eigen::MatrixXd{{1.0, -2.0}};
  m.biases = Eigen::VectorXd::Constant(1, 0.5);
  m.outputWeights = Eigen::MatrixXd::Zero(1, 2);
  m.featureMean = Eigen::VectorXd::Zero(2);
  m.featureScale = Eigen::VectorXd::Ones(2);
  const Eigen::MatrixXd x{{3.0, 1.0}};
  // sigmoid(a.x + b) = sigmoid(1.5)
  EXPECT_NEAR(hiddenLayerOutput(m, x)(0, 0), 1.0 / (1.0 + std::exp(-1.5)), 1e-15);
  // exp(-(b ||x - a||)^2) = exp(-0.25 * (4 + 9))
  m.activation = Activation::rbf;
  EXPECT_NEAR(hiddenLayerOutput(m, x)(0, 0), std::exp(-0.25 * 13.0), 1e-15);
}

TEST(Elm, Xor) {
  TrainingSet set;
  set.samples = {{{0, 0}, ImageClass::graphics},
                 {{1, 1}, ImageClass::graphics},
                 {{0, 1}, ImageClass::natural},
                 {{1, 0}, ImageClass::natural}};
  const ElmModel model = elmTrain(set, 10, Activation::sigmoid, 1);
  for (const auto& s : set.samples) EXPECT_EQ(elmPredict(model, s.x), s.label);
}

TEST(Elm, GaussianBlobs) {
  std::mt19937_64 rng(6);
  const auto [train, test] = splitHoldout(gaussianBlobs(rng, 1000, 6.0), 0.7, 9);
  for (Activation act : {Activation::sigmoid, Activation::rbf}) {
    const ElmModel model = elmTrain(train, 50, act, 2);
    EXPECT_GE(balancedAccuracy(evaluateModel(model, train)), 0.99) << toString(act);
    EXPECT_GE(balancedAccuracy(evaluateModel(model, test)), 0.95) << toString(act);
  }
}

TEST(Elm, DeterministicForSeed) {
  std::mt19937_64 rng(7);
  const TrainingSet set = randomSet(rng, 50, 3);
  const ElmModel a = elmTrain(set, 20, Activation::sigmoid, 5);
  const ElmModel b = elmTrain(set, 20, Activation::sigmoid, 5);
  const ElmModel c = elmTrain(set, 20, Activation::sigmoid, 6);
  EXPECT_EQ(a.inputWeights, b.inputWeights);
  EXPECT_EQ(a.outputWeights, b.outputWeights);
  EXPECT_NE(a.inputWeights, c.inputWeights);
}

TEST(Elm, HiddenParametersWithinRange) {
  std::mt19937_64 rng(8);
  const ElmModel m = elmTrain(randomSet(rng, 30, 5), 40, Activation::sigmoid, 1);
  EXPECT_LE(m.inputWeights.cwiseAbs().maxCoeff(), 3.0);
  EXPECT_LE(m.biases.cwiseAbs().maxCoeff(), 3.0);
  EXPECT_EQ(m.hiddenCount(), 40);
  EXPECT_EQ(m.inputDimension(), 5);
}

TEST(Elm, ConstantFeatureDoesNotBreakStandardization) {
  std::mt19937_64 rng(9);
  TrainingSet set = randomSet(rng, 40, 3);
  for (auto& s : set.samples) s.x[1] = 7.0;
  const ElmModel m = elmTrain(set, 10, Activation::sigmoid, 1);
  EXPECT_EQ(m.featureScale(1), 1.0);
  EXPECT_TRUE(m.outputWeights.allFinite());
}

TEST(Elm, ArgmaxInvariantToPositiveScaling) {
  std::mt19937_64 rng(10);
  const TrainingSet set = randomSet(rng, 80, 4);
  ElmModel m = elmTrain(set, 30, Activation::sigmoid, 1);
  std::vector<ImageClass> before;
  for (const auto& s : set.samples) before.push_back(elmPredict(m, s.x));
  m.outputWeights *= 3.7;
  for (std::size_t i = 0; i < set.samples.size(); ++i) EXPECT_EQ(elmPredict(m, set.samples[i].x), before[i]);
}

TEST(Elm, ZeroOutputWeightsTieToGraphics) {
  std::mt19937_64 rng(11);
  const TrainingSet set = randomSet(rng, 10, 2);
  ElmModel m = elmTrain(set, 5, Activation::sigmoid, 1);
  m.outputWeights.setZero();
  EXPECT_EQ(elmPredict(m, set.samples[1].x), ImageClass::graphics);
}

TEST(Elm, Errors) {
  std::mt19937_64 rng(12);
  const TrainingSet set = randomSet(rng, 10, 2);
  EXPECT_THROW(elmTrain(set, 0, Activation::sigmoid, 1), Error);
  EXPECT_THROW(elmTrain(TrainingSet{}, 5, Activation::sigmoid, 1), Error);
  TrainingSet oneClass;
  oneClass.samples = {{{1.0}, ImageClass::natural}, {{2.0}, ImageClass::natural}};
  EXPECT_THROW(elmTrain(oneClass, 5, Activation::sigmoid, 1), Error);
  TrainingSet ragged = set;
  ragged.samples[3].x.push_back(1.0);
  EXPECT_THROW(elmTrain(ragged, 5, Activation::sigmoid, 1), Error);
  const ElmModel m = elmTrain(set, 5, Activation::sigmoid, 1);
  const std::vector<double> wrong{1.0, 2.0, 3.0};
  EXPECT_THROW(elmPredict(m, wrong), Error);
}

TEST(KFold, SeparableDataIsPerfect) {
  std::mt19937_64 rng(13);
  const auto r = kFoldEvaluate(gaussianBlobs(rng, 200, 20.0), 10, 30, Activation::sigmoid, 4);
  EXPECT_EQ(r.folds.size(), 10u);
  EXPECT_EQ(r.total.total(), 400);
  EXPECT_DOUBLE_EQ(r.natural.balancedAccuracy.value(), 1.0);
  EXPECT_DOUBLE_EQ(r.graphics.balancedAccuracy.value(), 1.0);
}

TEST(KFold, RandomLabelsNearChance) {
  std::mt19937_64 rng(14);
  const auto r = kFoldEvaluate(randomSet(rng, 2000, 5), 10, 40, Activation::sigmoid, 2);
  EXPECT_NEAR(r.natural.balancedAccuracy.value(), 0.5, 0.05);
}

TEST(KFold, FoldsAreStratifiedAndCoverEverySample) {
  std::mt19937_64 rng(15);
  const TrainingSet set = gaussianBlobs(rng, 55, 6.0);
  const auto r = kFoldEvaluate(set, 5, 10, Activation::sigmoid, 1);
  for (const auto& f : r.folds) {
    EXPECT_EQ(f.tp + f.fn, 11);  // natural per fold
    EXPECT_EQ(f.tn + f.fp, 11);
  }
  EXPECT_EQ(r.total.total(), 110);
}

TEST(KFold, Errors) {
  std::mt19937_64 rng(16);
  const TrainingSet set = randomSet(rng, 6, 2);
  EXPECT_THROW(kFoldEvaluate(set, 1, 5, Activation::sigmoid, 1), Error);
  EXPECT_THROW(kFoldEvaluate(set, 7, 5, Activation::sigmoid, 1), Error);
}

TEST(ModelFile, RoundTripIsExact) {
  std::mt19937_64 rng(17);
  const TrainingSet set = randomSet(rng, 40, 6);
  for (Activation act : {Activation::sigmoid, Activation::rbf}) {
    const ElmModel m = elmTrain(set, 25, act, 3);
    const auto path = tempFile("newsfmt_classifier_test.elm");
    saveModel(m, path.string());
    const ElmModel back = loadModel(path.string());
    std::filesystem::remove(path);
    EXPECT_EQ(back.activation, act);
    EXPECT_EQ(back.inputWeights, m.inputWeights);
    EXPECT_EQ(back.biases, m.biases);
    EXPECT_EQ(back.outputWeights, m.outputWeights);
    EXPECT_EQ(back.featureMean, m.featureMean);
    EXPECT_EQ(back.featureScale, m.featureScale);
    for (const auto& s : set.samples) EXPECT_EQ(elmOutputs(back, s.x), elmOutputs(m, s.x));
  }
}

TEST(ModelFile, RejectsCorruptFiles) {
  std::mt19937_64 rng(18);
  const ElmModel m = elmTrain(randomSet(rng, 20, 3), 8, Activation::sigmoid, 3);
  const auto path = tempFile("newsfmt_classifier_bad.elm");
  saveModel(m, path.string());
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  EXPECT_THROW(loadModel(path.string()), Error);
  {
    std::ofstream out(path);
    out << "something else\n";
  }
  EXPECT_THROW(loadModel(path.string()), Error);
  std::filesystem::remove(path);
  EXPECT_THROW(loadModel(path.string()), Error);
}
