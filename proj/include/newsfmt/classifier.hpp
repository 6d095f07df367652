#pragma once

// Extreme learning machine: a single hidden layer with random input weights
// and biases, and output weights solved in closed form as H^+ T.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "newsfmt/error.hpp"
#include "newsfmt/evaluation.hpp"

namespace newsfmt {

/// Output index 0 is graphics, 1 is natural. Ties resolve to graphics.
enum class ImageClass : std::uint8_t { graphics = 0, natural = 1 };
enum class Activation : std::uint8_t { sigmoid = 0, rbf = 1 };

constexpr int kClassCount = 2;

inline std::string_view toString(Activation a) noexcept { return a == Activation::rbf ? "rbf" : "sigmoid"; }
inline std::string_view toString(ImageClass c) noexcept {
  return c == ImageClass::natural ? "natural" : "graphics";
}

struct Sample {
  std::vector<double> x;
  ImageClass label = ImageClass::graphics;
};

struct TrainingSet {
  std::vector<Sample> samples;

  [[nodiscard]] std::size_t dimension() const { return samples.empty() ? 0 : samples.front().x.size(); }

  void validate() const {
    require(!samples.empty(), "training set is empty");
    const std::size_t d = dimension();
    require(d > 0, "training vectors have no components");
    bool hasGraphics = false, hasNatural = false;
    for (const auto& s : samples) {
      require(s.x.size() == d, "training vectors differ in dimension");
      (s.label == ImageClass::natural ? hasNatural : hasGraphics) = true;
    }
    require(hasGraphics && hasNatural, "training set needs at least one sample of each class");
  }
};

struct ElmModel {
  Eigen::MatrixXd inputWeights;   // L x d
  Eigen::VectorXd biases;         // L
  Eigen::MatrixXd outputWeights;  // L x 2
  Activation activation = Activation::sigmoid;
  Eigen::VectorXd featureMean;    // d, subtracted before the hidden layer
  Eigen::VectorXd featureScale;   // d, divides after centering

  [[nodiscard]] int hiddenCount() const noexcept { return static_cast<int>(inputWeights.rows()); }
  [[nodiscard]] int inputDimension() const noexcept { return static_cast<int>(inputWeights.cols()); }

  void validate() const {
    const auto L = inputWeights.rows();
    const auto d = inputWeights.cols();
    require(L > 0 && d > 0, "ELM model has no hidden nodes");
    require(biases.size() == L && outputWeights.rows() == L && outputWeights.cols() == kClassCount,
            "ELM model dimensions inconsistent");
    require(featureMean.size() == d && featureScale.size() == d, "ELM standardization size mismatch");
    require(inputWeights.allFinite() && biases.allFinite() && outputWeights.allFinite() &&
                featureMean.allFinite() && featureScale.allFinite(),
            "ELM model has non-finite entries");
  }
};

/// Moore-Penrose pseudoinverse via SVD, discarding singular values below
/// eps * max(rows, cols) * sigma_max.
inline Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return Eigen::MatrixXd(m.cols(), m.rows());
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double cutoff = std::numeric_limits<double>::epsilon() *
                        static_cast<double>(std::max(m.rows(), m.cols())) *
                        (sigma.size() > 0 ? sigma(0) : 0.0);
  Eigen::VectorXd inverted = sigma;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) inverted(i) = sigma(i) > cutoff ? 1.0 / sigma(i) : 0.0;
  return svd.matrixV() * inverted.asDiagonal() * svd.matrixU().transpose();
}

namespace detail {

inline Eigen::MatrixXd toMatrix(const TrainingSet& data) {
  const auto n = static_cast<Eigen::Index>(data.samples.size());
  const auto d = static_cast<Eigen::Index>(data.dimension());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    x.row(i) = Eigen::Map<const Eigen::RowVectorXd>(data.samples[static_cast<std::size_t>(i)].x.data(), d);
  return x;
}

inline Eigen::MatrixXd standardize(const ElmModel& model, const Eigen::MatrixXd& x) {
  return (x.rowwise() - model.featureMean.transpose()).array().rowwise() /
         model.featureScale.transpose().array();
}

}  // namespace detail

/// Hidden layer output H (N x L) for already-standardized rows of `x`.
inline Eigen::MatrixXd hiddenLayerOutput(const ElmModel& model, const Eigen::MatrixXd& x) {
  if (model.activation == Activation::sigmoid) {
    Eigen::MatrixXd z = x * model.inputWeights.transpose();
    z.rowwise() += model.biases.transpose();
    return (1.0 + (-z.array()).exp()).inverse().matrix();
  }
  // RBF: exp(-(b_i * ||x - a_i||)^2)
  const Eigen::VectorXd xNorms = x.rowwise().squaredNorm();
  const Eigen::VectorXd aNorms = model.inputWeights.rowwise().squaredNorm();
  Eigen::MatrixXd dist2 = -2.0 * x * model.inputWeights.transpose();
  dist2.colwise() += xNorms;
  dist2.rowwise() += aNorms.transpose();
  const Eigen::ArrayXXd scaled =
      dist2.array().max(0.0).rowwise() * model.biases.transpose().array().square();
  return (-scaled).exp().matrix();
}

/// Trains an ELM with `hidden` nodes. Input weights and biases are uniform in
/// [-3, 3]; targets are +1 for the sample's class and -1 for the other.
/// Per-dimension standardization statistics come from `data` and are stored
/// in the model.
inline ElmModel elmTrain(const TrainingSet& data, int hidden, Activation activation,
                         std::uint64_t seed) {
  require(hidden >= 1, "elmTrain: hidden node count must be at least 1");
  data.validate();
  const Eigen::MatrixXd raw = detail::toMatrix(data);
  const auto n = raw.rows();
  const auto d = raw.cols();

  ElmModel model;
  model.activation = activation;
  model.featureMean = raw.colwise().mean().transpose();
  const Eigen::MatrixXd centered = raw.rowwise() - model.featureMean.transpose();
  model.featureScale = (centered.colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt().transpose();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(model.featureScale(j) > 1e-12)) model.featureScale(j) = 1.0;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-3.0, 3.0);
  model.inputWeights.resize(hidden, d);
  for (Eigen::Index i = 0; i < hidden; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) model.inputWeights(i, j) = uniform(rng);
  }
  model.biases.resize(hidden);
  for (Eigen::Index i = 0; i < hidden; ++i) model.biases(i) = uniform(rng);

  Eigen::MatrixXd targets = Eigen::MatrixXd::Constant(n, kClassCount, -1.0);
  for (Eigen::Index i = 0; i < n; ++i)
    targets(i, static_cast<Eigen::Index>(data.samples[static_cast<std::size_t>(i)].label)) = 1.0;

  const Eigen::MatrixXd h = hiddenLayerOutput(model, detail::standardize(model, raw));
  model.outputWeights = pseudoinverse(h) * targets;
  return model;
}

/// Raw network outputs f(x) for one input vector.
inline Eigen::RowVectorXd elmOutputs(const ElmModel& model, std::span<const double> x) {
  require(static_cast<Eigen::Index>(x.size()) == model.inputWeights.cols(),
          "elmPredict: input dimension does not match the model");
  Eigen::MatrixXd row = Eigen::Map<const Eigen::RowVectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  return hiddenLayerOutput(model, detail::standardize(model, row)) * model.outputWeights;
}

inline ImageClass elmPredict(const ElmModel& model, std::span<const double> x) {
  const Eigen::RowVectorXd out = elmOutputs(model, x);
  return out(1) > out(0) ? ImageClass::natural : ImageClass::graphics;
}

/// Counts with `natural` as the positive class.
inline ConfusionCounts confusionFor(ImageClass truth, ImageClass predicted) {
  ConfusionCounts c;
  if (truth == ImageClass::natural) {
    (predicted == ImageClass::natural ? c.tp : c.fn) = 1;
  } else {
    (predicted == ImageClass::natural ? c.fp : c.tn) = 1;
  }
  return c;
}

inline ConfusionCounts evaluateModel(const ElmModel& model, const TrainingSet& data) {
  ConfusionCounts total;
  for (const auto& s : data.samples) total += confusionFor(s.label, elmPredict(model, s.x));
  return total;
}

struct KFoldResult {
  std::vector<ConfusionCounts> folds;  // natural = positive
  ConfusionCounts total;
  ClassifierMeasures natural;
  ClassifierMeasures graphics;
};

/// Stratified k-fold cross-validation. Fold membership is a seeded shuffle of
/// each class dealt round-robin; fold f trains with seed + f.
inline KFoldResult kFoldEvaluate(const TrainingSet& data, int k, int hidden, Activation activation,
                                 std::uint64_t seed) {
  data.validate();
  require(k >= 2, "kFoldEvaluate: k must be at least 2");
  require(static_cast<std::size_t>(k) <= data.samples.size(), "kFoldEvaluate: k exceeds sample count");

  std::vector<int> fold(data.samples.size(), 0);
  std::mt19937_64 rng(seed);
  int dealt = 0;
  for (const ImageClass cls : {ImageClass::graphics, ImageClass::natural}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
      if (data.samples[i].label == cls) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (const std::size_t i : members) fold[i] = dealt++ % k;
  }

  KFoldResult result;
  for (int f = 0; f < k; ++f) {
    TrainingSet train, test;
    for (std::size_t i = 0; i < data.samples.size(); ++i)
      (fold[i] == f ? test : train).samples.push_back(data.samples[i]);
    require(!test.samples.empty(), "kFoldEvaluate: empty fold");
    const ElmModel model = elmTrain(train, hidden, activation, seed + static_cast<std::uint64_t>(f));
    result.folds.push_back(evaluateModel(model, test));
    result.total += result.folds.back();
  }
  result.natural = classifierMeasures(result.total);
  result.graphics = classifierMeasures(result.total.swapped());
  return result;
}

// Model file: one text header line followed by little-endian IEEE-754 doubles
// in this order: featureMean (d), featureScale (d), inputWeights (L x d,
// row-major), biases (L), outputWeights (L x 2, row-major).
//   newsfmt-elm 1 activation=sigmoid inputs=<d> hidden=<L> outputs=2

namespace detail {

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

inline void writeDoubles(std::ostream& os, const double* data, std::size_t count) {
  os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
}

inline void readDoubles(std::istream& is, double* data, std::size_t count) {
  is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
  require(static_cast<std::size_t>(is.gcount()) == count * sizeof(double), "ELM model file is truncated");
}

inline void writeRowMajor(std::ostream& os, const Eigen::MatrixXd& m) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  writeDoubles(os, rm.data(), static_cast<std::size_t>(rm.size()));
}

inline Eigen::MatrixXd readRowMajor(std::istream& is, Eigen::Index rows, Eigen::Index cols) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  readDoubles(is, rm.data(), static_cast<std::size_t>(rm.size()));
  return rm;
}

}  // namespace detail

inline void saveModel(const ElmModel& model, const std::string& path) {
  model.validate();
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), "cannot write model file " + path);
  os << "newsfmt-elm 1 activation=" << toString(model.activation) << " inputs=" << model.inputDimension()
     << " hidden=" << model.hiddenCount() << " outputs=" << kClassCount << '\n';
  detail::writeDoubles(os, model.featureMean.data(), static_cast<std::size_t>(model.featureMean.size()));
  detail::writeDoubles(os, model.featureScale.data(), static_cast<std::size_t>(model.featureScale.size()));
  detail::writeRowMajor(os, model.inputWeights);
  detail::writeDoubles(os, model.biases.data(), static_cast<std::size_t>(model.biases.size()));
  detail::writeRowMajor(os, model.outputWeights);
  require(static_cast<bool>(os), "failed writing model file " + path);
}

inline ElmModel loadModel(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), "cannot open model file " + path);
  std::string header;
  std::getline(is, header);
  std::istringstream hs(header);
  std::string magic, activation, inputs, hidden, outputs;
  int version = 0;
  hs >> magic >> version >> activation >> inputs >> hidden >> outputs;
  require(magic == "newsfmt-elm" && version == 1, "not an ELM model file: " + path);
  const auto value = [&](const std::string& field, const std::string& key) {
    require(field.rfind(key + "=", 0) == 0, "malformed model header field " + field);
    return field.substr(key.size() + 1);
  };
  ElmModel model;
  const std::string act = value(activation, "activation");
  require(act == "sigmoid" || act == "rbf", "unknown activation " + act);
  model.activation = act == "rbf" ? Activation::rbf : Activation::sigmoid;
  const long d = std::stol(value(inputs, "inputs"));
  const long L = std::stol(value(hidden, "hidden"));
  const long m = std::stol(value(outputs, "outputs"));
  require(d > 0 && L > 0 && m == kClassCount, "model header dimensions invalid");
  model.featureMean.resize(d);
  model.featureScale.resize(d);
  detail::readDoubles(is, model.featureMean.data(), static_cast<std::size_t>(d));
  detail::readDoubles(is, model.featureScale.data(), static_cast<std::size_t>(d));
  model.inputWeights = detail::readRowMajor(is, L, d);
  model.biases.resize(L);
  detail::readDoubles(is, model.biases.data(), static_cast<std::size_t>(L));
  model.outputWeights = detail::readRowMajor(is, L, m);
  model.validate();
  return model;
}

}  // namespace newsfmt
