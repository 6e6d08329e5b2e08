#pragma once

#include <scanpath/features.hpp>
#include <scanpath/rng.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scanpath {

enum class ClassifierKind { nearest_centroid, mlp };

inline std::string_view to_string(ClassifierKind k) { return k == ClassifierKind::mlp ? "mlp" : "centroid"; }

inline ClassifierKind parse_classifier_kind(std::string_view name) {
  if (name == "centroid" || name == "nearest_centroid") return ClassifierKind::nearest_centroid;
  if (name == "mlp") return ClassifierKind::mlp;
  throw ConfigError("unknown classifier '" + std::string(name) + "' (expected centroid|mlp)");
}

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix stack_features(std::span<const FeatureVector> features) {
  if (features.empty()) return Matrix(0, 0);
  const auto dim = static_cast<Eigen::Index>(features[0].values.size());
  Matrix x(static_cast<Eigen::Index>(features.size()), dim);
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (static_cast<Eigen::Index>(features[i].values.size()) != dim)
      throw ArgumentError("classifier: feature vectors differ in length");
    x.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vector>(features[i].values.data(), dim).transpose();
  }
  return x;
}

inline std::size_t argmax(const Vector& v) {
  Eigen::Index i = 0;
  v.maxCoeff(&i);
  return static_cast<std::size_t>(i);
}

struct NearestCentroid {
  Matrix centroids;  // classes x features

  void fit(const Matrix& x, std::span<const int> y, int classes) {
    centroids = Matrix::Zero(classes, x.cols());
    std::vector<double> n(classes, 0.0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      centroids.row(y[i]) += x.row(i);
      n[y[i]] += 1.0;
    }
    for (int c = 0; c < classes; ++c)
      if (n[c] > 0) centroids.row(c) /= n[c];
  }

  // Classes without training samples are never predicted.
  std::size_t predict(const Vector& x, const std::vector<bool>& present = {}) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      if (!present.empty() && !present[c]) continue;
      const double d = (centroids.row(c).transpose() - x).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<std::size_t>(c);
      }
    }
    return best;
  }
};

/// Single hidden layer (tanh) with softmax output and mean cross-entropy loss.
struct MlpParams {
  Matrix w1;  // hidden x inputs
  Vector b1;
  Matrix w2;  // classes x hidden
  Vector b2;

  static MlpParams init(Eigen::Index inputs, Eigen::Index hidden, Eigen::Index classes, Rng& rng) {
    auto xavier = [&](Eigen::Index rows, Eigen::Index cols) {
      const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
      std::uniform_real_distribution<double> u(-a, a);
      Matrix m(rows, cols);
      for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
      return m;
    };
    MlpParams p;
    p.w1 = xavier(hidden, inputs);
    p.b1 = Vector::Zero(hidden);
    p.w2 = xavier(classes, hidden);
    p.b2 = Vector::Zero(classes);
    return p;
  }

  Matrix hidden(const Matrix& x) const { return ((x * w1.transpose()).rowwise() + b1.transpose()).array().tanh(); }

  Matrix probabilities(const Matrix& x) const {
    Matrix z = (hidden(x) * w2.transpose()).rowwise() + b2.transpose();
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double m = z.row(i).maxCoeff();
      z.row(i) = (z.row(i).array() - m).exp();
      z.row(i) /= z.row(i).sum();
    }
    return z;
  }
};

inline double mlp_loss(const MlpParams& p, const Matrix& x, std::span<const int> y) {
  const Matrix prob = p.probabilities(x);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) loss -= std::log(std::max(prob(i, y[i]), 1e-300));
  return loss / static_cast<double>(x.rows());
}

/// Analytic gradient of mlp_loss (backpropagation).
inline MlpParams mlp_gradient(const MlpParams& p, const Matrix& x, std::span<const int> y) {
  const Matrix h = p.hidden(x);
  Matrix dz = p.probabilities(x);
  for (Eigen::Index i = 0; i < x.rows(); ++i) dz(i, y[i]) -= 1.0;
  dz /= static_cast<double>(x.rows());
  MlpParams g;
  g.w2 = dz.transpose() * h;
  g.b2 = dz.colwise().sum().transpose();
  const Matrix da = ((dz * p.w2).array() * (1.0 - h.array().square())).matrix();
  g.w1 = da.transpose() * x;
  g.b1 = da.colwise().sum().transpose();
  return g;
}

struct MlpTraining {
  double learning_rate = 0.01;
  int epochs = 200;
  int batch_size = 32;
  double momentum = 0.9;
};

/// Mini-batch gradient descent with momentum; deterministic for a seed.
inline MlpParams train_mlp_params(const Matrix& x, std::span<const int> y, int classes, int hidden,
                                  const MlpTraining& t, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  MlpParams p = MlpParams::init(x.cols(), hidden, classes, rng);
  MlpParams vel{Matrix::Zero(p.w1.rows(), p.w1.cols()), Vector::Zero(p.b1.size()),
                Matrix::Zero(p.w2.rows(), p.w2.cols()), Vector::Zero(p.b2.size())};
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  for (int e = 0; e < t.epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(t.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(t.batch_size));
      Matrix xb(static_cast<Eigen::Index>(end - start), x.cols());
      std::vector<int> yb(end - start);
      for (std::size_t i = start; i < end; ++i) {
        xb.row(static_cast<Eigen::Index>(i - start)) = x.row(order[i]);
        yb[i - start] = y[static_cast<std::size_t>(order[i])];
      }
      const MlpParams g = mlp_gradient(p, xb, yb);
      vel.w1 = t.momentum * vel.w1 - t.learning_rate * g.w1;
      vel.b1 = t.momentum * vel.b1 - t.learning_rate * g.b1;
      vel.w2 = t.momentum * vel.w2 - t.learning_rate * g.w2;
      vel.b2 = t.momentum * vel.b2 - t.learning_rate * g.b2;
      p.w1 += vel.w1;
      p.b1 += vel.b1;
      p.w2 += vel.w2;
      p.b2 += vel.b2;
    }
  }
  return p;
}

inline constexpr double kGridLearningRates[] = {0.1, 0.01, 0.001};
inline constexpr int kGridEpochs[] = {50, 200};

/// Trained classifier over one feature geometry. Inputs are standardized with
/// statistics from the training set.
struct Classifier {
  ClassifierKind kind = ClassifierKind::nearest_centroid;
  FeatureSpec spec;
  std::vector<std::string> classes;
  Vector feature_mean;
  Vector feature_scale;
  NearestCentroid centroid;
  MlpParams mlp;
  MlpTraining chosen;  // grid-search winner, mlp only
  std::vector<bool> present;

  Vector prepare(const FeatureVector& f) const {
    if (static_cast<Eigen::Index>(f.values.size()) != feature_mean.size())
      throw ArgumentError("classifier: feature length " + std::to_string(f.values.size()) + " does not match " +
                          std::to_string(feature_mean.size()));
    const Vector raw = Eigen::Map<const Vector>(f.values.data(), feature_mean.size());
    return ((raw - feature_mean).array() * feature_scale.array()).matrix();
  }

  std::size_t predict_index(const FeatureVector& f) const {
    const Vector x = prepare(f);
    if (kind == ClassifierKind::nearest_centroid) return centroid.predict(x, present);
    return argmax(mlp.probabilities(x.transpose()).row(0).transpose());
  }

  const std::string& predict(const FeatureVector& f) const { return classes[predict_index(f)]; }
  const std::string& predict(const GazeRecording& rec) const { return predict(featurize(rec, spec)); }
};

namespace detail {

inline std::vector<int> encode_labels(std::span<const std::string> labels, std::vector<std::string>& classes) {
  std::vector<int> y;
  y.reserve(labels.size());
  for (const auto& l : labels) {
    auto it = std::find(classes.begin(), classes.end(), l);
    if (it == classes.end()) {
      classes.push_back(l);
      it = classes.end() - 1;
    }
    y.push_back(static_cast<int>(it - classes.begin()));
  }
  return y;
}

inline void fit_standardizer(Classifier& c, const Matrix& x, bool scale) {
  c.feature_mean = x.colwise().mean().transpose();
  c.feature_scale = Vector::Ones(x.cols());
  if (!scale) {
    c.feature_mean.setZero();
    return;
  }
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - c.feature_mean[j]).square().mean();
    c.feature_scale[j] = var > 1e-24 ? 1.0 / std::sqrt(var) : 1.0;
  }
}

inline double accuracy_of(const MlpParams& p, const Matrix& x, std::span<const int> y) {
  const Matrix prob = p.probabilities(x);
  std::size_t hit = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    if (static_cast<int>(argmax(prob.row(i).transpose())) == y[i]) ++hit;
  return x.rows() ? static_cast<double>(hit) / static_cast<double>(x.rows()) : 0.0;
}

}  // namespace detail

/// One hidden layer of `hidden` units. Learning rate and epochs come from a
/// grid search on a held-out 20% split; the winner is refit on all data.
inline Classifier train_mlp(std::span<const FeatureVector> features, std::span<const std::string> labels,
                            int hidden = 100, std::uint64_t seed = 0, const FeatureSpec& spec = {},
                            std::span<const std::string> class_order = {}) {
  if (features.size() != labels.size()) throw ArgumentError("train_mlp: features and labels differ in count");
  Classifier c;
  c.kind = ClassifierKind::mlp;
  c.spec = spec;
  c.classes.assign(class_order.begin(), class_order.end());
  const std::vector<int> y = detail::encode_labels(labels, c.classes);
  if (c.classes.size() < 2) throw ConfigError("train_mlp: need at least 2 classes");
  const Matrix raw = stack_features(features);
  detail::fit_standardizer(c, raw, true);
  const Matrix x = (raw.rowwise() - c.feature_mean.transpose()).array().rowwise() * c.feature_scale.transpose().array();
  const int classes = static_cast<int>(c.classes.size());

  // Held-out split for the grid search.
  Rng split_rng = make_rng(seed, 1);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), split_rng);
  const auto held = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(order.size())));

  MlpTraining best{kGridLearningRates[1], kGridEpochs[1]};
  if (held >= 1 && order.size() - held >= 2) {
    Matrix xt(static_cast<Eigen::Index>(order.size() - held), x.cols()), xv(static_cast<Eigen::Index>(held), x.cols());
    std::vector<int> yt, yv;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i < held) {
        xv.row(static_cast<Eigen::Index>(i)) = x.row(order[i]);
        yv.push_back(y[static_cast<std::size_t>(order[i])]);
      } else {
        xt.row(static_cast<Eigen::Index>(i - held)) = x.row(order[i]);
        yt.push_back(y[static_cast<std::size_t>(order[i])]);
      }
    }
    double best_acc = -1.0, best_loss = std::numeric_limits<double>::infinity();
    for (double lr : kGridLearningRates)
      for (int epochs : kGridEpochs) {
        const MlpTraining t{lr, epochs};
        const MlpParams p = train_mlp_params(xt, yt, classes, hidden, t, seed);
        const double acc = detail::accuracy_of(p, xv, yv);
        const double loss = mlp_loss(p, xv, yv);
        if (acc > best_acc || (acc == best_acc && loss < best_loss)) {
          best_acc = acc;
          best_loss = loss;
          best = t;
        }
      }
  }
  c.chosen = best;
  c.mlp = train_mlp_params(x, y, classes, hidden, best, seed);
  c.present.assign(c.classes.size(), true);
  return c;
}

inline Classifier train_nearest_centroid(std::span<const FeatureVector> features, std::span<const std::string> labels,
                                         const FeatureSpec& spec = {}, std::span<const std::string> class_order = {}) {
  if (features.size() != labels.size())
    throw ArgumentError("train_nearest_centroid: features and labels differ in count");
  if (features.empty()) throw ConfigError("train_nearest_centroid: no training data");
  Classifier c;
  c.kind = ClassifierKind::nearest_centroid;
  c.spec = spec;
  c.classes.assign(class_order.begin(), class_order.end());
  const std::vector<int> y = detail::encode_labels(labels, c.classes);
  const Matrix x = stack_features(features);
  detail::fit_standardizer(c, x, false);
  c.centroid.fit(x, y, static_cast<int>(c.classes.size()));
  c.present.assign(c.classes.size(), false);
  for (int v : y) c.present[static_cast<std::size_t>(v)] = true;
  return c;
}

inline Classifier train_classifier(ClassifierKind kind, std::span<const FeatureVector> features,
                                   std::span<const std::string> labels, const FeatureSpec& spec, std::uint64_t seed,
                                   std::span<const std::string> class_order = {}, int hidden = 100) {
  return kind == ClassifierKind::mlp ? train_mlp(features, labels, hidden, seed, spec, class_order)
                                     : train_nearest_centroid(features, labels, spec, class_order);
}

}  // namespace scanpath
