#pragma once

// Analytic MLP gradient against central differences of the loop-based loss.

#include <scanpath/classifier.hpp>

#include <random>

#include "oracles.hpp"

namespace scanpath::testing {

inline std::vector<double> flatten(const MlpParams& p) {
  std::vector<double> out;
  auto push_rows = [&](const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  };
  push_rows(p.w1);
  out.insert(out.end(), p.b1.data(), p.b1.data() + p.b1.size());
  push_rows(p.w2);
  out.insert(out.end(), p.b2.data(), p.b2.data() + p.b2.size());
  return out;
}

struct GradientCheck {
  double relative_error = 0.0;  // ||analytic - numeric|| / (||analytic|| + ||numeric||)
  double max_abs_error = 0.0;
  double loss_gap = 0.0;  // library loss vs loop-based loss
};

/// 5 samples, 4 inputs, 6 hidden units, 3 classes.
inline GradientCheck mlp_gradient_check(std::uint64_t seed) {
  const std::size_t samples = 5, inputs = 4, hidden = 6, classes = 3;
  Rng rng = make_rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix x(samples, inputs);
  std::vector<std::vector<double>> xs(samples, std::vector<double>(inputs));
  std::vector<int> y(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < inputs; ++i) xs[s][i] = x(s, i) = g(rng);
    y[s] = static_cast<int>(s % classes);
  }
  MlpParams p = MlpParams::init(inputs, hidden, classes, rng);
  for (Eigen::Index i = 0; i < p.b1.size(); ++i) p.b1[i] = 0.1 * g(rng);
  for (Eigen::Index i = 0; i < p.b2.size(); ++i) p.b2[i] = 0.1 * g(rng);

  const auto theta = flatten(p);
  const auto f = [&](const std::vector<double>& t) { return reference_mlp_loss(t, xs, y, hidden, classes); };
  const auto numeric = central_differences(f, theta, 1e-5);
  const auto analytic = flatten(mlp_gradient(p, x, y));

  GradientCheck out;
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
    out.max_abs_error = std::max(out.max_abs_error, std::abs(analytic[i] - numeric[i]));
  }
  out.relative_error = std::sqrt(diff) / (std::sqrt(na) + std::sqrt(nn));
  out.loss_gap = std::abs(mlp_loss(p, x, y) - f(theta));
  return out;
}

}  // namespace scanpath::testing
