#pragma once

#include <scanpath/rng.hpp>
#include <scanpath/types.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <vector>

namespace scanpath {

/// Point distribution model of a set of shift vectors: mean plus the
/// dominant principal directions and their variances.
struct PrincipalComponents {
  Vec mean_shift;
  Basis components;               // r x dim, orthonormal rows
  std::vector<double> variances;  // r entries, non-increasing
  int dim = 2;

  int rank() const { return static_cast<int>(components.rows()); }
};

/// Sample-covariance PCA (divisor n-1). Keeps the smallest r whose cumulative
/// variance reaches variance_fraction of the total, capped at min(n-1, dim).
inline PrincipalComponents fit_pca(std::span<const Vec> shifts, double variance_fraction = 0.95) {
  if (shifts.empty()) throw ArgumentError("fit_pca: no shift vectors");
  if (!(variance_fraction > 0.0 && variance_fraction <= 1.0))
    throw ArgumentError("fit_pca: variance_fraction must lie in (0, 1]");

  const int dim = static_cast<int>(shifts[0].size());
  const std::size_t n = shifts.size();
  PrincipalComponents pc;
  pc.dim = dim;
  pc.mean_shift = Vec::Zero(dim);
  for (const auto& s : shifts) {
    if (s.size() != dim) throw ArgumentError("fit_pca: shift vectors differ in dimension");
    pc.mean_shift += s;
  }
  pc.mean_shift /= static_cast<double>(n);
  pc.components.resize(0, dim);
  if (n < 2) return pc;

  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3> cov =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>::Zero(dim, dim);
  for (const auto& s : shifts) {
    const Vec c = s - pc.mean_shift;
    cov.noalias() += c * c.transpose();
  }
  cov /= static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<decltype(cov)> solver(cov);
  // Eigen returns ascending order; walk it backwards.
  std::vector<double> eig(dim);
  for (int i = 0; i < dim; ++i) eig[i] = std::max(0.0, solver.eigenvalues()[dim - 1 - i]);
  const double total = std::accumulate(eig.begin(), eig.end(), 0.0);
  if (!(total > 0.0)) return pc;

  const int cap = static_cast<int>(std::min<std::size_t>(n - 1, static_cast<std::size_t>(dim)));
  const double target = variance_fraction * total * (1.0 - 1e-12);
  int r = 0;
  double cum = 0.0;
  while (r < cap && cum < target) cum += eig[r++];

  pc.components.resize(r, dim);
  pc.variances.assign(eig.begin(), eig.begin() + r);
  for (int i = 0; i < r; ++i) {
    Vec v = solver.eigenvectors().col(dim - 1 - i);
    // Sign convention: largest-magnitude entry positive.
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    pc.components.row(i) = v.transpose();
  }
  return pc;
}

/// mean_shift + sum_i weights[i] * components[i]. The caller adds the parent
/// position.
inline Vec synthesize_shift(const PrincipalComponents& pc, std::span<const double> weights) {
  if (static_cast<int>(weights.size()) != pc.rank())
    throw ArgumentError("synthesize_shift: expected " + std::to_string(pc.rank()) + " weights, got " +
                        std::to_string(weights.size()));
  Vec out = pc.mean_shift;
  for (int i = 0; i < pc.rank(); ++i) out += weights[i] * pc.components.row(i).transpose();
  return out;
}

/// Coordinates of `shift` in the component basis (inverse of synthesize_shift
/// on the retained subspace).
inline std::vector<double> project(const PrincipalComponents& pc, const Vec& shift) {
  const Vec centered = shift - pc.mean_shift;
  std::vector<double> w(pc.rank());
  for (int i = 0; i < pc.rank(); ++i) w[i] = pc.components.row(i).dot(centered.transpose());
  return w;
}

inline constexpr double kWeightTruncation = 3.0;

/// One weight per mode, Normal(0, sqrt(variance)) truncated at +-3 sd.
inline std::vector<double> sample_weights(const PrincipalComponents& pc, Rng& rng) {
  std::vector<double> w(pc.rank(), 0.0);
  std::normal_distribution<double> standard(0.0, 1.0);
  for (int i = 0; i < pc.rank(); ++i) {
    const double sd = std::sqrt(std::max(0.0, pc.variances[i]));
    if (sd == 0.0) continue;
    double z = standard(rng);
    while (std::abs(z) > kWeightTruncation) z = standard(rng);
    w[i] = sd * z;
  }
  return w;
}

}  // namespace scanpath
