#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace scanpath {

/// Point or shift in clustering space. Dimension is 2 (x, y) or 3 (x, y, t);
/// the fixed upper bound keeps these off the heap.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

/// Row-major r x d matrix of principal directions, r <= d <= 3.
using Basis = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor, 3, 3>;

using PointList = std::vector<Vec>;

inline Vec zero_vec(int dim) { return Vec::Zero(dim); }

// Error hierarchy. Every failure the library reports derives from Error so
// callers (the CLI in particular) can map them to one exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ArgumentError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct SchemaError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct VersionError : Error {
  using Error::Error;
};

struct GenerationError : Error {
  using Error::Error;
};

struct FeatureError : Error {
  using Error::Error;
};

}  // namespace scanpath
