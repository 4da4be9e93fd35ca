#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "troenpy/weighting.hpp"

namespace troenpy {

/// Rows are test documents, columns are train documents.
struct DistanceMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

/// Euclidean distance between every test row and every train row.
/// Symmetric with a zero diagonal when both sides are the same matrix.
DistanceMatrix pairwise_distance(const FeatureMatrix& test,
                                 const FeatureMatrix& train,
                                 unsigned threads = 1);

/// Entrywise sum of two equally shaped distance matrices.
DistanceMatrix combined_distance(const DistanceMatrix& a,
                                 const DistanceMatrix& b);

/// Majority vote among the k nearest train documents per test row.
/// Deterministic: ties in the k-th distance go to the lower train index;
/// vote ties go to the tied class with the smallest mean distance, then to
/// the lower class index.
std::vector<std::uint32_t> knn_predict(const DistanceMatrix& dist,
                                       std::span<const std::uint32_t> train_labels,
                                       std::size_t k);

}  // namespace troenpy
