#include "troenpy/knn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "troenpy/errors.hpp"
#include "parallel.hpp"

namespace troenpy {

DistanceMatrix pairwise_distance(const FeatureMatrix& test,
                                 const FeatureMatrix& train,
                                 unsigned threads) {
  if (test.dim != train.dim) {
    throw ShapeError("pairwise_distance: dimension mismatch (" +
                     std::to_string(test.dim) + " vs " +
                     std::to_string(train.dim) + ")");
  }
  const std::size_t rows = test.rows.size();
  const std::size_t cols = train.rows.size();

  std::vector<double> train_sq(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    train_sq[c] = train.rows[c].norm_squared();
  }

  DistanceMatrix out;
  out.rows = rows;
  out.cols = cols;
  out.values.resize(rows * cols);
  detail::parallel_for_index(rows, threads, [&](std::size_t r) {
    const SparseVector& x = test.rows[r];
    const double x_sq = x.norm_squared();
    for (std::size_t c = 0; c < cols; ++c) {
      // identical rows cancel exactly: x_sq == dot for the same entry list
      const double sq = x_sq + train_sq[c] - 2.0 * x.dot(train.rows[c]);
      out.at(r, c) = std::sqrt(std::max(sq, 0.0));
    }
  });
  return out;
}

DistanceMatrix combined_distance(const DistanceMatrix& a,
                                 const DistanceMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) {
    throw ShapeError("combined_distance: shape mismatch");
  }
  DistanceMatrix out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] += b.values[i];
  }
  return out;
}

std::vector<std::uint32_t> knn_predict(const DistanceMatrix& dist,
                                       std::span<const std::uint32_t> train_labels,
                                       std::size_t k) {
  if (train_labels.size() != dist.cols) {
    throw ShapeError("knn_predict: label count does not match matrix columns");
  }
  if (k < 1 || k > dist.cols) {
    throw std::invalid_argument("knn_predict: k=" + std::to_string(k) +
                                " outside [1, " + std::to_string(dist.cols) +
                                "]");
  }
  std::uint32_t num_classes = 0;
  for (auto label : train_labels) {
    num_classes = std::max(num_classes, label + 1);
  }

  std::vector<std::uint32_t> predictions(dist.rows);
  std::vector<std::uint32_t> order(dist.cols);
  std::vector<std::size_t> votes(num_classes);
  std::vector<double> class_dist_sum(num_classes);

  for (std::size_t r = 0; r < dist.rows; ++r) {
    for (std::uint32_t c = 0; c < dist.cols; ++c) {
      order[c] = c;
    }
    // Lexicographic (distance, index) order makes the k-th-place tie-break
    // "lower train index" automatic.
    auto closer = [&](std::uint32_t a, std::uint32_t b) {
      const double da = dist.at(r, a);
      const double db = dist.at(r, b);
      return da < db || (da == db && a < b);
    };
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(),
                     closer);
    // Fixed accumulation order keeps the mean-distance tie-break independent
    // of how nth_element arranged the winners.
    std::sort(order.begin(), order.begin() + k, closer);

    std::fill(votes.begin(), votes.end(), 0);
    std::fill(class_dist_sum.begin(), class_dist_sum.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      const std::uint32_t neighbor = order[j];
      ++votes[train_labels[neighbor]];
      class_dist_sum[train_labels[neighbor]] += dist.at(r, neighbor);
    }

    const std::size_t top = *std::max_element(votes.begin(), votes.end());
    std::uint32_t winner = 0;
    double winner_mean = 0.0;
    bool found = false;
    for (std::uint32_t cls = 0; cls < num_classes; ++cls) {
      if (votes[cls] != top) {
        continue;
      }
      const double mean = class_dist_sum[cls] / static_cast<double>(top);
      if (!found || mean < winner_mean) {
        found = true;
        winner = cls;
        winner_mean = mean;
      }
    }
    predictions[r] = winner;
  }
  return predictions;
}

}  // namespace troenpy
