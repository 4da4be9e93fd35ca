#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "troenpy/weighting.hpp"

namespace troenpy {

struct LogRegHyper {
  double l2_lambda = 1e-4;      // L2 penalty on everything but the bias
  double tol = 1e-6;            // gradient infinity-norm stopping threshold
  std::size_t max_iters = 2000;
  double init_step = 1.0;       // first line-search step size
  std::uint64_t seed = 0;       // recorded for provenance; training is W=0
};

struct FitDiagnostics {
  std::vector<double> objective_trace;  // initial value + accepted iterates
  std::size_t iterations = 0;
  bool converged = false;
  double final_grad_norm = 0.0;
};

/// Mean softmax cross-entropy over the samples plus (lambda/2)||W_no-bias||^2.
/// `weights` is a K x (dim + 1) row-major matrix whose last column is the
/// bias. Fills `grad` (same layout) with the exact gradient when non-null.
double logreg_objective(std::span<const double> weights,
                        const FeatureMatrix& x,
                        std::span<const std::uint32_t> labels,
                        std::size_t num_classes, double l2_lambda,
                        std::vector<double>* grad = nullptr);

/// Multinomial logistic regression trained by full-batch gradient descent
/// with Armijo backtracking from W = 0. Deterministic given (data, hyper).
class LogRegModel {
 public:
  /// Wraps an existing K x (dim + 1) weight matrix (last column = bias).
  LogRegModel(std::size_t num_classes, std::uint32_t dim,
              std::vector<double> weights,
              std::vector<std::string> class_names = {}, LogRegHyper hyper = {});

  static LogRegModel fit(const FeatureMatrix& x,
                         std::span<const std::uint32_t> labels,
                         std::size_t num_classes, LogRegHyper hyper = {},
                         std::vector<std::string> class_names = {},
                         FitDiagnostics* diagnostics = nullptr);

  std::pair<double, std::vector<double>> loss_and_gradient(
      const FeatureMatrix& x, std::span<const std::uint32_t> labels) const;

  /// Row-wise argmax of W [x; 1]; ties go to the lower class index.
  std::vector<std::uint32_t> predict(const FeatureMatrix& x) const;

  std::size_t num_classes() const noexcept { return num_classes_; }
  std::uint32_t dim() const noexcept { return dim_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<std::string>& class_names() const noexcept {
    return class_names_;
  }
  const LogRegHyper& hyper() const noexcept { return hyper_; }

  void save(const std::filesystem::path& path) const;
  static LogRegModel load(const std::filesystem::path& path);

 private:
  std::size_t num_classes_ = 0;
  std::uint32_t dim_ = 0;
  std::vector<double> weights_;  // K x (dim + 1), last column = bias
  std::vector<std::string> class_names_;
  LogRegHyper hyper_;
};

}  // namespace troenpy
