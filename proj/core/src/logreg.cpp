#include "troenpy/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "troenpy/errors.hpp"
#include <json.hpp>

namespace troenpy {

namespace {

void scores_for(std::span<const double> weights, std::size_t num_classes,
                std::uint32_t dim, const SparseVector& x, double* scores) {
  const std::size_t stride = dim + 1;
  for (std::size_t k = 0; k < num_classes; ++k) {
    scores[k] = weights[k * stride + dim];  // bias
  }
  for (const auto& [j, v] : x.entries) {
    for (std::size_t k = 0; k < num_classes; ++k) {
      scores[k] += weights[k * stride + j] * v;
    }
  }
}

}  // namespace

double logreg_objective(std::span<const double> weights,
                        const FeatureMatrix& x,
                        std::span<const std::uint32_t> labels,
                        std::size_t num_classes, double l2_lambda,
                        std::vector<double>* grad) {
  const std::uint32_t dim = x.dim;
  const std::size_t stride = dim + 1;
  if (weights.size() != num_classes * stride) {
    throw ShapeError("logreg: weight matrix is not K x (dim + 1)");
  }
  if (labels.size() != x.rows.size()) {
    throw ShapeError("logreg: label count does not match sample count");
  }
  const std::size_t n = x.rows.size();
  if (n == 0) {
    throw ShapeError("logreg: no samples");
  }

  if (grad) {
    grad->assign(weights.size(), 0.0);
  }
  std::vector<double> scores(num_classes);
  std::vector<double> probs(num_classes);

  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t y = labels[i];
    if (y >= num_classes) {
      throw ShapeError("logreg: label out of range");
    }
    scores_for(weights, num_classes, dim, x.rows[i], scores.data());
    const double top = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (std::size_t k = 0; k < num_classes; ++k) {
      z += std::exp(scores[k] - top);
    }
    const double log_z = top + std::log(z);
    loss += log_z - scores[y];
    if (grad) {
      for (std::size_t k = 0; k < num_classes; ++k) {
        probs[k] = std::exp(scores[k] - log_z);
      }
      for (std::size_t k = 0; k < num_classes; ++k) {
        const double coeff = probs[k] - (k == y ? 1.0 : 0.0);
        (*grad)[k * stride + dim] += coeff;
        for (const auto& [j, v] : x.rows[i].entries) {
          (*grad)[k * stride + j] += coeff * v;
        }
      }
    }
  }
  loss /= static_cast<double>(n);
  if (grad) {
    for (double& g : *grad) {
      g /= static_cast<double>(n);
    }
  }

  if (l2_lambda > 0.0) {
    double penalty = 0.0;
    for (std::size_t k = 0; k < num_classes; ++k) {
      for (std::uint32_t j = 0; j < dim; ++j) {
        const double w = weights[k * stride + j];
        penalty += w * w;
        if (grad) {
          (*grad)[k * stride + j] += l2_lambda * w;
        }
      }
    }
    loss += 0.5 * l2_lambda * penalty;
  }
  return loss;
}

LogRegModel::LogRegModel(std::size_t num_classes, std::uint32_t dim,
                         std::vector<double> weights,
                         std::vector<std::string> class_names,
                         LogRegHyper hyper)
    : num_classes_(num_classes),
      dim_(dim),
      weights_(std::move(weights)),
      class_names_(std::move(class_names)),
      hyper_(hyper) {
  if (weights_.size() !=
      num_classes_ * (static_cast<std::size_t>(dim_) + 1)) {
    throw ShapeError("logreg: weight matrix is not K x (dim + 1)");
  }
}

LogRegModel LogRegModel::fit(const FeatureMatrix& x,
                             std::span<const std::uint32_t> labels,
                             std::size_t num_classes, LogRegHyper hyper,
                             std::vector<std::string> class_names,
                             FitDiagnostics* diagnostics) {
  if (num_classes < 1) {
    throw std::invalid_argument("logreg: need at least one class");
  }
  if (x.rows.size() < num_classes) {
    throw std::invalid_argument("logreg: fewer samples than classes");
  }
  const std::size_t stride = static_cast<std::size_t>(x.dim) + 1;
  std::vector<double> w(num_classes * stride, 0.0);
  std::vector<double> grad;
  std::vector<double> candidate(w.size());

  double f = logreg_objective(w, x, labels, num_classes, hyper.l2_lambda, &grad);
  if (!std::isfinite(f)) {
    throw DivergenceError("logreg: objective non-finite at initialization");
  }
  if (diagnostics) {
    *diagnostics = {};
    diagnostics->objective_trace.push_back(f);
  }

  double step = hyper.init_step;
  std::size_t iter = 0;
  bool converged = false;
  double grad_inf = 0.0;
  constexpr double kArmijo = 1e-4;
  constexpr double kMinStep = 1e-18;

  for (; iter < hyper.max_iters; ++iter) {
    grad_inf = 0.0;
    double grad_sq = 0.0;
    for (double g : grad) {
      grad_inf = std::max(grad_inf, std::abs(g));
      grad_sq += g * g;
    }
    if (grad_inf < hyper.tol) {
      converged = true;
      break;
    }

    double alpha = step;
    bool accepted = false;
    while (alpha >= kMinStep) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        candidate[i] = w[i] - alpha * grad[i];
      }
      const double f_cand =
          logreg_objective(candidate, x, labels, num_classes, hyper.l2_lambda);
      if (std::isfinite(f_cand) && f_cand <= f - kArmijo * alpha * grad_sq) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      break;  // step underflow: no further float-representable descent
    }
    w.swap(candidate);
    step = alpha * 2.0;
    f = logreg_objective(w, x, labels, num_classes, hyper.l2_lambda, &grad);
    if (!std::isfinite(f)) {
      throw DivergenceError("logreg: objective became non-finite");
    }
    if (diagnostics) {
      diagnostics->objective_trace.push_back(f);
    }
  }

  if (diagnostics) {
    diagnostics->iterations = iter;
    diagnostics->converged = converged;
    diagnostics->final_grad_norm = grad_inf;
  }
  return LogRegModel(num_classes, x.dim, std::move(w), std::move(class_names),
                     hyper);
}

std::pair<double, std::vector<double>> LogRegModel::loss_and_gradient(
    const FeatureMatrix& x, std::span<const std::uint32_t> labels) const {
  std::vector<double> grad;
  const double loss = logreg_objective(weights_, x, labels, num_classes_,
                                       hyper_.l2_lambda, &grad);
  return {loss, std::move(grad)};
}

std::vector<std::uint32_t> LogRegModel::predict(const FeatureMatrix& x) const {
  if (x.dim != dim_) {
    throw ShapeError("logreg predict: feature dimension " +
                     std::to_string(x.dim) + " does not match model " +
                     std::to_string(dim_));
  }
  std::vector<std::uint32_t> out(x.rows.size());
  std::vector<double> scores(num_classes_);
  for (std::size_t i = 0; i < x.rows.size(); ++i) {
    scores_for(weights_, num_classes_, dim_, x.rows[i], scores.data());
    std::uint32_t best = 0;
    for (std::uint32_t k = 1; k < num_classes_; ++k) {
      if (scores[k] > scores[best]) {
        best = k;
      }
    }
    out[i] = best;
  }
  return out;
}

namespace {

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hyper_fingerprint(const LogRegHyper& hyper, std::size_t k,
                              std::uint32_t dim) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%zu|%u|%.17g|%.17g|%zu|%.17g|%llu", k, dim,
                hyper.l2_lambda, hyper.tol, hyper.max_iters, hyper.init_step,
                static_cast<unsigned long long>(hyper.seed));
  return buf;
}

}  // namespace

void LogRegModel::save(const std::filesystem::path& path) const {
  nlohmann::json doc;
  doc["format_version"] = 1;
  doc["num_classes"] = num_classes_;
  doc["dim"] = dim_;
  doc["class_names"] = class_names_;
  doc["hyper"] = {{"l2_lambda", hyper_.l2_lambda},
                  {"tol", hyper_.tol},
                  {"max_iters", hyper_.max_iters},
                  {"init_step", hyper_.init_step},
                  {"seed", hyper_.seed}};
  doc["config_hash"] =
      fnv1a(hyper_fingerprint(hyper_, num_classes_, dim_));
  doc["weights"] = weights_;
  std::ofstream out(path);
  if (!out) {
    throw IoError("logreg save: cannot write " + path.string());
  }
  out << doc.dump();
  if (!out) {
    throw IoError("logreg save: write failed for " + path.string());
  }
}

LogRegModel LogRegModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IngestError("logreg load: cannot open " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IngestError("logreg load: invalid JSON in " + path.string() + ": " +
                      e.what());
  }
  if (doc.value("format_version", 0) != 1) {
    throw SchemaError("logreg load: unsupported format_version in " +
                      path.string());
  }
  LogRegHyper hyper;
  const auto& h = doc.at("hyper");
  hyper.l2_lambda = h.at("l2_lambda").get<double>();
  hyper.tol = h.at("tol").get<double>();
  hyper.max_iters = h.at("max_iters").get<std::size_t>();
  hyper.init_step = h.at("init_step").get<double>();
  hyper.seed = h.at("seed").get<std::uint64_t>();

  const auto num_classes = doc.at("num_classes").get<std::size_t>();
  const auto dim = doc.at("dim").get<std::uint32_t>();
  auto weights = doc.at("weights").get<std::vector<double>>();
  if (weights.size() != num_classes * (static_cast<std::size_t>(dim) + 1)) {
    throw SchemaError("logreg load: weight matrix shape mismatch in " +
                      path.string());
  }
  const auto expected = fnv1a(hyper_fingerprint(hyper, num_classes, dim));
  if (doc.at("config_hash").get<std::uint64_t>() != expected) {
    throw SchemaError("logreg load: config hash mismatch in " + path.string());
  }
  return LogRegModel(num_classes, dim, std::move(weights),
                     doc.value("class_names", std::vector<std::string>{}),
                     hyper);
}

}  // namespace troenpy
