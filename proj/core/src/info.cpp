#include "troenpy/info.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace troenpy {

namespace {

void validate(const std::vector<double>& probs) {
  if (probs.empty()) {
    throw std::domain_error("distribution: probability vector is empty");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::domain_error("distribution: entry " + std::to_string(p) +
                              " outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbSumTolerance) {
    throw std::domain_error("distribution: entries sum to " +
                            std::to_string(sum) + ", not 1");
  }
}

}  // namespace

Distribution::Distribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  validate(probs_);
}

Distribution Distribution::normalized(std::vector<double> weights) {
  if (weights.empty()) {
    throw std::domain_error("distribution: weight vector is empty");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) {
      throw std::domain_error("distribution: negative or non-finite weight");
    }
    sum += w;
  }
  if (!(sum > 0.0)) {
    throw std::domain_error("distribution: weights sum to zero");
  }
  for (double& w : weights) {
    w /= sum;
  }
  return Distribution(std::move(weights));
}

double negative_information(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("negative_information: p outside [0, 1]");
  }
  return -std::log(std::max(p, kLogFloor));
}

double positive_information(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("positive_information: p outside [0, 1]");
  }
  return -std::log(std::max(1.0 - p, kLogFloor));
}

double entropy(const Distribution& d) {
  double h = 0.0;
  for (double p : d.probs()) {
    h += p * negative_information(p);
  }
  return h;
}

double troenpy(const Distribution& d) {
  double t = 0.0;
  for (double p : d.probs()) {
    t += p * positive_information(p);
  }
  return t;
}

}  // namespace troenpy
