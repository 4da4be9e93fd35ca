#pragma once

#include <cstddef>
#include <vector>

namespace troenpy {

// Floor applied to every log argument. Caps NI at -ln(1e-12) ~ 27.63 nats and
// keeps all derived weights finite when a probability hits 0 or 1.
inline constexpr double kLogFloor = 1e-12;

// |sum - 1| tolerance for a vector to count as a probability distribution.
inline constexpr double kProbSumTolerance = 1e-9;

/// A finite probability vector over discrete outcomes.
///
/// The checked constructor rejects anything that is not already normalized.
/// normalized() rescales non-negative weights on request; nothing is ever
/// renormalized silently.
class Distribution {
 public:
  explicit Distribution(std::vector<double> probs);

  /// Builds a distribution by rescaling non-negative weights to unit sum.
  static Distribution normalized(std::vector<double> weights);

  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const noexcept { return probs_[i]; }

 private:
  std::vector<double> probs_;
};

/// Surprisal -ln(p) of a single outcome, in nats. NI(1) = 0.
double negative_information(double p);

/// Commonness -ln(1 - p) of a single outcome, in nats. PI(0) = 0 and
/// PI(p) = NI(1 - p) exactly.
double positive_information(double p);

/// Expected negative information, sum_i p_i * NI(p_i). Uncertainty, in nats.
double entropy(const Distribution& d);

/// Expected positive information, sum_i p_i * PI(p_i). Certainty, in nats.
/// The uniform distribution over K outcomes gives ln(K / (K - 1)).
double troenpy(const Distribution& d);

}  // namespace troenpy
