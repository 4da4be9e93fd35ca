#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "troenpy/corpus.hpp"
#include "troenpy/info.hpp"

namespace troenpy {

enum class FeatureBlock { TfIdf, TfPi, Btf, EcibNcf, EcibPcf };

/// Parses "tfidf" | "tfpi" | "btf" | "ecib_ncf" | "ecib_pcf".
FeatureBlock block_from_name(std::string_view name);
std::string_view block_name(FeatureBlock block);
/// Parses a comma-separated block list, e.g. "tfpi,btf,ecib_ncf".
std::vector<FeatureBlock> blocks_from_csv(std::string_view csv);

struct WeightingConfig {
  bool clamp_pcf_nonneg = false;  // clamp negative certainty gains at 0
};

// ---------------------------------------------------------------------------
// Per-term weights, computed straight off a TermClassTable.
// ---------------------------------------------------------------------------

/// 1 + ln(n / (1 + n_w)).
double idf(const TermClassTable& table, std::string_view term);

/// Add-one smoothed class distribution: p_i = (counts_i + 1) / (sum + K).
Distribution class_distribution(std::span<const std::uint32_t> counts);

/// Certainty gain: troenpy of the class distribution restricted to documents
/// containing the term, minus troenpy of the global class distribution.
/// Signed by default; clamped at 0 when clamp_nonneg is set.
double pcf_weight(const TermClassTable& table, std::string_view term,
                  bool clamp_nonneg = false);

/// Entropy analogue of pcf_weight. Computed for inspection only.
double ncf_weight(const TermClassTable& table, std::string_view term);

/// pcf_weight * idf.
double pi_weight(const TermClassTable& table, std::string_view term,
                 bool clamp_nonneg = false);

/// Class-prior-weighted log odds of smoothed document counts, entropy flavor:
/// sum_i (C_i/n) * [ln(C_i/(1+n_iw)) - ln((n-C_i)/(1+n_w-n_iw))].
double cib_ncf(const TermClassTable& table, std::string_view term);

/// Troenpy flavor:
/// sum_i (C_i/n) * [ln(C_i/(1+C_i-n_iw)) - ln((n-C_i)/(1+n-C_i-n_w+n_iw))].
double cib_pcf(const TermClassTable& table, std::string_view term);

// ---------------------------------------------------------------------------
// Document vectorization
// ---------------------------------------------------------------------------

struct SparseVector {
  // Strictly increasing indices, no explicit zeros.
  std::vector<std::pair<std::uint32_t, double>> entries;
  std::uint32_t dim = 0;

  double norm_squared() const;
  double norm() const;
  double dot(const SparseVector& other) const;
};

/// v / ||v||_2; the zero vector is returned unchanged.
SparseVector l2_normalize(SparseVector v);

struct FeatureMatrix {
  std::vector<SparseVector> rows;
  std::uint32_t dim = 0;
  std::vector<FeatureBlock> blocks;  // column layout, one span of vocab each
};

/// Frozen per-term weights fitted from a TermClassTable (training data only).
class WeightingModel {
 public:
  static WeightingModel fit(const TermClassTable& table,
                            WeightingConfig config = {});

  const TermClassTable& table() const noexcept { return table_; }
  const WeightingConfig& config() const noexcept { return config_; }

  double idf(std::uint32_t t) const { return idf_.at(t); }
  double pcf(std::uint32_t t) const { return pcf_.at(t); }
  double pi(std::uint32_t t) const { return pi_.at(t); }
  double ncf(std::uint32_t t) const { return ncf_.at(t); }
  double cib_ncf(std::uint32_t t) const { return cib_ncf_.at(t); }
  double cib_pcf(std::uint32_t t) const { return cib_pcf_.at(t); }

  /// Weighted bag-of-words vector. Each block spans the whole vocabulary and
  /// is L2-normalized on its own before the blocks are concatenated.
  /// pcf_on_2b additionally multiplies BTF/ECIB values by the PCF weight.
  /// Out-of-vocabulary terms are ignored.
  SparseVector vectorize(const Document& doc,
                         std::span<const FeatureBlock> blocks,
                         bool pcf_on_2b = false) const;

  FeatureMatrix vectorize_all(const LabeledCorpus& corpus,
                              std::span<const FeatureBlock> blocks,
                              bool pcf_on_2b = false,
                              unsigned threads = 1) const;

  /// TSV dump (term, n_w, idf, pcf, pi, cib_ncf, cib_pcf) in vocab order.
  void write_weights_tsv(std::ostream& out) const;

 private:
  WeightingModel(TermClassTable table, WeightingConfig config);

  TermClassTable table_;
  WeightingConfig config_;
  std::vector<double> idf_, pcf_, pi_, ncf_, cib_ncf_, cib_pcf_;
};

}  // namespace troenpy
