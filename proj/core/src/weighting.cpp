#include "troenpy/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "troenpy/errors.hpp"
#include "parallel.hpp"

namespace troenpy {

FeatureBlock block_from_name(std::string_view name) {
  if (name == "tfidf") return FeatureBlock::TfIdf;
  if (name == "tfpi") return FeatureBlock::TfPi;
  if (name == "btf") return FeatureBlock::Btf;
  if (name == "ecib_ncf") return FeatureBlock::EcibNcf;
  if (name == "ecib_pcf") return FeatureBlock::EcibPcf;
  throw ConfigError("unknown feature block '" + std::string(name) +
                    "' (expected tfidf, tfpi, btf, ecib_ncf, or ecib_pcf)");
}

std::string_view block_name(FeatureBlock block) {
  switch (block) {
    case FeatureBlock::TfIdf:
      return "tfidf";
    case FeatureBlock::TfPi:
      return "tfpi";
    case FeatureBlock::Btf:
      return "btf";
    case FeatureBlock::EcibNcf:
      return "ecib_ncf";
    case FeatureBlock::EcibPcf:
      return "ecib_pcf";
  }
  return "?";
}

std::vector<FeatureBlock> blocks_from_csv(std::string_view csv) {
  std::vector<FeatureBlock> blocks;
  std::size_t start = 0;
  while (start <= csv.size()) {
    auto comma = csv.find(',', start);
    if (comma == std::string_view::npos) {
      comma = csv.size();
    }
    auto piece = csv.substr(start, comma - start);
    if (!piece.empty()) {
      blocks.push_back(block_from_name(piece));
    }
    start = comma + 1;
  }
  if (blocks.empty()) {
    throw ConfigError("feature block list is empty");
  }
  return blocks;
}

namespace {

double log_floored(double x) { return std::log(std::max(x, kLogFloor)); }

std::vector<std::uint32_t> restricted_counts(const TermClassTable& table,
                                             std::uint32_t t) {
  const std::size_t k = table.num_classes();
  std::vector<std::uint32_t> counts(k);
  for (std::size_t c = 0; c < k; ++c) {
    counts[c] = table.class_doc_freq(t, static_cast<std::uint32_t>(c));
  }
  return counts;
}

double idf_at(const TermClassTable& table, std::uint32_t t) {
  return 1.0 + std::log(static_cast<double>(table.total_docs()) /
                        (1.0 + table.doc_freq(t)));
}

double pcf_at(const TermClassTable& table, std::uint32_t t, bool clamp) {
  const double restricted =
      troenpy(class_distribution(restricted_counts(table, t)));
  const double global = troenpy(class_distribution(table.class_counts()));
  const double gain = restricted - global;
  return (clamp && gain < 0.0) ? 0.0 : gain;
}

double ncf_at(const TermClassTable& table, std::uint32_t t) {
  const double restricted =
      entropy(class_distribution(restricted_counts(table, t)));
  const double global = entropy(class_distribution(table.class_counts()));
  return restricted - global;
}

void require_multiclass(const TermClassTable& table) {
  if (table.num_classes() < 2) {
    throw std::domain_error(
        "cib: needs at least 2 classes (n - C_i vanishes otherwise)");
  }
}

double cib_ncf_at(const TermClassTable& table, std::uint32_t t) {
  require_multiclass(table);
  const double n = static_cast<double>(table.total_docs());
  const double n_w = table.doc_freq(t);
  double sum = 0.0;
  for (std::size_t i = 0; i < table.num_classes(); ++i) {
    const double c_i = table.class_counts()[i];
    if (c_i == 0.0) {
      continue;  // zero prior, zero contribution
    }
    const double n_iw = table.class_doc_freq(t, static_cast<std::uint32_t>(i));
    const double in_class = log_floored(c_i / (1.0 + n_iw));
    const double out_class = log_floored((n - c_i) / (1.0 + n_w - n_iw));
    sum += (c_i / n) * (in_class - out_class);
  }
  return sum;
}

double cib_pcf_at(const TermClassTable& table, std::uint32_t t) {
  require_multiclass(table);
  const double n = static_cast<double>(table.total_docs());
  const double n_w = table.doc_freq(t);
  double sum = 0.0;
  for (std::size_t i = 0; i < table.num_classes(); ++i) {
    const double c_i = table.class_counts()[i];
    if (c_i == 0.0) {
      continue;
    }
    const double n_iw = table.class_doc_freq(t, static_cast<std::uint32_t>(i));
    const double in_class = log_floored(c_i / (1.0 + c_i - n_iw));
    const double out_class =
        log_floored((n - c_i) / (1.0 + n - c_i - n_w + n_iw));
    sum += (c_i / n) * (in_class - out_class);
  }
  return sum;
}

}  // namespace

double idf(const TermClassTable& table, std::string_view term) {
  return idf_at(table, table.index_of(term));
}

Distribution class_distribution(std::span<const std::uint32_t> counts) {
  if (counts.empty()) {
    throw std::domain_error("class_distribution: no classes");
  }
  std::vector<double> weights(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    weights[i] = static_cast<double>(counts[i]) + 1.0;
  }
  return Distribution::normalized(std::move(weights));
}

double pcf_weight(const TermClassTable& table, std::string_view term,
                  bool clamp_nonneg) {
  return pcf_at(table, table.index_of(term), clamp_nonneg);
}

double ncf_weight(const TermClassTable& table, std::string_view term) {
  return ncf_at(table, table.index_of(term));
}

double pi_weight(const TermClassTable& table, std::string_view term,
                 bool clamp_nonneg) {
  const auto t = table.index_of(term);
  return pcf_at(table, t, clamp_nonneg) * idf_at(table, t);
}

double cib_ncf(const TermClassTable& table, std::string_view term) {
  return cib_ncf_at(table, table.index_of(term));
}

double cib_pcf(const TermClassTable& table, std::string_view term) {
  return cib_pcf_at(table, table.index_of(term));
}

double SparseVector::norm_squared() const {
  double sq = 0.0;
  for (const auto& [idx, value] : entries) {
    sq += value * value;
  }
  return sq;
}

double SparseVector::norm() const { return std::sqrt(norm_squared()); }

double SparseVector::dot(const SparseVector& other) const {
  double sum = 0.0;
  auto a = entries.begin();
  auto b = other.entries.begin();
  while (a != entries.end() && b != other.entries.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      sum += a->second * b->second;
      ++a;
      ++b;
    }
  }
  return sum;
}

SparseVector l2_normalize(SparseVector v) {
  const double n = v.norm();
  if (n > 0.0) {
    for (auto& [idx, value] : v.entries) {
      value /= n;
    }
  }
  return v;
}

WeightingModel::WeightingModel(TermClassTable table, WeightingConfig config)
    : table_(std::move(table)), config_(config) {}

WeightingModel WeightingModel::fit(const TermClassTable& table,
                                   WeightingConfig config) {
  WeightingModel model(table, config);
  const std::size_t m = table.vocab_size();
  const bool multiclass = table.num_classes() >= 2;
  model.idf_.resize(m);
  model.pcf_.resize(m);
  model.pi_.resize(m);
  model.ncf_.resize(m);
  model.cib_ncf_.resize(m);
  model.cib_pcf_.resize(m);
  for (std::uint32_t t = 0; t < m; ++t) {
    model.idf_[t] = idf_at(table, t);
    model.pcf_[t] = pcf_at(table, t, config.clamp_pcf_nonneg);
    model.pi_[t] = model.pcf_[t] * model.idf_[t];
    model.ncf_[t] = ncf_at(table, t);
    // single-class tables still fit (kNN on one class is legal, if odd)
    model.cib_ncf_[t] = multiclass ? cib_ncf_at(table, t) : 0.0;
    model.cib_pcf_[t] = multiclass ? cib_pcf_at(table, t) : 0.0;
  }
  return model;
}

SparseVector WeightingModel::vectorize(const Document& doc,
                                       std::span<const FeatureBlock> blocks,
                                       bool pcf_on_2b) const {
  if (blocks.empty()) {
    throw ConfigError("vectorize: block list is empty");
  }
  const auto m = static_cast<std::uint32_t>(table_.vocab_size());
  SparseVector out;
  out.dim = m * static_cast<std::uint32_t>(blocks.size());

  std::vector<std::pair<std::uint32_t, double>> block_entries;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::uint32_t offset = static_cast<std::uint32_t>(b) * m;
    block_entries.clear();
    // doc.tf iterates lexicographically and the vocab is lexicographic, so
    // indices come out strictly increasing.
    for (const auto& [term, count] : doc.tf) {
      const auto idx = table_.find(term);
      if (!idx) {
        continue;
      }
      double value = 0.0;
      bool two_b = false;
      switch (blocks[b]) {
        case FeatureBlock::TfIdf:
          value = count * idf_[*idx];
          break;
        case FeatureBlock::TfPi:
          value = count * pi_[*idx];
          break;
        case FeatureBlock::Btf:
          value = 1.0;
          two_b = true;
          break;
        case FeatureBlock::EcibNcf:
          value = count * cib_ncf_[*idx];
          two_b = true;
          break;
        case FeatureBlock::EcibPcf:
          value = count * cib_pcf_[*idx];
          two_b = true;
          break;
      }
      if (two_b && pcf_on_2b) {
        value *= pcf_[*idx];
      }
      if (value != 0.0) {
        block_entries.emplace_back(offset + *idx, value);
      }
    }
    double sq = 0.0;
    for (const auto& [idx, value] : block_entries) {
      sq += value * value;
    }
    const double norm = std::sqrt(sq);
    if (norm > 0.0) {
      for (auto& [idx, value] : block_entries) {
        value /= norm;
      }
    }
    out.entries.insert(out.entries.end(), block_entries.begin(),
                       block_entries.end());
  }
  return out;
}

FeatureMatrix WeightingModel::vectorize_all(const LabeledCorpus& corpus,
                                            std::span<const FeatureBlock> blocks,
                                            bool pcf_on_2b,
                                            unsigned threads) const {
  FeatureMatrix matrix;
  matrix.blocks.assign(blocks.begin(), blocks.end());
  matrix.dim = static_cast<std::uint32_t>(table_.vocab_size() * blocks.size());
  matrix.rows.resize(corpus.size());
  detail::parallel_for_index(corpus.size(), threads, [&](std::size_t i) {
    matrix.rows[i] = vectorize(corpus.documents()[i], blocks, pcf_on_2b);
  });
  return matrix;
}

void WeightingModel::write_weights_tsv(std::ostream& out) const {
  out << "term\tn_w\tidf\tpcf\tpi\tcib_ncf\tcib_pcf\n";
  char buf[160];
  for (std::uint32_t t = 0; t < table_.vocab_size(); ++t) {
    std::snprintf(buf, sizeof(buf), "\t%u\t%.12g\t%.12g\t%.12g\t%.12g\t%.12g\n",
                  table_.doc_freq(t), idf_[t], pcf_[t], pi_[t], cib_ncf_[t],
                  cib_pcf_[t]);
    out << table_.vocab()[t] << buf;
  }
}

}  // namespace troenpy
