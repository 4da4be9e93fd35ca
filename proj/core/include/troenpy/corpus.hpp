#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace troenpy {

struct TokenizerConfig {
  std::size_t min_token_length = 2;
  std::unordered_set<std::string> stopwords;  // empty set = no stop filtering
};

/// Lowercases, splits on maximal runs of non-alphanumeric bytes, drops tokens
/// shorter than min_token_length, then drops stop words. Deterministic.
std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerConfig& config = {});

/// Reads a newline-delimited stop-word file (one lowercase term per line).
std::unordered_set<std::string> load_stopwords(
    const std::filesystem::path& path);

struct Document {
  std::string id;
  std::uint32_t label = 0;  // dense class index, 0..K-1
  std::vector<std::string> tokens;
  std::map<std::string, std::uint32_t> tf;  // term -> multiplicity in tokens
};

/// Builds a Document with its tf map derived from the token list.
Document make_document(std::string id, std::uint32_t label,
                       std::vector<std::string> tokens);

class LabeledCorpus {
 public:
  LabeledCorpus() = default;

  /// Validates label indices against class_names and tallies class counts.
  LabeledCorpus(std::vector<Document> documents,
                std::vector<std::string> class_names);

  const std::vector<Document>& documents() const noexcept { return docs_; }
  const std::vector<std::string>& class_names() const noexcept {
    return class_names_;
  }
  const std::vector<std::uint32_t>& class_counts() const noexcept {
    return class_counts_;
  }
  std::size_t size() const noexcept { return docs_.size(); }
  std::size_t num_classes() const noexcept { return class_names_.size(); }

  std::vector<std::uint32_t> labels() const;

 private:
  std::vector<Document> docs_;
  std::vector<std::string> class_names_;
  std::vector<std::uint32_t> class_counts_;
};

enum class CorpusFormat { Jsonl, ClassDirs, Tsv };

/// Parses "jsonl" | "class-dirs" | "tsv". Throws ConfigError otherwise.
CorpusFormat format_from_name(std::string_view name);
std::string_view format_name(CorpusFormat format);

/// Loads a labeled corpus.
///
/// jsonl:      one {"label": ..., "text": ...} object per line
/// class-dirs: one subdirectory per class, one plain-text file per document
/// tsv:        label <TAB> text, one document per line
///
/// Document ids are line numbers (jsonl/tsv) or class/filename (class-dirs);
/// class names are sorted lexicographically.
LabeledCorpus load_corpus(const std::filesystem::path& path,
                          CorpusFormat format,
                          const TokenizerConfig& tokenizer = {});

/// Per-term, per-class document counts gathered in a single corpus pass.
/// Every weight in the toolkit is computed from this table alone.
class TermClassTable {
 public:
  TermClassTable(std::vector<std::string> vocab, std::uint64_t total_docs,
                 std::vector<std::uint32_t> class_counts,
                 std::vector<std::uint32_t> doc_freq,
                 std::vector<std::uint32_t> class_doc_freq);

  const std::vector<std::string>& vocab() const noexcept { return vocab_; }
  std::size_t vocab_size() const noexcept { return vocab_.size(); }
  std::uint64_t total_docs() const noexcept { return total_docs_; }
  std::size_t num_classes() const noexcept { return class_counts_.size(); }
  const std::vector<std::uint32_t>& class_counts() const noexcept {
    return class_counts_;
  }

  /// n_w: number of documents containing vocab term `t`.
  std::uint32_t doc_freq(std::uint32_t t) const { return doc_freq_.at(t); }
  /// n_iw: number of documents of class `c` containing vocab term `t`.
  std::uint32_t class_doc_freq(std::uint32_t t, std::uint32_t c) const {
    return class_doc_freq_.at(static_cast<std::size_t>(t) * num_classes() + c);
  }

  std::optional<std::uint32_t> find(std::string_view term) const;
  /// Index of an in-vocabulary term; throws std::out_of_range otherwise.
  std::uint32_t index_of(std::string_view term) const;

 private:
  std::vector<std::string> vocab_;  // lexicographic order
  std::unordered_map<std::string, std::uint32_t> index_;
  std::uint64_t total_docs_ = 0;
  std::vector<std::uint32_t> class_counts_;
  std::vector<std::uint32_t> doc_freq_;
  std::vector<std::uint32_t> class_doc_freq_;  // [term * K + class]
};

/// Single pass over the corpus. The vocabulary keeps exactly the terms whose
/// document frequency is >= min_df, in lexicographic order.
TermClassTable build_table(const LabeledCorpus& corpus,
                           std::uint32_t min_df = 1);

/// Seeded uniform random partition without replacement. |test| is
/// round(n * test_fraction); identical (seed, corpus order) gives an
/// identical partition on every platform.
std::pair<LabeledCorpus, LabeledCorpus> split(const LabeledCorpus& corpus,
                                              double test_fraction,
                                              std::uint64_t seed);

}  // namespace troenpy
