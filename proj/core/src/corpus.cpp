#include "troenpy/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "troenpy/errors.hpp"
#include <json.hpp>

namespace fs = std::filesystem;

namespace troenpy {

namespace {

bool ascii_alnum(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

char ascii_lower(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a')
                                : static_cast<char>(c);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerConfig& config) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (current.size() >= config.min_token_length &&
        (config.stopwords.empty() || !config.stopwords.contains(current))) {
      out.push_back(current);
    }
    current.clear();
  };
  for (unsigned char c : text) {
    if (ascii_alnum(c)) {
      current.push_back(ascii_lower(c));
    } else if (!current.empty()) {
      flush();
    }
  }
  if (!current.empty()) {
    flush();
  }
  return out;
}

std::unordered_set<std::string> load_stopwords(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IngestError("stopwords: cannot open " + path.string());
  }
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                             line.back() == '\t')) {
      line.pop_back();
    }
    if (!line.empty()) {
      for (char& c : line) {
        c = ascii_lower(static_cast<unsigned char>(c));
      }
      words.insert(line);
    }
  }
  return words;
}

Document make_document(std::string id, std::uint32_t label,
                       std::vector<std::string> tokens) {
  Document doc;
  doc.id = std::move(id);
  doc.label = label;
  doc.tokens = std::move(tokens);
  for (const auto& t : doc.tokens) {
    ++doc.tf[t];
  }
  return doc;
}

LabeledCorpus::LabeledCorpus(std::vector<Document> documents,
                             std::vector<std::string> class_names)
    : docs_(std::move(documents)),
      class_names_(std::move(class_names)),
      class_counts_(class_names_.size(), 0) {
  for (const auto& doc : docs_) {
    if (doc.label >= class_names_.size()) {
      throw std::invalid_argument("corpus: document '" + doc.id +
                                  "' has label index " +
                                  std::to_string(doc.label) + " but only " +
                                  std::to_string(class_names_.size()) +
                                  " classes exist");
    }
    ++class_counts_[doc.label];
  }
}

std::vector<std::uint32_t> LabeledCorpus::labels() const {
  std::vector<std::uint32_t> out;
  out.reserve(docs_.size());
  for (const auto& doc : docs_) {
    out.push_back(doc.label);
  }
  return out;
}

CorpusFormat format_from_name(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::Jsonl;
  if (name == "class-dirs") return CorpusFormat::ClassDirs;
  if (name == "tsv") return CorpusFormat::Tsv;
  throw ConfigError("unknown corpus format '" + std::string(name) +
                    "' (expected jsonl, class-dirs, or tsv)");
}

std::string_view format_name(CorpusFormat format) {
  switch (format) {
    case CorpusFormat::Jsonl:
      return "jsonl";
    case CorpusFormat::ClassDirs:
      return "class-dirs";
    case CorpusFormat::Tsv:
      return "tsv";
  }
  return "?";
}

namespace {

struct RawRecord {
  std::string id;
  std::string label;
  std::string text;
};

std::vector<RawRecord> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IngestError("jsonl: cannot open " + path.string());
  }
  std::vector<RawRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IngestError(path.string() + ":" + std::to_string(lineno) +
                        ": invalid JSON: " + e.what());
    }
    if (!obj.is_object() || !obj.contains("label") ||
        !obj["label"].is_string()) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) +
                        ": missing string field 'label'");
    }
    if (!obj.contains("text") || !obj["text"].is_string()) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) +
                        ": missing string field 'text'");
    }
    records.push_back({std::to_string(lineno), obj["label"].get<std::string>(),
                       obj["text"].get<std::string>()});
  }
  return records;
}

std::vector<RawRecord> read_tsv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IngestError("tsv: cannot open " + path.string());
  }
  std::vector<RawRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw IngestError(path.string() + ":" + std::to_string(lineno) +
                        ": expected 'label<TAB>text'");
    }
    std::string label = line.substr(0, tab);
    if (label.empty()) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) +
                        ": empty label");
    }
    records.push_back({std::to_string(lineno), std::move(label),
                       line.substr(tab + 1)});
  }
  return records;
}

std::vector<RawRecord> read_class_dirs(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw IngestError("class-dirs: " + root.string() + " is not a directory");
  }
  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) {
      class_dirs.push_back(entry.path());
    }
  }
  std::sort(class_dirs.begin(), class_dirs.end());
  if (class_dirs.empty()) {
    throw IngestError("class-dirs: no class subdirectories under " +
                      root.string());
  }
  std::vector<RawRecord> records;
  for (const auto& dir : class_dirs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file()) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      std::ifstream in(file, std::ios::binary);
      if (!in) {
        throw IngestError("class-dirs: cannot read " + file.string());
      }
      std::ostringstream text;
      text << in.rdbuf();
      records.push_back({dir.filename().string() + "/" +
                             file.filename().string(),
                         dir.filename().string(), text.str()});
    }
  }
  return records;
}

}  // namespace

LabeledCorpus load_corpus(const fs::path& path, CorpusFormat format,
                          const TokenizerConfig& tokenizer) {
  if (!fs::exists(path)) {
    throw IngestError("corpus: no such path: " + path.string());
  }
  std::vector<RawRecord> records;
  switch (format) {
    case CorpusFormat::Jsonl:
      records = read_jsonl(path);
      break;
    case CorpusFormat::Tsv:
      records = read_tsv(path);
      break;
    case CorpusFormat::ClassDirs:
      records = read_class_dirs(path);
      break;
  }

  std::vector<std::string> class_names;
  for (const auto& rec : records) {
    class_names.push_back(rec.label);
  }
  std::sort(class_names.begin(), class_names.end());
  class_names.erase(std::unique(class_names.begin(), class_names.end()),
                    class_names.end());

  std::unordered_map<std::string, std::uint32_t> class_index;
  for (std::uint32_t i = 0; i < class_names.size(); ++i) {
    class_index.emplace(class_names[i], i);
  }

  std::vector<Document> docs;
  docs.reserve(records.size());
  for (auto& rec : records) {
    docs.push_back(make_document(std::move(rec.id),
                                 class_index.at(rec.label),
                                 tokenize(rec.text, tokenizer)));
  }
  return LabeledCorpus(std::move(docs), std::move(class_names));
}

TermClassTable::TermClassTable(std::vector<std::string> vocab,
                               std::uint64_t total_docs,
                               std::vector<std::uint32_t> class_counts,
                               std::vector<std::uint32_t> doc_freq,
                               std::vector<std::uint32_t> class_doc_freq)
    : vocab_(std::move(vocab)),
      total_docs_(total_docs),
      class_counts_(std::move(class_counts)),
      doc_freq_(std::move(doc_freq)),
      class_doc_freq_(std::move(class_doc_freq)) {
  const std::size_t k = class_counts_.size();
  if (doc_freq_.size() != vocab_.size() ||
      class_doc_freq_.size() != vocab_.size() * k) {
    throw ShapeError("term table: count arrays do not match vocabulary size");
  }
  for (std::size_t t = 0; t < vocab_.size(); ++t) {
    std::uint64_t across_classes = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const std::uint32_t n_iw = class_doc_freq_[t * k + c];
      if (n_iw > std::min<std::uint64_t>(class_counts_[c], doc_freq_[t])) {
        throw std::invalid_argument("term table: per-class count for '" +
                                    vocab_[t] + "' exceeds its bounds");
      }
      across_classes += n_iw;
    }
    if (across_classes != doc_freq_[t] || doc_freq_[t] > total_docs_) {
      throw std::invalid_argument("term table: inconsistent counts for '" +
                                  vocab_[t] + "'");
    }
    index_.emplace(vocab_[t], static_cast<std::uint32_t>(t));
  }
}

std::optional<std::uint32_t> TermClassTable::find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::uint32_t TermClassTable::index_of(std::string_view term) const {
  auto idx = find(term);
  if (!idx) {
    throw std::out_of_range("term table: '" + std::string(term) +
                            "' is not in the vocabulary");
  }
  return *idx;
}

TermClassTable build_table(const LabeledCorpus& corpus, std::uint32_t min_df) {
  if (corpus.size() == 0) {
    throw std::invalid_argument("build_table: corpus is empty");
  }
  if (min_df < 1) {
    throw std::invalid_argument("build_table: min_df must be >= 1");
  }
  const std::size_t k = corpus.num_classes();

  // std::map keeps the vocabulary lexicographic as it grows.
  struct Counts {
    std::uint32_t df = 0;
    std::vector<std::uint32_t> per_class;
  };
  std::map<std::string, Counts> counts;
  for (const auto& doc : corpus.documents()) {
    for (const auto& [term, tf] : doc.tf) {
      auto& c = counts[term];
      if (c.per_class.empty()) {
        c.per_class.assign(k, 0);
      }
      ++c.df;
      ++c.per_class[doc.label];
    }
  }

  std::vector<std::string> vocab;
  std::vector<std::uint32_t> doc_freq;
  std::vector<std::uint32_t> class_doc_freq;
  for (auto& [term, c] : counts) {
    if (c.df < min_df) {
      continue;
    }
    vocab.push_back(term);
    doc_freq.push_back(c.df);
    class_doc_freq.insert(class_doc_freq.end(), c.per_class.begin(),
                          c.per_class.end());
  }
  return TermClassTable(std::move(vocab), corpus.size(),
                        corpus.class_counts(), std::move(doc_freq),
                        std::move(class_doc_freq));
}

namespace {

// Unbiased bounded draw; depends only on the mt19937_64 output sequence,
// which the standard pins down exactly.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) {
      return r % bound;
    }
  }
}

}  // namespace

std::pair<LabeledCorpus, LabeledCorpus> split(const LabeledCorpus& corpus,
                                              double test_fraction,
                                              std::uint64_t seed) {
  const std::size_t n = corpus.size();
  if (n < 2) {
    throw std::invalid_argument("split: corpus needs at least 2 documents");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("split: test_fraction must be in (0, 1)");
  }
  const auto test_size = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * test_fraction));
  if (test_size == 0 || test_size >= n) {
    throw std::invalid_argument(
        "split: fraction " + std::to_string(test_fraction) + " on " +
        std::to_string(n) + " documents leaves one side empty");
  }

  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    order[i] = i;
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[uniform_below(rng, i + 1)]);
  }

  std::vector<std::uint32_t> test_idx(order.begin(), order.begin() + test_size);
  std::vector<std::uint32_t> train_idx(order.begin() + test_size, order.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  auto take = [&](const std::vector<std::uint32_t>& idx) {
    std::vector<Document> docs;
    docs.reserve(idx.size());
    for (auto i : idx) {
      docs.push_back(corpus.documents()[i]);
    }
    return LabeledCorpus(std::move(docs), corpus.class_names());
  };
  return {take(train_idx), take(test_idx)};
}

}  // namespace troenpy
