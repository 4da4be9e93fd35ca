#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "troenpy/corpus.hpp"
#include "troenpy/knn.hpp"
#include "troenpy/logreg.hpp"
#include "troenpy/weighting.hpp"

namespace troenpy {

enum class ClassifierKind { Knn, LogReg };
ClassifierKind classifier_from_name(std::string_view name);
std::string_view classifier_name(ClassifierKind kind);

struct SplitSpec {
  bool predefined = false;      // use the dataset's shipped train/test split
  double test_fraction = 0.2;
  std::size_t repeats = 50;
  std::uint64_t base_seed = 42;  // repeat r uses seed base_seed + r
};

struct ExperimentConfig {
  std::filesystem::path dataset;
  CorpusFormat format = CorpusFormat::Jsonl;
  ClassifierKind classifier = ClassifierKind::Knn;
  std::vector<FeatureBlock> blocks{FeatureBlock::TfPi};
  bool pcf_on_2b = false;
  bool clamp_pcf_nonneg = false;
  bool sum_btf_distance = false;  // kNN: add a BTF-only distance matrix
  std::size_t k = 7;
  LogRegHyper logreg;
  SplitSpec split;
  std::uint32_t min_df = 1;
  std::size_t min_token_length = 2;
  std::filesystem::path stopwords;  // empty = no stop list
  unsigned threads = 0;             // 0 = hardware concurrency
};

struct EvalReport {
  std::vector<std::uint64_t> seeds;   // one per repeat (empty if predefined)
  std::vector<double> errors;         // per-repeat test error rates
  double mean_error = 0.0;
  double std_error = 0.0;             // population standard deviation
  bool predefined_split = false;
  std::optional<double> baseline_mean_error;
  std::optional<double> relative_error_reduction;
  std::map<std::string, double> timings_ms;
};

/// Fraction of mismatching labels.
double error_rate(std::span<const std::uint32_t> predictions,
                  std::span<const std::uint32_t> truth);

/// (baseline - current) / baseline. Baseline must be positive.
double relative_reduction(double baseline_err, double new_err);

/// Loads the dataset and runs the full protocol: per repeat, split, fit the
/// weighting on the train side only, vectorize both sides, classify, score.
/// Predefined-split datasets run exactly once on the shipped split.
EvalReport run_experiment(const ExperimentConfig& config);

/// Same protocol on an already loaded corpus (random-split mode only).
EvalReport run_experiment(const ExperimentConfig& config,
                          const LabeledCorpus& corpus);

/// Loads a dataset that ships a split: train/test subtrees (class-dirs) or
/// train.jsonl/test.jsonl or train.tsv/test.tsv inside the dataset directory.
/// Both sides share one lexicographically sorted class-name space.
std::pair<LabeledCorpus, LabeledCorpus> load_predefined(
    const std::filesystem::path& dir, CorpusFormat format,
    const TokenizerConfig& tokenizer = {});

std::string report_json(const EvalReport& report,
                        const ExperimentConfig& config);
void write_report_json(const EvalReport& report, const ExperimentConfig& config,
                       const std::filesystem::path& path);
void write_repeat_csv(const EvalReport& report,
                      const std::filesystem::path& path);

/// Reads mean_error back from a previously written report.
double load_report_mean_error(const std::filesystem::path& path);
/// Fills the baseline fields of `report` from a previous report file.
void apply_baseline(EvalReport& report, const std::filesystem::path& baseline);

enum class ExportSide { All, Train, Test };

/// Writes one TSV row per document: id, class name, dense feature vector.
/// Side all fits the weighting on the whole corpus and exports everything;
/// train/test reproduce the experiment split at base_seed (or the predefined
/// split) and fit on the train side only.
void export_vectors(const ExperimentConfig& config,
                    const std::filesystem::path& out_path,
                    ExportSide side = ExportSide::All);

}  // namespace troenpy
