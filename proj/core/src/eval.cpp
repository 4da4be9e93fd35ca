#include "troenpy/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "troenpy/errors.hpp"
#include <json.hpp>

namespace fs = std::filesystem;

namespace troenpy {

ClassifierKind classifier_from_name(std::string_view name) {
  if (name == "knn") return ClassifierKind::Knn;
  if (name == "logreg") return ClassifierKind::LogReg;
  throw ConfigError("unknown classifier '" + std::string(name) +
                    "' (expected knn or logreg)");
}

std::string_view classifier_name(ClassifierKind kind) {
  return kind == ClassifierKind::Knn ? "knn" : "logreg";
}

double error_rate(std::span<const std::uint32_t> predictions,
                  std::span<const std::uint32_t> truth) {
  if (predictions.size() != truth.size()) {
    throw ShapeError("error_rate: prediction/truth length mismatch");
  }
  if (predictions.empty()) {
    throw ShapeError("error_rate: empty label vectors");
  }
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    wrong += predictions[i] != truth[i];
  }
  return static_cast<double>(wrong) / static_cast<double>(predictions.size());
}

double relative_reduction(double baseline_err, double new_err) {
  if (!(baseline_err > 0.0)) {
    throw std::domain_error(
        "relative_reduction: baseline error must be positive");
  }
  return (baseline_err - new_err) / baseline_err;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

TokenizerConfig tokenizer_from_config(const ExperimentConfig& config) {
  TokenizerConfig tok;
  tok.min_token_length = config.min_token_length;
  if (!config.stopwords.empty()) {
    tok.stopwords = load_stopwords(config.stopwords);
  }
  return tok;
}

void validate_config(const ExperimentConfig& config) {
  if (config.blocks.empty()) {
    throw ConfigError("experiment: feature block list is empty");
  }
  if (config.classifier == ClassifierKind::Knn && config.k < 1) {
    throw ConfigError("experiment: k must be >= 1");
  }
  if (!config.split.predefined) {
    if (!(config.split.test_fraction > 0.0 &&
          config.split.test_fraction < 1.0)) {
      throw ConfigError("experiment: test fraction must be in (0, 1)");
    }
    if (config.split.repeats < 1) {
      throw ConfigError("experiment: repeats must be >= 1");
    }
  }
  if (config.sum_btf_distance && config.classifier != ClassifierKind::Knn) {
    throw ConfigError("experiment: summed BTF distance applies to knn only");
  }
  if (config.min_df < 1) {
    throw ConfigError("experiment: min_df must be >= 1");
  }
}

std::vector<FeatureBlock> without_btf(const std::vector<FeatureBlock>& blocks) {
  std::vector<FeatureBlock> out;
  for (auto b : blocks) {
    if (b != FeatureBlock::Btf) {
      out.push_back(b);
    }
  }
  return out;
}

double run_single(const ExperimentConfig& config, const LabeledCorpus& train,
                  const LabeledCorpus& test) {
  const auto table = build_table(train, config.min_df);
  const auto model =
      WeightingModel::fit(table, {.clamp_pcf_nonneg = config.clamp_pcf_nonneg});
  const auto train_labels = train.labels();
  const auto test_labels = test.labels();

  std::vector<std::uint32_t> predictions;
  if (config.classifier == ClassifierKind::Knn) {
    DistanceMatrix dist;
    if (config.sum_btf_distance) {
      const auto main_blocks = without_btf(config.blocks);
      const std::vector<FeatureBlock> btf_only{FeatureBlock::Btf};
      DistanceMatrix btf_dist = pairwise_distance(
          model.vectorize_all(test, btf_only, config.pcf_on_2b, config.threads),
          model.vectorize_all(train, btf_only, config.pcf_on_2b,
                              config.threads),
          config.threads);
      if (main_blocks.empty()) {
        dist = std::move(btf_dist);
      } else {
        const DistanceMatrix main_dist = pairwise_distance(
            model.vectorize_all(test, main_blocks, config.pcf_on_2b,
                                config.threads),
            model.vectorize_all(train, main_blocks, config.pcf_on_2b,
                                config.threads),
            config.threads);
        dist = combined_distance(main_dist, btf_dist);
      }
    } else {
      dist = pairwise_distance(
          model.vectorize_all(test, config.blocks, config.pcf_on_2b,
                              config.threads),
          model.vectorize_all(train, config.blocks, config.pcf_on_2b,
                              config.threads),
          config.threads);
    }
    predictions = knn_predict(dist, train_labels, config.k);
  } else {
    const auto x_train = model.vectorize_all(train, config.blocks,
                                             config.pcf_on_2b, config.threads);
    const auto x_test = model.vectorize_all(test, config.blocks,
                                            config.pcf_on_2b, config.threads);
    const auto lr = LogRegModel::fit(x_train, train_labels,
                                     train.num_classes(), config.logreg,
                                     train.class_names());
    predictions = lr.predict(x_test);
  }
  return error_rate(predictions, test_labels);
}

void finalize_stats(EvalReport& report) {
  const auto n = static_cast<double>(report.errors.size());
  report.mean_error =
      std::accumulate(report.errors.begin(), report.errors.end(), 0.0) / n;
  double var = 0.0;
  for (double e : report.errors) {
    var += (e - report.mean_error) * (e - report.mean_error);
  }
  report.std_error = std::sqrt(var / n);
}

}  // namespace

std::pair<LabeledCorpus, LabeledCorpus> load_predefined(
    const fs::path& dir, CorpusFormat format, const TokenizerConfig& tokenizer) {
  fs::path train_path;
  fs::path test_path;
  switch (format) {
    case CorpusFormat::ClassDirs:
      train_path = dir / "train";
      test_path = dir / "test";
      break;
    case CorpusFormat::Jsonl:
      train_path = dir / "train.jsonl";
      test_path = dir / "test.jsonl";
      break;
    case CorpusFormat::Tsv:
      train_path = dir / "train.tsv";
      test_path = dir / "test.tsv";
      break;
  }
  if (!fs::exists(train_path) || !fs::exists(test_path)) {
    throw IngestError("predefined split: expected " + train_path.string() +
                      " and " + test_path.string());
  }
  LabeledCorpus train = load_corpus(train_path, format, tokenizer);
  LabeledCorpus test = load_corpus(test_path, format, tokenizer);

  // Re-map both sides onto the union class space so label indices agree.
  std::vector<std::string> names = train.class_names();
  names.insert(names.end(), test.class_names().begin(),
               test.class_names().end());
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());

  auto remap = [&](const LabeledCorpus& corpus) {
    std::vector<Document> docs = corpus.documents();
    for (auto& doc : docs) {
      const auto& old_name = corpus.class_names()[doc.label];
      const auto it = std::lower_bound(names.begin(), names.end(), old_name);
      doc.label = static_cast<std::uint32_t>(it - names.begin());
    }
    return LabeledCorpus(std::move(docs), names);
  };
  return {remap(train), remap(test)};
}

EvalReport run_experiment(const ExperimentConfig& config,
                          const LabeledCorpus& corpus) {
  validate_config(config);
  if (config.split.predefined) {
    throw ConfigError(
        "experiment: predefined split needs a dataset directory, not an "
        "in-memory corpus");
  }
  if (corpus.num_classes() < 2) {
    throw ConfigError("experiment: corpus has fewer than 2 classes");
  }
  const auto start = Clock::now();
  EvalReport report;
  for (std::size_t r = 0; r < config.split.repeats; ++r) {
    const std::uint64_t seed = config.split.base_seed + r;
    const auto [train, test] =
        split(corpus, config.split.test_fraction, seed);
    report.seeds.push_back(seed);
    report.errors.push_back(run_single(config, train, test));
  }
  finalize_stats(report);
  report.timings_ms["experiment_ms"] = ms_since(start);
  report.timings_ms["total_ms"] = ms_since(start);
  return report;
}

EvalReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  const auto start = Clock::now();
  const TokenizerConfig tokenizer = tokenizer_from_config(config);

  if (config.split.predefined) {
    const auto [train, test] =
        load_predefined(config.dataset, config.format, tokenizer);
    const double load_ms = ms_since(start);
    if (train.num_classes() < 2) {
      throw ConfigError("experiment: corpus has fewer than 2 classes");
    }
    EvalReport report;
    report.predefined_split = true;
    const auto run_start = Clock::now();
    report.errors.push_back(run_single(config, train, test));
    finalize_stats(report);
    report.timings_ms["load_ms"] = load_ms;
    report.timings_ms["experiment_ms"] = ms_since(run_start);
    report.timings_ms["total_ms"] = ms_since(start);
    return report;
  }

  const LabeledCorpus corpus =
      load_corpus(config.dataset, config.format, tokenizer);
  const double load_ms = ms_since(start);
  EvalReport report = run_experiment(config, corpus);
  report.timings_ms["load_ms"] = load_ms;
  report.timings_ms["total_ms"] = ms_since(start);
  return report;
}

namespace {

nlohmann::json config_json(const ExperimentConfig& config) {
  nlohmann::json blocks = nlohmann::json::array();
  for (auto b : config.blocks) {
    blocks.push_back(std::string(block_name(b)));
  }
  nlohmann::json j{
      {"dataset", config.dataset.string()},
      {"format", std::string(format_name(config.format))},
      {"classifier", std::string(classifier_name(config.classifier))},
      {"features", blocks},
      {"pcf_on_2b", config.pcf_on_2b},
      {"clamp_pcf_nonneg", config.clamp_pcf_nonneg},
      {"sum_btf_distance", config.sum_btf_distance},
      {"min_df", config.min_df},
      {"min_token_length", config.min_token_length},
      {"stopwords", config.stopwords.string()},
      {"split",
       {{"mode", config.split.predefined ? "predefined" : "random"},
        {"test_fraction", config.split.test_fraction},
        {"repeats", config.split.repeats},
        {"base_seed", config.split.base_seed}}},
  };
  if (config.classifier == ClassifierKind::Knn) {
    j["k"] = config.k;
  } else {
    j["logreg"] = {{"l2_lambda", config.logreg.l2_lambda},
                   {"tol", config.logreg.tol},
                   {"max_iters", config.logreg.max_iters},
                   {"init_step", config.logreg.init_step}};
  }
  return j;
}

}  // namespace

std::string report_json(const EvalReport& report,
                        const ExperimentConfig& config) {
  nlohmann::json repeats = nlohmann::json::array();
  for (std::size_t r = 0; r < report.errors.size(); ++r) {
    nlohmann::json entry{{"repeat", r}, {"error", report.errors[r]}};
    if (r < report.seeds.size()) {
      entry["seed"] = report.seeds[r];
    }
    repeats.push_back(entry);
  }
  nlohmann::json baseline;
  if (report.baseline_mean_error) {
    baseline = {{"baseline_mean_error", *report.baseline_mean_error},
                {"relative_error_reduction", *report.relative_error_reduction}};
  }
  nlohmann::json doc{
      {"config", config_json(config)},
      {"repeats", repeats},
      {"mean_error", report.mean_error},
      {"std_error", report.std_error},
      {"baseline_comparison", baseline},
      {"timings", report.timings_ms},
  };
  return doc.dump(2) + "\n";
}

void write_report_json(const EvalReport& report, const ExperimentConfig& config,
                       const fs::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("report: cannot write " + path.string());
  }
  out << report_json(report, config);
  if (!out) {
    throw IoError("report: write failed for " + path.string());
  }
}

void write_repeat_csv(const EvalReport& report, const fs::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("report csv: cannot write " + path.string());
  }
  out << "repeat,seed,error\n";
  char buf[96];
  for (std::size_t r = 0; r < report.errors.size(); ++r) {
    if (r < report.seeds.size()) {
      std::snprintf(buf, sizeof(buf), "%zu,%llu,%.17g\n", r,
                    static_cast<unsigned long long>(report.seeds[r]),
                    report.errors[r]);
    } else {
      std::snprintf(buf, sizeof(buf), "%zu,,%.17g\n", r, report.errors[r]);
    }
    out << buf;
  }
}

double load_report_mean_error(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IngestError("baseline report: cannot open " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IngestError("baseline report: invalid JSON in " + path.string() +
                      ": " + e.what());
  }
  if (!doc.contains("mean_error") || !doc["mean_error"].is_number()) {
    throw SchemaError("baseline report: no numeric mean_error in " +
                      path.string());
  }
  return doc["mean_error"].get<double>();
}

void apply_baseline(EvalReport& report, const fs::path& baseline) {
  const double base = load_report_mean_error(baseline);
  report.baseline_mean_error = base;
  report.relative_error_reduction =
      relative_reduction(base, report.mean_error);
}

namespace {

void write_vector_tsv(std::ostream& out, const LabeledCorpus& corpus,
                      const FeatureMatrix& matrix,
                      const std::vector<std::string>& feature_names) {
  out << "id\tlabel";
  for (const auto& name : feature_names) {
    out << '\t' << name;
  }
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& doc = corpus.documents()[i];
    out << doc.id << '\t' << corpus.class_names()[doc.label];
    std::vector<double> dense(matrix.dim, 0.0);
    for (const auto& [idx, value] : matrix.rows[i].entries) {
      dense[idx] = value;
    }
    for (double v : dense) {
      std::snprintf(buf, sizeof(buf), "\t%.17g", v);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace

void export_vectors(const ExperimentConfig& config, const fs::path& out_path,
                    ExportSide side) {
  validate_config(config);
  const TokenizerConfig tokenizer = tokenizer_from_config(config);

  std::ofstream out(out_path);
  if (!out) {
    throw IoError("export: cannot write " + out_path.string());
  }

  LabeledCorpus fit_side;    // the documents the weighting is fitted on
  LabeledCorpus exported;    // the documents written out
  bool split_in_two = false;
  LabeledCorpus train, test;

  if (config.split.predefined) {
    auto pair = load_predefined(config.dataset, config.format, tokenizer);
    train = std::move(pair.first);
    test = std::move(pair.second);
    split_in_two = true;
  } else if (side == ExportSide::All) {
    fit_side = load_corpus(config.dataset, config.format, tokenizer);
    exported = fit_side;
  } else {
    const LabeledCorpus corpus =
        load_corpus(config.dataset, config.format, tokenizer);
    auto pair = split(corpus, config.split.test_fraction,
                      config.split.base_seed);
    train = std::move(pair.first);
    test = std::move(pair.second);
    split_in_two = true;
  }

  if (split_in_two) {
    fit_side = train;
    switch (side) {
      case ExportSide::Train:
        exported = std::move(train);
        break;
      case ExportSide::Test:
        exported = std::move(test);
        break;
      case ExportSide::All: {
        std::vector<Document> docs = train.documents();
        docs.insert(docs.end(), test.documents().begin(),
                    test.documents().end());
        exported = LabeledCorpus(std::move(docs), train.class_names());
        break;
      }
    }
  }

  if (fit_side.size() == 0) {
    out << "id\tlabel\n";  // nothing to fit on, nothing to export
    return;
  }

  const auto table = build_table(fit_side, config.min_df);
  const auto model =
      WeightingModel::fit(table, {.clamp_pcf_nonneg = config.clamp_pcf_nonneg});
  const auto matrix = model.vectorize_all(exported, config.blocks,
                                          config.pcf_on_2b, config.threads);

  std::vector<std::string> feature_names;
  feature_names.reserve(matrix.dim);
  for (auto block : config.blocks) {
    for (const auto& term : table.vocab()) {
      feature_names.push_back(std::string(block_name(block)) + ":" + term);
    }
  }
  write_vector_tsv(out, exported, matrix, feature_names);
  if (!out) {
    throw IoError("export: write failed for " + out_path.string());
  }
}

}  // namespace troenpy
