// troenpy: corpus statistics, weighting inspection, classification
// experiments, and feature-vector export from one binary.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/config/ingestion error.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "troenpy/corpus.hpp"
#include "troenpy/errors.hpp"
#include "troenpy/eval.hpp"
#include "troenpy/weighting.hpp"

namespace {

struct CommonOptions {
  std::string dataset;
  std::string format = "jsonl";
  std::string stopwords;
  std::uint32_t min_df = 1;
  std::size_t min_token_length = 2;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--dataset", opts.dataset, "Corpus path")->required();
  cmd->add_option("--format", opts.format,
                  "Corpus format: jsonl, class-dirs, or tsv")
      ->capture_default_str();
  cmd->add_option("--stopwords", opts.stopwords,
                  "Newline-delimited stop-word file")
      ->envname("TROENPY_STOPWORDS");
  cmd->add_option("--min-df", opts.min_df,
                  "Drop terms seen in fewer documents than this")
      ->capture_default_str();
  cmd->add_option("--min-token-length", opts.min_token_length,
                  "Drop tokens shorter than this")
      ->capture_default_str();
}

troenpy::TokenizerConfig tokenizer_for(const CommonOptions& opts) {
  troenpy::TokenizerConfig tok;
  tok.min_token_length = opts.min_token_length;
  if (!opts.stopwords.empty()) {
    tok.stopwords = troenpy::load_stopwords(opts.stopwords);
  }
  return tok;
}

struct EvalOptions {
  CommonOptions common;
  std::string classifier = "knn";
  std::string features = "tfpi";
  std::size_t k = 7;
  double l2_lambda = 1e-4;
  std::size_t repeats = 50;
  std::uint64_t seed = 42;
  double test_fraction = 0.2;
  bool predefined = false;
  bool pcf_on_2b = false;
  bool clamp_pcf = false;
  bool sum_btf_distance = false;
  std::string baseline;
  std::string out = "eval_report.json";
  std::string csv;
  unsigned threads = 0;
};

troenpy::ExperimentConfig experiment_from(const EvalOptions& opts) {
  troenpy::ExperimentConfig config;
  config.dataset = opts.common.dataset;
  config.format = troenpy::format_from_name(opts.common.format);
  config.classifier = troenpy::classifier_from_name(opts.classifier);
  config.blocks = troenpy::blocks_from_csv(opts.features);
  config.k = opts.k;
  config.logreg.l2_lambda = opts.l2_lambda;
  config.split.predefined = opts.predefined;
  config.split.repeats = opts.repeats;
  config.split.base_seed = opts.seed;
  config.split.test_fraction = opts.test_fraction;
  config.pcf_on_2b = opts.pcf_on_2b;
  config.clamp_pcf_nonneg = opts.clamp_pcf;
  config.sum_btf_distance = opts.sum_btf_distance;
  config.min_df = opts.common.min_df;
  config.min_token_length = opts.common.min_token_length;
  config.stopwords = opts.common.stopwords;
  config.threads = opts.threads;
  return config;
}

int cmd_stats(const CommonOptions& opts, const std::string& dump_weights) {
  const auto corpus = troenpy::load_corpus(
      opts.dataset, troenpy::format_from_name(opts.format),
      tokenizer_for(opts));
  if (corpus.size() == 0) {
    std::cout << "n=0 K=0 C=[] vocab=0\n";
    return 0;
  }
  const auto table = troenpy::build_table(corpus, opts.min_df);

  std::ostringstream counts;
  counts << "[";
  for (std::size_t i = 0; i < corpus.class_counts().size(); ++i) {
    counts << (i ? "," : "") << corpus.class_counts()[i];
  }
  counts << "]";
  std::cout << "n=" << corpus.size() << " K=" << corpus.num_classes()
            << " C=" << counts.str() << " vocab=" << table.vocab_size()
            << "\n";

  if (!dump_weights.empty()) {
    const auto model = troenpy::WeightingModel::fit(table);
    if (dump_weights == "-") {
      model.write_weights_tsv(std::cout);
    } else {
      std::ofstream out(dump_weights);
      if (!out) {
        throw troenpy::IoError("stats: cannot write " + dump_weights);
      }
      model.write_weights_tsv(out);
    }
  }
  return 0;
}

int cmd_eval(const EvalOptions& opts) {
  auto config = experiment_from(opts);
  auto report = troenpy::run_experiment(config);
  if (!opts.baseline.empty()) {
    troenpy::apply_baseline(report, opts.baseline);
  }
  troenpy::write_report_json(report, config, opts.out);
  if (!opts.csv.empty()) {
    troenpy::write_repeat_csv(report, opts.csv);
  }
  char line[128];
  std::snprintf(line, sizeof(line), "mean_error=%.10g std=%.10g repeats=%zu\n",
                report.mean_error, report.std_error, report.errors.size());
  std::cout << line;
  return 0;
}

int cmd_export(const EvalOptions& opts, const std::string& side_name) {
  auto config = experiment_from(opts);
  troenpy::ExportSide side = troenpy::ExportSide::All;
  if (side_name == "train") {
    side = troenpy::ExportSide::Train;
  } else if (side_name == "test") {
    side = troenpy::ExportSide::Test;
  } else if (side_name != "all") {
    throw troenpy::ConfigError("export: --split must be train, test, or all");
  }
  troenpy::export_vectors(config, opts.out, side);
  std::cout << "wrote " << opts.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"troenpy text-classification toolkit"};
  app.set_config("--config", "", "Read options from an INI/TOML config file");
  app.require_subcommand(1);

  CommonOptions stats_opts;
  std::string dump_weights;
  auto* stats = app.add_subcommand("stats", "Corpus and vocabulary statistics");
  add_common(stats, stats_opts);
  stats->add_option("--dump-weights", dump_weights,
                    "Write the per-term weight TSV here ('-' for stdout)");

  EvalOptions eval_opts;
  auto* eval = app.add_subcommand("eval", "Run a classification experiment");
  add_common(eval, eval_opts.common);
  eval->add_option("--classifier", eval_opts.classifier, "knn or logreg")
      ->capture_default_str();
  eval->add_option("--features", eval_opts.features,
                   "Comma list of tfidf, tfpi, btf, ecib_ncf, ecib_pcf")
      ->capture_default_str();
  eval->add_option("--k", eval_opts.k, "Neighbor count for knn")
      ->capture_default_str();
  eval->add_option("--l2-lambda", eval_opts.l2_lambda,
                   "L2 penalty for logreg")
      ->capture_default_str();
  eval->add_option("--repeats", eval_opts.repeats,
                   "Random-split repetitions")
      ->capture_default_str();
  eval->add_option("--seed", eval_opts.seed, "Base seed; repeat r uses seed+r")
      ->capture_default_str();
  eval->add_option("--test-fraction", eval_opts.test_fraction,
                   "Held-out fraction per repeat")
      ->capture_default_str();
  eval->add_flag("--predefined-split", eval_opts.predefined,
                 "Use the dataset's shipped train/test split");
  eval->add_flag("--pcf-on-2b", eval_opts.pcf_on_2b,
                 "Multiply BTF/ECIB features by the PCF weight");
  eval->add_flag("--clamp-pcf", eval_opts.clamp_pcf,
                 "Clamp negative PCF weights at zero");
  eval->add_flag("--sum-btf-distance", eval_opts.sum_btf_distance,
                 "knn: add a BTF-only distance matrix to the main one");
  eval->add_option("--baseline", eval_opts.baseline,
                   "Previous report JSON to compute error reduction against");
  eval->add_option("--out", eval_opts.out, "Report JSON path")
      ->capture_default_str();
  eval->add_option("--csv", eval_opts.csv, "Optional per-repeat error CSV");
  eval->add_option("--threads", eval_opts.threads,
                   "Worker thread cap (0 = all cores)")
      ->capture_default_str();

  EvalOptions export_opts;
  export_opts.out = "vectors.tsv";
  std::string export_side = "all";
  auto* exporter =
      app.add_subcommand("export", "Write document feature vectors as TSV");
  add_common(exporter, export_opts.common);
  exporter->add_option("--features", export_opts.features,
                       "Comma list of feature blocks")
      ->capture_default_str();
  exporter->add_option("--split", export_side,
                       "Which side to export: train, test, or all")
      ->capture_default_str();
  exporter->add_option("--seed", export_opts.seed, "Split seed")
      ->capture_default_str();
  exporter->add_option("--test-fraction", export_opts.test_fraction,
                       "Held-out fraction when splitting")
      ->capture_default_str();
  exporter->add_flag("--predefined-split", export_opts.predefined,
                     "Use the dataset's shipped train/test split");
  exporter->add_flag("--pcf-on-2b", export_opts.pcf_on_2b,
                     "Multiply BTF/ECIB features by the PCF weight");
  exporter->add_flag("--clamp-pcf", export_opts.clamp_pcf,
                     "Clamp negative PCF weights at zero");
  exporter->add_option("--out", export_opts.out, "Output TSV path")
      ->capture_default_str();
  exporter->add_option("--threads", export_opts.threads,
                       "Worker thread cap (0 = all cores)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (stats->parsed()) {
      return cmd_stats(stats_opts, dump_weights);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_opts);
    }
    return cmd_export(export_opts, export_side);
  } catch (const troenpy::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const troenpy::IngestError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
