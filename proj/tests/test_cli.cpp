// End-to-end checks of the installed command surface: flags, exit codes,
// stdout contract, and report determinism, driven through the real binary.

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "support/synthetic.hpp"
#include "support/tmpdir.hpp"
#include <json.hpp>

using testutil::TempDir;
using testutil::write_file;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string command = std::string(TROENPY_CLI_BIN) + " " + args;
  FILE* pipe = ::popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buffer[512];
  while (std::fgets(buffer, sizeof(buffer), pipe)) {
    result.out += buffer;
  }
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string toy_jsonl(const TempDir& dir) {
  const auto path = dir.file("toy.jsonl");
  std::ostringstream body;
  for (int i = 0; i < 5; ++i) {
    body << "{\"label\":\"spam\",\"text\":\"buy pills cheap pills now "
         << i << "x\"}\n";
    body << "{\"label\":\"ham\",\"text\":\"meeting notes agenda item "
         << i << "y\"}\n";
  }
  write_file(path, body.str());
  return path.string();
}

nlohmann::json load_json_without_timings(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  nlohmann::json doc;
  in >> doc;
  doc.erase("timings");
  return doc;
}

}  // namespace

TEST_CASE("stats prints corpus shape") {
  TempDir dir;
  const auto data = toy_jsonl(dir);
  const auto result =
      run_cli("stats --dataset " + data + " --format jsonl 2>/dev/null");
  CHECK(result.exit_code == 0);
  CHECK(result.out.rfind("n=10 K=2 C=[5,5] vocab=", 0) == 0);
}

TEST_CASE("min-df shrinks the reported vocabulary") {
  TempDir dir;
  const auto data = toy_jsonl(dir);
  auto vocab_of = [&](const std::string& extra) {
    const auto result = run_cli("stats --dataset " + data + extra +
                                " 2>/dev/null");
    REQUIRE(result.exit_code == 0);
    const auto pos = result.out.find("vocab=");
    REQUIRE(pos != std::string::npos);
    return std::stoul(result.out.substr(pos + 6));
  };
  CHECK(vocab_of(" --min-df 2") < vocab_of(""));
}

TEST_CASE("stats on a missing path exits 2 with empty stdout") {
  const auto result =
      run_cli("stats --dataset /no/such/corpus.jsonl 2>/dev/null");
  CHECK(result.exit_code == 2);
  CHECK(result.out.empty());
}

TEST_CASE("stats dumps the weight table on request") {
  TempDir dir;
  const auto data = toy_jsonl(dir);
  const auto tsv = dir.file("weights.tsv").string();
  const auto result = run_cli("stats --dataset " + data + " --dump-weights " +
                              tsv + " 2>/dev/null");
  CHECK(result.exit_code == 0);
  std::ifstream in(tsv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "term\tn_w\tidf\tpcf\tpi\tcib_ncf\tcib_pcf");
}

TEST_CASE("eval writes a report and a one-line summary") {
  TempDir dir;
  const auto data = toy_jsonl(dir);
  const auto report = dir.file("report.json").string();
  const auto result = run_cli(
      "eval --dataset " + data +
      " --classifier knn --features tfpi --k 3 --repeats 2 --seed 5"
      " --test-fraction 0.2 --out " + report + " 2>/dev/null");
  CHECK(result.exit_code == 0);
  CHECK(result.out.rfind("mean_error=", 0) == 0);
  CHECK(result.out.find("repeats=2") != std::string::npos);

  const auto doc = load_json_without_timings(report);
  CHECK(doc["config"]["classifier"] == "knn");
  CHECK(doc["config"]["k"] == 3);
  CHECK(doc["repeats"].size() == 2);
}

TEST_CASE("eval reruns byte-identically modulo timings") {
  TempDir dir;
  const auto data = toy_jsonl(dir);
  const auto r1 = dir.file("r1.json").string();
  const auto r2 = dir.file("r2.json").string();
  const std::string args = "eval --dataset " + data +
                           " --classifier knn --features tfidf --k 3"
                           " --repeats 3 --seed 11 --out ";
  CHECK(run_cli(args + r1 + " 2>/dev/null").exit_code == 0);
  CHECK(run_cli(args + r2 + " 2>/dev/null").exit_code == 0);
  CHECK(load_json_without_timings(r1) == load_json_without_timings(r2));
}

TEST_CASE("a four-block logreg invocation echoes its config") {
  TempDir dir;
  const auto data = toy_jsonl(dir);
  const auto report = dir.file("lr.json").string();
  const auto result = run_cli(
      "eval --dataset " + data +
      " --classifier logreg --features tfpi,btf,ecib_ncf,ecib_pcf"
      " --pcf-on-2b --repeats 1 --out " + report + " 2>/dev/null");
  CHECK(result.exit_code == 0);
  const auto doc = load_json_without_timings(report);
  CHECK(doc["config"]["classifier"] == "logreg");
  CHECK(doc["config"]["features"].size() == 4);
  CHECK(doc["config"]["pcf_on_2b"] == true);
  CHECK(doc["config"].contains("logreg"));
}

TEST_CASE("baseline comparisons appear in the follow-up report") {
  TempDir dir;
  const auto data = toy_jsonl(dir);
  const auto base = dir.file("base.json").string();
  const auto follow = dir.file("follow.json").string();
  CHECK(run_cli("eval --dataset " + data +
                " --features tfidf --k 3 --repeats 2 --out " + base +
                " 2>/dev/null")
            .exit_code == 0);
  const auto result = run_cli("eval --dataset " + data +
                              " --features tfpi --k 3 --repeats 2 --baseline " +
                              base + " --out " + follow + " 2>/dev/null");
  if (result.exit_code == 0) {
    const auto doc = load_json_without_timings(follow);
    CHECK(doc["baseline_comparison"].contains("relative_error_reduction"));
  } else {
    // a zero-error baseline makes the ratio undefined; that is a runtime error
    CHECK(result.exit_code == 1);
  }
}

TEST_CASE("export writes one row per document") {
  TempDir dir;
  const auto data = toy_jsonl(dir);
  const auto out = dir.file("vectors.tsv").string();
  const auto result = run_cli("export --dataset " + data + " --out " + out +
                              " 2>/dev/null");
  CHECK(result.exit_code == 0);
  std::ifstream in(out);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
  }
  CHECK(lines == 11);  // header + 10 documents
}

TEST_CASE("tfidf and tfpi exports share shape but not values") {
  TempDir dir;
  const auto data = toy_jsonl(dir);
  const auto a = dir.file("a.tsv").string();
  const auto b = dir.file("b.tsv").string();
  CHECK(run_cli("export --dataset " + data + " --features tfidf --out " + a +
                " 2>/dev/null")
            .exit_code == 0);
  CHECK(run_cli("export --dataset " + data + " --features tfpi --out " + b +
                " 2>/dev/null")
            .exit_code == 0);
  std::ifstream fa(a), fb(b);
  std::string la, lb;
  std::size_t rows = 0, diffs = 0;
  std::getline(fa, la);
  std::getline(fb, lb);  // headers differ in block names only
  while (std::getline(fa, la) && std::getline(fb, lb)) {
    ++rows;
    if (la != lb) ++diffs;
    CHECK(std::count(la.begin(), la.end(), '\t') ==
          std::count(lb.begin(), lb.end(), '\t'));
  }
  CHECK(rows == 10);
  CHECK(diffs > 0);
}

TEST_CASE("export --split test holds out the chosen side") {
  TempDir dir;
  const auto corpus = testutil::make_synthetic_corpus(
      41, {.classes = 2, .docs_per_class = 10, .noise_tokens = 6});
  testutil::write_jsonl(corpus, dir.file("data.jsonl"));
  const auto out = dir.file("test.tsv").string();
  const auto result = run_cli("export --dataset " +
                              dir.file("data.jsonl").string() +
                              " --split test --test-fraction 0.2 --out " + out +
                              " 2>/dev/null");
  CHECK(result.exit_code == 0);
  std::ifstream in(out);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
  }
  CHECK(lines == 5);  // header + round(20 * 0.2)
}

TEST_CASE("usage errors exit 2 and runtime failures exit 1") {
  TempDir dir;
  const auto data = toy_jsonl(dir);
  CHECK(run_cli("--definitely-not-a-flag 2>/dev/null").exit_code == 2);
  CHECK(run_cli("frobnicate 2>/dev/null").exit_code == 2);
  CHECK(run_cli("eval --dataset " + data + " --features bogus 2>/dev/null")
            .exit_code == 2);
  CHECK(run_cli("eval --dataset " + data + " --classifier nope 2>/dev/null")
            .exit_code == 2);
  CHECK(run_cli("eval --dataset " + data +
                " --repeats 1 --out /no/such/dir/report.json 2>/dev/null")
            .exit_code == 1);
  CHECK(run_cli("--help 2>/dev/null").exit_code == 0);
}

TEST_CASE("config files feed defaults that flags override") {
  TempDir dir;
  const auto data = toy_jsonl(dir);
  const auto cfg = dir.file("run.ini");
  write_file(cfg, "[eval]\nk=3\nrepeats=2\nfeatures=tfidf\n");
  const auto report = dir.file("cfg.json").string();
  const auto result = run_cli("--config " + cfg.string() + " eval --dataset " +
                              data + " --k 5 --out " + report + " 2>/dev/null");
  CHECK(result.exit_code == 0);
  const auto doc = load_json_without_timings(report);
  CHECK(doc["config"]["k"] == 5);                  // flag wins
  CHECK(doc["config"]["features"][0] == "tfidf");  // file fills the rest
  CHECK(doc["repeats"].size() == 2);
}
