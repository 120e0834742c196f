#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "codepurify/cli.hpp"
#include "codepurify/dataset.hpp"
#include "codepurify/report.hpp"
#include "doctest.h"

using namespace codepurify;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = 0;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.status = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Scratch directory holding a desk-size synthetic scenario.
class Workspace {
 public:
  Workspace() : dir_(fs::temp_directory_path() / ("codepurify-cli-" + std::to_string(::getpid()))) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }

  std::string operator()(const std::string& name) const { return (dir_ / name).string(); }

 private:
  fs::path dir_;
};

void prepare(const Workspace& w) {
  REQUIRE(cli({"synth", "--count", "2000", "--seed", "11", "--prefix", "clean", "-o", w("clean.jsonl")}).status == 0);
  REQUIRE(cli({"synth", "--count", "2000", "--seed", "12", "--prefix", "suspect", "-o", w("base.jsonl")}).status == 0);
  REQUIRE(cli({"poison", "-i", w("base.jsonl"), "-o", w("suspect.jsonl"), "--seed", "3"}).status == 0);
}

}  // namespace

TEST_CASE("full pipeline through the command line") {
  Workspace w;
  prepare(w);
  const auto train = cli({"train", "-i", w("clean.jsonl"), "-o", w("model.bin")});
  REQUIRE(train.status == 0);
  CHECK(train.out.find("vocabulary=") != std::string::npos);
  CHECK(train.out.find("train_time=") != std::string::npos);

  const auto scan = cli({"scan", "-m", w("model.bin"), "-i", w("suspect.jsonl"), "-o", w("report.json")});
  REQUIRE(scan.status == 0);
  const auto report = load_report(w("report.json"));
  CHECK(report.selected.size() == 10);
  CHECK(scan.out.find(format_report_table(report, report.k)) == 0);
  CHECK(std::find(report.selected.begin(), report.selected.end(), "rb") != report.selected.end());

  REQUIRE(cli({"purify", "-m", w("model.bin"), "-i", w("suspect.jsonl"), "-r", w("report.json"), "-o",
               w("purified.jsonl"), "--removed-out", w("removed.jsonl")})
              .status == 0);
  CHECK(load_dataset(w("purified.jsonl")).size() + load_dataset(w("removed.jsonl")).size() == 2000);

  const auto eval = cli({"eval", "-i", w("suspect.jsonl"), "-r", w("report.json"), "--truth",
                         w("suspect.jsonl.records.jsonl"), "-o", w("metrics.json")});
  REQUIRE(eval.status == 0);
  CHECK(eval.out.find("recall=1.0000") != std::string::npos);
  CHECK(fs::exists(w("metrics.json")));
}

TEST_CASE("reruns produce byte-identical artifacts") {
  Workspace w;
  prepare(w);
  for (const char* tag : {"a", "b"}) {
    const std::string t = tag;
    REQUIRE(cli({"train", "-i", w("clean.jsonl"), "-o", w("model" + t)}).status == 0);
    REQUIRE(cli({"scan", "-m", w("model" + t), "-i", w("suspect.jsonl"), "-o", w("report" + t)}).status == 0);
    REQUIRE(cli({"purify", "-m", w("model" + t), "-i", w("suspect.jsonl"), "-r", w("report" + t), "-o",
                 w("purified" + t)})
                .status == 0);
    REQUIRE(cli({"poison", "-i", w("base.jsonl"), "-o", w("poisoned" + t), "--seed", "3", "--attack", "bnc-grammar"})
                .status == 0);
  }
  for (const char* name : {"model", "report", "purified", "poisoned"}) {
    const std::string n = name;
    CHECK(slurp(w(n + "a")) == slurp(w(n + "b")));
    CHECK_FALSE(slurp(w(n + "a")).empty());
  }
}

TEST_CASE("empty corpus fails without writing a model") {
  Workspace w;
  std::ofstream(w("empty.jsonl")).close();
  const auto r = cli({"train", "-i", w("empty.jsonl"), "-o", w("model.bin")});
  CHECK(r.status != 0);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK_FALSE(fs::exists(w("model.bin")));
}

TEST_CASE("purify with an empty selection copies the input") {
  Workspace w;
  prepare(w);
  REQUIRE(cli({"train", "-i", w("clean.jsonl"), "-o", w("model.bin")}).status == 0);
  REQUIRE(cli({"scan", "-m", w("model.bin"), "-i", w("suspect.jsonl"), "-o", w("report.json"), "--k", "0"}).status == 0);
  CHECK(load_report(w("report.json")).selected.empty());
  REQUIRE(cli({"purify", "-m", w("model.bin"), "-i", w("suspect.jsonl"), "-r", w("report.json"), "-o",
               w("out.jsonl")})
              .status == 0);
  CHECK(slurp(w("out.jsonl")) == slurp(w("suspect.jsonl")));
}

TEST_CASE("clean scan still selects k tokens") {
  Workspace w;
  prepare(w);
  REQUIRE(cli({"train", "-i", w("clean.jsonl"), "-o", w("model.bin")}).status == 0);
  REQUIRE(cli({"scan", "-m", w("model.bin"), "-i", w("base.jsonl"), "-o", w("report.json"), "--k", "7"}).status == 0);
  CHECK(load_report(w("report.json")).selected.size() == 7);
}

TEST_CASE("scan refuses a tokenizer mismatch") {
  Workspace w;
  prepare(w);
  REQUIRE(cli({"train", "-i", w("clean.jsonl"), "-o", w("model.bin")}).status == 0);
  const auto r = cli({"scan", "-m", w("model.bin"), "-i", w("suspect.jsonl"), "-o", w("r.json"), "--tokenizer", "coarse"});
  CHECK(r.status != 0);
  CHECK_FALSE(fs::exists(w("r.json")));
}

TEST_CASE("eval matches a hand-computed confusion") {
  Workspace w;
  {
    std::ofstream d(w("d.jsonl"));
    for (int i = 0; i < 10; ++i) {
      d << "{\"id\":\"s" << i << "\",\"code\":\"x\",\"poisoned\":" << (i < 2 ? "true" : "false") << "}\n";
    }
    std::ofstream f(w("flagged.txt"));
    f << "s0\ns5\ns6\n";
  }
  // tp = 1 (s0), fn = 1 (s1), fp = 2 (s5, s6), tn = 6.
  const auto r = cli({"eval", "-i", w("d.jsonl"), "--flagged", w("flagged.txt")});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("tp=1 fp=2 tn=6 fn=1") != std::string::npos);
  CHECK(r.out.find("recall=0.5000 fpr=0.2500 precision=0.3333") != std::string::npos);
}

TEST_CASE("sweep writes a table") {
  Workspace w;
  const auto r = cli({"sweep", "--axis", "k", "--values", "5,10", "--clean-size", "300", "--suspect-size", "300",
                      "--rate", "0.02", "--seed", "4", "-o", w("t.csv"), "--json-out", w("t.json")});
  REQUIRE(r.status == 0);
  const std::string table = slurp(w("t.csv"));
  CHECK(table.rfind("k,status", 0) == 0);
  CHECK(table.find("\n10,ok,") != std::string::npos);
  CHECK(fs::exists(w("t.json")));
}

TEST_CASE("bad arguments exit nonzero") {
  CHECK(cli({}).status != 0);
  CHECK(cli({"scan"}).status != 0);
  CHECK(cli({"train", "-i", "/nonexistent/x.jsonl", "-o", "/tmp/never.bin"}).status != 0);
  CHECK(cli({"poison", "-i", "/nonexistent", "-o", "/tmp/x", "--attack", "mixup"}).status != 0);
  CHECK(cli({"--help"}).status == 0);
}
